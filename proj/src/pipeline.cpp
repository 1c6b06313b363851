#include "coe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>

#include "coe/dataset.hpp"
#include "coe/digest.hpp"
#include "coe/discrimination.hpp"
#include "coe/errors.hpp"
#include "coe/evaluation.hpp"
#include "coe/live_clients.hpp"
#include "coe/parallel.hpp"
#include "coe/perturbation.hpp"
#include "coe/prompts.hpp"
#include "coe/random.hpp"
#include "coe/text.hpp"
#include "coe/version.hpp"

namespace coe {
namespace fs = std::filesystem;
namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t chars_of(std::span<const KnowledgeSnippet> s) {
  std::int64_t n = 0;
  for (const auto& x : s) n += static_cast<std::int64_t>(x.char_len());
  return n;
}

void log_line(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << std::endl;
}

void write_json(const fs::path& path, const json& doc) {
  write_file_atomic(path.string(), doc.dump(2) + "\n");
}

}  // namespace

bool is_mixed_experiment(const std::string& e) {
  return e == "effectiveness" || e == "faithfulness" || e == "robustness";
}

std::vector<KnowledgeSnippet> sentence_snippets(const std::string& text_in, Condition c) {
  std::vector<KnowledgeSnippet> out;
  const std::string prefix = text::ascii_lower(to_string(c));
  std::size_t i = 0;
  for (auto& sent : segment_sentences(text_in).sentences) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%03zu", i++);
    out.emplace_back(prefix + "-" + idx, std::move(sent), Provenance::coe_piece);
  }
  return out;
}

std::vector<SignificancePair> significance_pairs(const std::string& experiment,
                                                std::span<const Condition> conditions) {
  std::vector<SignificancePair> pairs;
  if (experiment == "rag") {
    const bool naive = std::find(conditions.begin(), conditions.end(), Condition::rag) != conditions.end();
    const bool scope =
        std::find(conditions.begin(), conditions.end(), Condition::rag_scopecoe) != conditions.end();
    if (naive && scope) pairs.push_back({Condition::rag, Condition::rag_scopecoe});
    return pairs;
  }
  for (Condition c : conditions) {
    if (c != Condition::coe) pairs.push_back({Condition::coe, c});
  }
  return pairs;
}

std::shared_ptr<Backend> make_backend(const std::string& backend_id, const std::string& mock_rules_path,
                                      std::span<const QASample> samples) {
  if (backend_id == "mock") {
    MockRules rules;
    if (!mock_rules_path.empty()) rules = MockRules::from_json(json::parse(read_file(mock_rules_path)));
    rules.add_samples(samples);
    return std::make_shared<MockBackend>(std::move(rules));
  }
  if (backend_id == "openai") return OpenAiBackend::from_env();
  throw ConfigError("backend", "unknown backend \"" + backend_id + "\" (expected mock or openai)");
}

std::shared_ptr<SearchClient> make_search_client(const std::string& kind, const std::string& fixtures) {
  if (kind == "fixture") {
    if (fixtures.empty()) throw ConfigError("search", "fixture search needs a fixtures directory");
    return std::make_shared<FixtureSearchClient>(fixtures);
  }
  if (kind == "google") {
    std::shared_ptr<SearchClient> live = GoogleSearchClient::from_env();
    if (fixtures.empty()) return live;
    return std::make_shared<RecordingSearchClient>(std::move(live), fixtures);
  }
  throw ConfigError("search.client", "unknown search client \"" + kind + "\"");
}

std::shared_ptr<RelevanceScorer> make_scorer(const std::string& kind) {
  if (kind == "overlap") return std::make_shared<OverlapScorer>();
  if (kind == "rerank") return HttpRerankScorer::from_env();
  throw ConfigError("rag.scorer", "unknown scorer \"" + kind + "\" (expected overlap or rerank)");
}

std::vector<PreparedSample> prepare_samples(std::span<const QASample> samples, Gateway& judge,
                                            SearchClient* noise_search, const PrepareNeeds& needs,
                                            std::uint64_t seed, std::size_t per_query_limit,
                                            std::size_t misinformation_count, int threads) {
  std::vector<PreparedSample> out(samples.size());
  CoeDiscriminator discriminate = make_discriminator(judge);
  parallel::for_each_index(samples.size(), threads, [&](std::size_t i) {
    PreparedSample& p = out[i];
    p.sample = samples[i];
    p.id = sample_id(samples[i]);
    const QASample& s = p.sample;
    try {
      CoEVerdict v = discriminate(s.coe, s.features);
      p.is_coe = v.is_coe;
      p.missing_features = v.missing_features;
    } catch (const std::exception& e) {
      p.error = e.what();
      return;
    }
    if (!p.is_coe) return;

    p.texts[Condition::coe] = s.coe;
    if (s.senp) p.texts[Condition::senp] = *s.senp;
    if (s.wordp) p.texts[Condition::wordp] = *s.wordp;
    if (needs.perturbations && !s.senp) {
      try {
        p.texts[Condition::senp] = senp(s, discriminate).text;
        p.sample.senp = p.texts[Condition::senp];
      } catch (const std::exception& e) {
        p.text_errors[Condition::senp] = e.what();
      }
    }
    if (needs.perturbations && !s.wordp) {
      try {
        p.texts[Condition::wordp] =
            wordp(judge, s, derive_seed(seed, stages::kWordp, p.id), discriminate).text;
        p.sample.wordp = p.texts[Condition::wordp];
      } catch (const std::exception& e) {
        p.text_errors[Condition::wordp] = e.what();
      }
    }

    if (needs.noise) {
      try {
        if (!noise_search) throw PreconditionError("no search client configured for background queries");
        auto queries = irrelevant_queries(s.features);
        p.noise_pool = fetch_noise_pool(queries, *noise_search, per_query_limit, s.answer);
      } catch (const std::exception& e) {
        p.noise_error = e.what();
      }
    }
    if (needs.incorrect || needs.misinformation) {
      try {
        p.incorrect_answer = generate_incorrect_answer(judge, s.answer);
      } catch (const std::exception& e) {
        p.incorrect_error = e.what();
      }
    }
    if (needs.misinformation) {
      try {
        if (!p.incorrect_answer) throw PreconditionError("no incorrect answer: " + *p.incorrect_error);
        const auto core = sentence_snippets(s.coe, Condition::coe);
        const std::int64_t core_chars = chars_of(core);
        const Ratio t = needs.max_ratio;
        // Noise mass that puts the CoE exactly at the largest target ratio.
        const std::int64_t wanted = t.num * core_chars / std::max<std::int64_t>(1, t.den - t.num);
        const std::uint64_t mseed = derive_seed(seed, stages::kMisinformation, p.id);
        std::size_t count = misinformation_count;
        while (true) {
          p.misinformation = generate_misinformation(judge, s, *p.incorrect_answer, count, mseed);
          if (chars_of(p.misinformation) >= wanted || count >= 8 * misinformation_count) break;
          count *= 2;
        }
      } catch (const std::exception& e) {
        p.misinformation_error = e.what();
      }
    }
  });
  return out;
}

BuiltContext build_context(const PreparedSample& p, const std::string& experiment, Condition c,
                           Ratio ratio, std::uint64_t seed) {
  BuiltContext out;
  try {
    auto text_it = p.texts.find(c);
    if (text_it == p.texts.end()) {
      auto err = p.text_errors.find(c);
      throw Error(std::string(to_string(c)) + " unavailable" +
                  (err == p.text_errors.end() ? std::string() : ": " + err->second));
    }
    std::string body = text_it->second;
    out.reference = p.sample.answer;
    const bool noisy = ratio.num > 0;
    std::vector<KnowledgeSnippet> pool;
    if (experiment == "effectiveness") {
      if (noisy && p.noise_error) throw Error("noise pool unavailable: " + *p.noise_error);
      pool = p.noise_pool;
    } else if (experiment == "faithfulness") {
      if (!p.incorrect_answer) throw Error("incorrect answer unavailable: " + p.incorrect_error.value_or(""));
      body = substitute_answer(body, p.sample.answer, *p.incorrect_answer).text;
      out.reference = *p.incorrect_answer;
      if (noisy && p.noise_error) throw Error("noise pool unavailable: " + *p.noise_error);
      for (const auto& s : p.noise_pool) {
        if (!text::icontains(s.text(), *p.incorrect_answer)) pool.push_back(s);
      }
    } else if (experiment == "robustness") {
      if (noisy && p.misinformation_error) {
        throw Error("misinformation unavailable: " + *p.misinformation_error);
      }
      pool = p.misinformation;
    } else {
      throw PreconditionError("no mixed context for experiment " + experiment);
    }
    const auto core = sentence_snippets(body, c);
    const std::string stage = std::string(stages::kMix) + "/" + experiment + "/" + format_ratio(ratio);
    out.mixed = mix_to_ratio(core, pool, ratio, derive_seed(seed, stage, p.id));
  } catch (const std::exception& e) {
    out.error = e.what();
    out.mixed.reset();
  }
  return out;
}

std::vector<json> records_to_lines(const std::string& experiment, std::span<const TrialReport> reports) {
  std::vector<json> lines;
  for (const auto& r : reports) {
    for (const auto& rec : r.records) {
      json line{{"experiment", experiment},
                {"model", r.model},
                {"condition", to_string(r.condition)},
                {"ratio", r.ratio},
                {"repeat", r.repeat},
                {"metric", to_string(r.metric)},
                {"sample_id", rec.sample_id},
                {"output", rec.output},
                {"judge", rec.verdict}};
      if (rec.error) line["error"] = *rec.error;
      lines.push_back(std::move(line));
    }
  }
  return lines;
}

std::vector<TrialReport> reports_from_lines(std::span<const json> lines) {
  struct Group {
    Condition condition;
    std::string model;
    Ratio ratio;
    int repeat;
    MetricKind metric;
    std::vector<TrialRecord> records;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& line : lines) {
    Group key{condition_from_string(line.at("condition").get<std::string>()),
              line.at("model").get<std::string>(), line.at("ratio").get<Ratio>(),
              line.at("repeat").get<int>(),
              metric_from_string(line.value("metric", std::string("ACC"))), {}};
    const std::string k = key.model + "\x1f" + std::string(to_string(key.condition)) + "\x1f" +
                          format_ratio(key.ratio) + "\x1f" + std::to_string(key.repeat);
    auto [it, fresh] = index.emplace(k, groups.size());
    if (fresh) groups.push_back(std::move(key));
    TrialRecord rec;
    rec.sample_id = line.at("sample_id").get<std::string>();
    rec.output = line.value("output", "");
    rec.verdict = line.at("judge").get<bool>();
    if (line.contains("error")) rec.error = line["error"].get<std::string>();
    groups[it->second].records.push_back(std::move(rec));
  }
  std::vector<TrialReport> out;
  for (auto& g : groups) {
    out.push_back(make_trial_report(g.condition, g.model, g.ratio, g.repeat, g.metric, std::move(g.records)));
  }
  return out;
}

std::string path_digest(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return "";
  if (!fs::is_directory(path)) return sha256_hex(read_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (!e.is_regular_file()) continue;
    entries.emplace_back(fs::relative(e.path(), path).generic_string(), sha256_hex(read_file(e.path().string())));
  }
  std::sort(entries.begin(), entries.end());
  std::string material;
  for (const auto& [name, digest] : entries) material += name + "\x1f" + digest + "\n";
  return sha256_hex(material);
}

std::string manifest_digest(const json& manifest) {
  json plan = manifest.at("plan");
  for (const char* path_field : {"samples", "mock_rules", "noise_fixtures", "rag_fixtures", "cache_dir"}) {
    plan.erase(path_field);
  }
  json material{{"tool", manifest.at("tool")},
                {"version", manifest.at("version")},
                {"plan", plan},
                {"backend", manifest.at("backend")},
                {"template_digests", manifest.at("template_digests")},
                {"input_digests", manifest.at("input_digests")}};
  return sha256_hex(material.dump());
}

RunOutcome run_plan(const RunPlan& plan, const RunOptions& options) {
  if (options.out_dir.empty()) throw ConfigError("out", "output directory required");
  const fs::path out_dir(options.out_dir);
  fs::create_directories(out_dir / "results");
  const std::string started = utc_now();

  std::vector<QASample> samples = load_samples(plan.samples);
  if (samples.empty()) throw ConfigError("samples", "no samples in " + plan.samples);
  for (const auto& s : samples) {
    auto violations = validate_sample(s);
    if (!violations.empty()) {
      std::vector<std::string> lines;
      for (const auto& v : violations) lines.push_back(v.describe());
      throw ValidationError("sample " + sample_id(s) + " is invalid: " + text::join(lines, "; "), lines);
    }
  }

  auto backend = make_backend(plan.backend, plan.mock_rules, samples);
  const std::string cache_dir = plan.cache_dir.empty() ? (out_dir / "cache").string() : plan.cache_dir;
  auto cache = std::make_shared<ResponseCache>(cache_dir);
  Gateway judge(backend, cache, plan.judge_model);
  const int threads = plan.parallelism;

  auto has = [&](const char* e) {
    return std::find(plan.experiments.begin(), plan.experiments.end(), e) != plan.experiments.end();
  };
  PrepareNeeds needs;
  needs.perturbations = std::any_of(plan.experiments.begin(), plan.experiments.end(), is_mixed_experiment);
  needs.noise = has("effectiveness") || has("faithfulness");
  needs.incorrect = has("faithfulness") || has("robustness");
  needs.misinformation = has("robustness");
  needs.max_ratio = *std::max_element(plan.ratios.begin(), plan.ratios.end());

  std::shared_ptr<SearchClient> noise_search;
  if (needs.noise) {
    try {
      noise_search = make_search_client(plan.search, plan.noise_fixtures);
    } catch (const ConfigError& e) {
      throw ConfigError("search.noise_fixtures", e.what());
    }
  }

  log_line(options, "[prepare] " + std::to_string(samples.size()) + " samples");
  auto prepared = prepare_samples(samples, judge, noise_search.get(), needs, plan.seed,
                                  plan.per_query_limit, plan.misinformation_count, threads);

  RunOutcome outcome;
  outcome.manifest_path = (out_dir / "manifest.json").string();
  bool partial = false;
  std::size_t usable_count = 0;
  {
    std::vector<json> prepared_lines;
    std::vector<json> prep_lines;
    for (const auto& p : prepared) {
      prepared_lines.push_back(p.sample);
      json line{{"sample_id", p.id}, {"is_coe", p.is_coe}, {"missing_features", p.missing_features},
                {"noise_pool", p.noise_pool.size()}, {"misinformation", p.misinformation.size()}};
      if (p.incorrect_answer) line["incorrect_answer"] = *p.incorrect_answer;
      json errors = json::object();
      if (p.error) errors["coe"] = *p.error;
      for (const auto& [c, e] : p.text_errors) errors[std::string(to_string(c))] = e;
      if (p.noise_error) errors["noise"] = *p.noise_error;
      if (p.incorrect_error) errors["incorrect_answer"] = *p.incorrect_error;
      if (p.misinformation_error) errors["misinformation"] = *p.misinformation_error;
      if (!errors.empty()) {
        line["errors"] = errors;
        partial = true;
      }
      prep_lines.push_back(std::move(line));
      usable_count += p.usable() ? 1 : 0;
    }
    write_jsonl((out_dir / "samples.prepared.jsonl").string(), prepared_lines);
    write_jsonl((out_dir / "prepare.jsonl").string(), prep_lines);
    log_line(options, "[prepare] " + std::to_string(usable_count) + " usable, " +
                          std::to_string(prepared.size() - usable_count) + " excluded");
  }

  std::vector<const PreparedSample*> usable;
  for (const auto& p : prepared) {
    if (p.usable()) usable.push_back(&p);
  }

  for (const auto& experiment : plan.experiments) {
    if (!is_mixed_experiment(experiment)) continue;
    const fs::path dir = out_dir / "results" / experiment;
    fs::create_directories(dir);
    const MetricKind metric = experiment == "faithfulness" ? MetricKind::fr : MetricKind::acc;

    // Contexts do not depend on the answering model.
    std::map<std::pair<Condition, std::size_t>, std::vector<TrialInput>> inputs;
    std::vector<json> context_lines;
    for (Condition c : plan.conditions) {
      for (std::size_t r = 0; r < plan.ratios.size(); ++r) {
        auto& list = inputs[{c, r}];
        list.resize(usable.size());
        std::vector<BuiltContext> built(usable.size());
        parallel::for_each_index(usable.size(), threads, [&](std::size_t i) {
          built[i] = build_context(*usable[i], experiment, c, plan.ratios[r], plan.seed);
        });
        for (std::size_t i = 0; i < usable.size(); ++i) {
          TrialInput& in = list[i];
          in.sample_id = usable[i]->id;
          in.question = usable[i]->sample.question;
          in.reference = built[i].reference.empty() ? usable[i]->sample.answer : built[i].reference;
          json line{{"sample_id", in.sample_id}, {"condition", to_string(c)}, {"ratio", plan.ratios[r]}};
          if (built[i].mixed) {
            in.context = join_knowledge(built[i].mixed->snippets);
            line["context"] = *built[i].mixed;
          } else {
            in.error = built[i].error;
            line["error"] = *built[i].error;
          }
          context_lines.push_back(std::move(line));
        }
      }
    }
    write_jsonl((dir / "contexts.jsonl").string(), context_lines);

    std::vector<TrialReport> reports;
    for (const auto& model : plan.answer_models) {
      Gateway answerer = judge.with_model(model);
      for (Condition c : plan.conditions) {
        for (std::size_t r = 0; r < plan.ratios.size(); ++r) {
          const auto& list = inputs[{c, r}];
          if (list.empty()) continue;
          log_line(options, "[" + experiment + "] " + model + " " + std::string(to_string(c)) + " @ " +
                                format_ratio(plan.ratios[r]));
          auto run = run_condition(list, c, plan.ratios[r], answerer, judge, plan.repeats, metric, threads);
          for (auto& rep : run.repeats) reports.push_back(std::move(rep));
        }
      }
    }

    ExperimentReport report =
        build_report(experiment, metric, reports, plan.answer_models, plan.conditions, plan.ratios,
                     significance_pairs(experiment, plan.conditions), plan.mwu_unit);
    std::size_t failed = 0;
    for (const auto& r : reports) {
      for (const auto& rec : r.records) failed += rec.error ? 1 : 0;
    }
    outcome.failed_records += failed;
    if (failed || !report.missing_cells.empty()) partial = true;
    write_jsonl((dir / "records.jsonl").string(), records_to_lines(experiment, reports));
    json summary = report;
    summary["failed_records"] = failed;
    write_json(dir / "summary.json", summary);
    write_file_atomic((dir / "report.md").string(), render_markdown(report));
    outcome.reports[experiment] = std::move(report);
  }

  if (has("rag")) {
    const fs::path dir = out_dir / "results" / "rag";
    fs::create_directories(dir);
    std::shared_ptr<SearchClient> rag_search;
    try {
      rag_search = make_search_client(plan.search, plan.rag_fixtures);
    } catch (const ConfigError& e) {
      throw ConfigError("search.rag_fixtures", e.what());
    }
    auto scorer = make_scorer(plan.scorer);
    std::vector<QASample> rag_samples;
    for (const auto* p : usable) rag_samples.push_back(p->sample);

    RagOptions ro;
    ro.k = plan.k;
    ro.retrieve_limit = plan.retrieve_limit;
    ro.repeats = plan.repeats;
    ro.threads = threads;
    ro.run_naive = std::find(plan.arms.begin(), plan.arms.end(), "naive") != plan.arms.end();
    ro.run_scopecoe = std::find(plan.arms.begin(), plan.arms.end(), "scopecoe") != plan.arms.end();
    std::vector<Condition> arms;
    if (ro.run_naive) arms.push_back(Condition::rag);
    if (ro.run_scopecoe) arms.push_back(Condition::rag_scopecoe);

    std::vector<TrialReport> reports;
    json pieces = json::object();
    std::vector<json> trace_lines;
    if (!rag_samples.empty()) {
      for (const auto& model : plan.answer_models) {
        log_line(options, "[rag] " + model);
        Gateway answerer = judge.with_model(model);
        RagComparison cmp = run_rag_comparison(rag_samples, answerer, judge, *rag_search, *scorer, ro);
        for (auto& arm : cmp.arms) {
          pieces[model][std::string(to_string(arm.condition))] = arm.mean_pieces;
          for (auto& rep : arm.run.repeats) reports.push_back(std::move(rep));
        }
        if (trace_lines.empty()) {
          for (const auto& t : cmp.traces) trace_lines.push_back(t);
        }
      }
    }
    ExperimentReport report = build_report("rag", MetricKind::acc, reports, plan.answer_models, arms,
                                           {Ratio{0, 1}}, significance_pairs("rag", arms), plan.mwu_unit);
    std::size_t failed = 0;
    for (const auto& r : reports) {
      for (const auto& rec : r.records) failed += rec.error ? 1 : 0;
    }
    outcome.failed_records += failed;
    if (failed || !report.missing_cells.empty()) partial = true;
    write_jsonl((dir / "records.jsonl").string(), records_to_lines("rag", reports));
    write_jsonl((dir / "traces.jsonl").string(), trace_lines);
    json summary = report;
    summary["failed_records"] = failed;
    summary["mean_selected_pieces"] = pieces;
    write_json(dir / "summary.json", summary);
    std::string md = render_markdown(report);
    md += "\nMean selected pieces:\n";
    for (const auto& [model, per_arm] : pieces.items()) {
      for (const auto& [arm, v] : per_arm.items()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", v.get<double>());
        md += "- " + model + " " + arm + ": " + buf + "\n";
      }
    }
    write_file_atomic((dir / "report.md").string(), md);
    outcome.reports["rag"] = std::move(report);
  }

  json excluded = json::array();
  for (const auto& p : prepared) {
    if (p.usable()) continue;
    excluded.push_back(json{{"sample_id", p.id},
                            {"reason", p.error ? "judge failure: " + *p.error
                                               : "not a CoE, missing " + text::join(p.missing_features, ", ")}});
  }
  json backend_info{{"id", backend->id()},
                    {"deterministic", backend->deterministic()},
                    {"answer_models", plan.answer_models},
                    {"judge_model", plan.judge_model},
                    {"temperature", 0.0}};
  json manifest{{"tool", kToolName},
                {"version", kToolVersion},
                {"started_at", started},
                {"finished_at", utc_now()},
                {"plan", plan.to_json()},
                {"seed", plan.seed},
                {"seed_derivation", "first 8 bytes (big-endian) of sha256(\"<seed>/<stage>/<sample id>\")"},
                {"backend", backend_info},
                {"search", noise_search ? noise_search->id() : std::string()},
                {"template_digests", template_digests()},
                {"input_digests", json{{"samples", path_digest(plan.samples)},
                                       {"mock_rules", path_digest(plan.mock_rules)},
                                       {"noise_fixtures", path_digest(plan.noise_fixtures)},
                                       {"rag_fixtures", path_digest(plan.rag_fixtures)}}},
                {"samples", json{{"total", prepared.size()}, {"usable", usable.size()}, {"excluded", excluded}}},
                {"backend_calls", judge.backend_calls()},
                {"cache_hits", judge.stats().cache_hits.load()},
                {"failed_records", outcome.failed_records}};
  outcome.manifest_digest = manifest_digest(manifest);
  manifest["manifest_digest"] = outcome.manifest_digest;
  write_json(out_dir / "manifest.json", manifest);

  outcome.backend_calls = judge.backend_calls();
  outcome.cache_hits = judge.stats().cache_hits.load();
  outcome.exit_code = partial ? 1 : 0;
  log_line(options, "[done] backend calls " + std::to_string(outcome.backend_calls) + ", cache hits " +
                        std::to_string(outcome.cache_hits));
  return outcome;
}

}  // namespace coe
