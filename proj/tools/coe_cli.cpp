// Command-line entry point. Exit codes: 0 success, 1 partial failure (some
// items failed and were recorded), 2 hard error.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coe/coverage.hpp"
#include "coe/dataset.hpp"
#include "coe/discrimination.hpp"
#include "coe/errors.hpp"
#include "coe/extraction.hpp"
#include "coe/gateway.hpp"
#include "coe/noise.hpp"
#include "coe/parallel.hpp"
#include "coe/perturbation.hpp"
#include "coe/pipeline.hpp"
#include "coe/plan.hpp"
#include "coe/prompts.hpp"
#include "coe/random.hpp"
#include "coe/report.hpp"
#include "coe/text.hpp"
#include "coe/version.hpp"

namespace fs = std::filesystem;
using namespace coe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitHard = 2;

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct BackendFlags {
  std::string backend = "mock";
  std::string mock_rules;
  std::string cache_dir;
  std::string model = "mock-judge";
  int threads = 8;

  void add_to(CLI::App* cmd, bool with_backend = true) {
    if (with_backend) {
      cmd->add_option("--backend", backend, "mock or openai")->capture_default_str();
      cmd->add_option("--mock-rules", mock_rules, "Rule table for the mock backend");
      cmd->add_option("--cache-dir", cache_dir, "Response cache directory (in-memory when unset)");
      cmd->add_option("--model", model, "Model id for the calls this command makes")->capture_default_str();
    }
    cmd->add_option("--threads", threads, "Parallelism budget")->capture_default_str()->check(CLI::PositiveNumber);
  }

  Gateway gateway(std::span<const QASample> samples) const {
    auto b = make_backend(backend, mock_rules, samples);
    auto cache = cache_dir.empty() ? std::make_shared<ResponseCache>()
                                   : std::make_shared<ResponseCache>(cache_dir);
    return Gateway(std::move(b), std::move(cache), model);
  }
};

// Every command that writes an output file leaves <out>.manifest.json next to it.
void write_manifest(const std::string& out_path, const std::string& command, json params,
                    Gateway* gw, const std::string& started) {
  json m{{"tool", kToolName},
         {"version", kToolVersion},
         {"command", command},
         {"started_at", started},
         {"finished_at", utc_now()},
         {"params", std::move(params)},
         {"template_digests", template_digests()}};
  if (gw) {
    m["backend"] = json{{"id", gw->backend().id()}, {"model", gw->model()}};
    m["backend_calls"] = gw->backend_calls();
    m["cache_hits"] = gw->stats().cache_hits.load();
  }
  write_file_atomic(out_path + ".manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// A features line is either a bare QuestionFeatures object or a record with a
// "features" member (the output of `extract`).
QuestionFeatures features_from_line(const json& j) {
  return (j.contains("features") ? j.at("features") : j).get<QuestionFeatures>();
}

std::vector<Ratio> parse_ratio_list(const std::string& s) {
  std::vector<Ratio> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    double v = 0;
    try {
      v = std::stod(item);
    } catch (const std::exception&) {
      throw ConfigError("ratios", "not a number: " + item);
    }
    if (v < 0 || v >= 1) throw ConfigError("ratios", "ratio must be in [0, 1): " + item);
    out.push_back(Ratio::from_double(v));
  }
  if (out.empty()) throw ConfigError("ratios", "empty list");
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string in;
  std::string out;
  std::string samples;  // optional: questions come from samples, rules too
  BackendFlags flags;
};

int cmd_extract(const ExtractArgs& a) {
  const std::string started = utc_now();
  std::vector<QASample> samples;
  std::vector<std::string> questions;
  if (!a.samples.empty()) {
    samples = load_samples(a.samples);
    for (const auto& s : samples) questions.push_back(s.question);
  }
  if (!a.in.empty()) {
    for (auto& q : read_lines(a.in)) questions.push_back(std::move(q));
  }
  if (questions.empty()) throw ConfigError("in", "no questions given");
  Gateway gw = a.flags.gateway(samples);

  std::vector<json> lines(questions.size());
  std::vector<int> failed(questions.size(), 0);
  parallel::for_each_index(questions.size(), a.flags.threads, [&](std::size_t i) {
    json line{{"question", questions[i]}};
    std::vector<std::string> warnings;
    try {
      line["features"] = extract_question_features(gw, questions[i], &warnings);
    } catch (const Error& e) {
      line["error"] = e.what();
      failed[i] = 1;
    }
    if (!warnings.empty()) line["warnings"] = warnings;
    lines[i] = std::move(line);
  });
  write_jsonl(a.out, lines);
  write_manifest(a.out, "extract", json{{"in", a.in}, {"samples", a.samples}}, &gw, started);
  const int n_failed = std::accumulate(failed.begin(), failed.end(), 0);
  std::cerr << "extracted " << questions.size() - n_failed << "/" << questions.size() << "\n";
  return n_failed ? kExitPartial : kExitOk;
}

// ---- discriminate ------------------------------------------------------------

struct DiscriminateArgs {
  std::string features;
  std::string knowledge;
  std::string out;
  bool whole = false;
  BackendFlags flags;
};

int cmd_discriminate(const DiscriminateArgs& a) {
  const std::string started = utc_now();
  auto feature_lines = read_jsonl(a.features);
  if (feature_lines.size() != 1) {
    throw ConfigError("features", "expected exactly one feature record, got " +
                                      std::to_string(feature_lines.size()));
  }
  const QuestionFeatures features = features_from_line(feature_lines[0]);
  std::vector<KnowledgeSnippet> snippets;
  for (const auto& j : read_jsonl(a.knowledge)) snippets.push_back(snippet_from_json(j));
  require_unique_ids(snippets);
  Gateway gw = a.flags.gateway({});

  std::vector<json> lines;
  if (a.whole) {
    lines.push_back(discriminate_coe(gw, join_knowledge(snippets), features));
  } else {
    for (const auto& fj : judge_matrix(gw, snippets, features, a.flags.threads)) lines.push_back(fj);
  }
  write_jsonl(a.out, lines);
  write_manifest(a.out, "discriminate",
                 json{{"features", a.features}, {"knowledge", a.knowledge}, {"whole", a.whole}}, &gw,
                 started);
  return kExitOk;
}

// ---- cover -----------------------------------------------------------------

int cmd_cover(const std::string& judgments_path, const std::string& out) {
  const std::string started = utc_now();
  std::vector<FeatureJudgment> judgments;
  for (const auto& j : read_jsonl(judgments_path)) judgments.push_back(j.get<FeatureJudgment>());
  const auto picked = minimal_coverage_search(judgments);
  std::vector<std::string> ids;
  for (std::size_t i : picked) ids.push_back(judgments[i].snippet_id);
  const CoverageReport report = coverage_of(ids, judgments, shape_of(judgments));
  std::vector<json> lines{json{{"selected_ids", ids}, {"report", report}}};
  write_jsonl(out, lines);
  write_manifest(out, "cover", json{{"judgments", judgments_path}}, nullptr, started);
  return kExitOk;
}

// ---- perturb -------------------------------------------------------------------

struct PerturbArgs {
  std::string samples;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t count = 12;
  std::string out;
  BackendFlags flags;
};

int cmd_perturb(const PerturbArgs& a) {
  const std::string started = utc_now();
  const auto samples = load_samples(a.samples);
  Gateway gw = a.flags.gateway(samples);
  const CoeDiscriminator discriminate = make_discriminator(gw);

  std::vector<json> lines(samples.size());
  std::vector<int> failed(samples.size(), 0);
  parallel::for_each_index(samples.size(), a.flags.threads, [&](std::size_t i) {
    const QASample& s = samples[i];
    const std::string id = sample_id(s);
    json line{{"sample_id", id}};
    try {
      if (a.mode == "senp") {
        auto r = senp(s, discriminate);
        line["senp"] = r.text;
        line["removed"] = r.removed;
      } else if (a.mode == "wordp") {
        auto r = wordp(gw, s, derive_seed(a.seed, stages::kWordp, id), discriminate);
        line["wordp"] = r.text;
        line["keyword"] = r.keyword;
        line["hypernym"] = r.hypernym;
        line["replacements"] = r.replacements;
      } else if (a.mode == "answers") {
        line["answer"] = s.answer;
        line["incorrect_answer"] = generate_incorrect_answer(gw, s.answer);
      } else {
        const std::string incorrect = generate_incorrect_answer(gw, s.answer);
        line["incorrect_answer"] = incorrect;
        line["snippets"] = generate_misinformation(gw, s, incorrect, a.count,
                                                   derive_seed(a.seed, stages::kMisinformation, id));
      }
    } catch (const Error& e) {
      line["error"] = e.what();
      failed[i] = 1;
    }
    lines[i] = std::move(line);
  });
  write_jsonl(a.out, lines);
  write_manifest(a.out, "perturb",
                 json{{"samples", a.samples}, {"mode", a.mode}, {"seed", a.seed}, {"count", a.count}}, &gw,
                 started);
  const int n_failed = std::accumulate(failed.begin(), failed.end(), 0);
  std::cerr << a.mode << ": " << samples.size() - n_failed << "/" << samples.size() << " ok\n";
  return n_failed ? kExitPartial : kExitOk;
}

// ---- mix -------------------------------------------------------------------

struct MixArgs {
  std::string samples;
  std::string pool;
  std::string ratios = "0,0.25,0.5,0.75";
  std::uint64_t seed = 0;
  std::string condition = "CoE";
  std::string out;
  int threads = 8;
};

// Pool lines are snippet objects. A line with a "sample_id" member only feeds
// that sample; the rest are shared by all samples.
int cmd_mix(const MixArgs& a) {
  const std::string started = utc_now();
  const auto samples = load_samples(a.samples);
  const auto ratios = parse_ratio_list(a.ratios);
  const Condition cond = condition_from_string(a.condition);
  std::vector<KnowledgeSnippet> shared;
  std::map<std::string, std::vector<KnowledgeSnippet>> own;
  for (const auto& j : read_jsonl(a.pool)) {
    auto snip = snippet_from_json(j);
    if (j.contains("sample_id")) {
      own[j.at("sample_id").get<std::string>()].push_back(std::move(snip));
    } else {
      shared.push_back(std::move(snip));
    }
  }

  std::vector<json> lines(samples.size() * ratios.size());
  std::vector<int> failed(lines.size(), 0);
  parallel::for_each_index(lines.size(), a.threads, [&](std::size_t cell) {
    const QASample& s = samples[cell / ratios.size()];
    const Ratio ratio = ratios[cell % ratios.size()];
    const std::string id = sample_id(s);
    json line{{"sample_id", id}, {"condition", to_string(cond)}, {"ratio", ratio}};
    try {
      const std::string* body = &s.coe;
      if (cond == Condition::senp) body = s.senp ? &*s.senp : nullptr;
      if (cond == Condition::wordp) body = s.wordp ? &*s.wordp : nullptr;
      if (!body) throw PreconditionError("sample has no " + std::string(to_string(cond)) + " text");
      std::vector<KnowledgeSnippet> pool = shared;
      if (auto it = own.find(id); it != own.end()) pool.insert(pool.end(), it->second.begin(), it->second.end());
      const auto seed = derive_seed(a.seed, std::string(stages::kMix) + "/" + format_ratio(ratio), id);
      line["context"] = mix_to_ratio(sentence_snippets(*body, cond), pool, ratio, seed);
    } catch (const Error& e) {
      line["error"] = e.what();
      failed[cell] = 1;
    }
    lines[cell] = std::move(line);
  });
  write_jsonl(a.out, lines);
  write_manifest(a.out, "mix",
                 json{{"samples", a.samples}, {"pool", a.pool}, {"ratios", ratios}, {"seed", a.seed},
                      {"condition", a.condition}},
                 nullptr, started);
  const int n_failed = std::accumulate(failed.begin(), failed.end(), 0);
  return n_failed ? kExitPartial : kExitOk;
}

// ---- eval / rag --------------------------------------------------------------

int run_and_report(const RunPlan& plan, const std::string& out) {
  RunOptions options;
  options.out_dir = out;
  options.log = &std::cerr;
  RunOutcome outcome = run_plan(plan, options);
  for (const auto& [name, report] : outcome.reports) {
    std::cout << "## " << name << "\n\n" << render_markdown(report) << "\n";
  }
  std::cerr << "manifest: " << outcome.manifest_path << " (" << outcome.manifest_digest.substr(0, 16)
            << ")\n";
  return outcome.exit_code;
}

struct EvalArgs {
  std::string plan;
  std::string out;
  int threads = 0;
  std::string cache_dir;
  std::vector<std::string> experiments;
};

int cmd_eval(const EvalArgs& a) {
  RunPlan plan = load_plan(a.plan);
  if (a.threads > 0) plan.parallelism = a.threads;
  if (!a.cache_dir.empty()) plan.cache_dir = a.cache_dir;
  if (!a.experiments.empty()) {
    for (const auto& e : a.experiments) {
      if (std::find(known_experiments().begin(), known_experiments().end(), e) == known_experiments().end()) {
        throw ConfigError("experiments", "unknown experiment \"" + e + "\"");
      }
    }
    plan.experiments = a.experiments;
  }
  return run_and_report(plan, a.out);
}

struct RagArgs {
  std::string samples;
  std::string arms = "naive,scopecoe";
  std::size_t k = 5;
  std::size_t retrieve_limit = 10;
  std::string fixtures;
  std::string search = "fixture";
  std::string scorer = "overlap";
  std::string answer_model = "mock-reader";
  int repeats = 3;
  std::uint64_t seed = 0;
  std::string out;
  BackendFlags flags;
};

int cmd_rag(const RagArgs& a) {
  RunPlan plan;
  plan.samples = a.samples;
  plan.backend = a.flags.backend;
  plan.mock_rules = a.flags.mock_rules;
  plan.cache_dir = a.flags.cache_dir;
  plan.judge_model = a.flags.model;
  plan.answer_models = {a.answer_model};
  plan.search = a.search;
  plan.rag_fixtures = a.fixtures;
  plan.experiments = {"rag"};
  plan.arms = split_csv(a.arms);
  for (const auto& arm : plan.arms) {
    if (arm != "naive" && arm != "scopecoe") throw ConfigError("arms", "unknown arm \"" + arm + "\"");
  }
  if (plan.arms.empty()) throw ConfigError("arms", "no arms given");
  plan.k = a.k;
  plan.retrieve_limit = a.retrieve_limit;
  plan.scorer = a.scorer;
  plan.repeats = a.repeats;
  plan.seed = a.seed;
  plan.parallelism = a.flags.threads;
  return run_and_report(plan, a.out);
}

// ---- report ----------------------------------------------------------------

// Rebuilds an experiment report from records.jsonl. The layout (models,
// conditions, ratios, unit) comes from the summary.json next to it when
// present, otherwise from the records in first-seen order.
int cmd_report(const std::string& dir, const std::string& out, const std::string& unit_flag) {
  const fs::path base(dir);
  const auto lines = read_jsonl((base / "records.jsonl").string());
  if (lines.empty()) throw ConfigError("results", "no records in " + dir);
  const auto reports = reports_from_lines(lines);
  const std::string experiment = lines.front().value("experiment", base.filename().string());

  std::vector<std::string> models;
  std::vector<Condition> conditions;
  std::vector<Ratio> ratios;
  MwuUnit unit = MwuUnit::sample;
  const fs::path summary_path = base / "summary.json";
  if (fs::exists(summary_path)) {
    ExperimentReport prior = json::parse(read_file(summary_path.string())).get<ExperimentReport>();
    models = prior.models;
    conditions = prior.conditions;
    ratios = prior.ratios;
    unit = prior.mwu_unit;
  } else {
    auto add = [](auto& v, const auto& x) {
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    for (const auto& r : reports) {
      add(models, r.model);
      add(conditions, r.condition);
      add(ratios, r.ratio);
    }
  }
  if (!unit_flag.empty()) unit = mwu_unit_from_string(unit_flag);
  const ExperimentReport report = build_report(experiment, reports.front().metric, reports, models, conditions,
                                               ratios, significance_pairs(experiment, conditions), unit);
  const std::string md = render_markdown(report);
  if (out.empty()) {
    std::cout << md;
  } else {
    write_file_atomic(out, md);
  }
  return report.missing_cells.empty() ? kExitOk : kExitPartial;
}

// ---- validate --------------------------------------------------------------

int cmd_validate(const std::string& samples_path, const std::string& plan_path) {
  if (samples_path.empty() && plan_path.empty()) throw ConfigError("validate", "give --samples and/or --plan");
  int rc = kExitOk;
  if (!plan_path.empty()) {
    const RunPlan plan = load_plan(plan_path);
    std::cout << "plan ok: " << plan.experiments.size() << " experiments, " << plan.ratios.size()
              << " ratios, backend " << plan.backend << "\n";
  }
  if (!samples_path.empty()) {
    const auto samples = load_samples(samples_path);
    std::size_t bad = 0;
    for (const auto& s : samples) {
      for (const auto& v : validate_sample(s)) {
        std::cout << sample_id(s) << ": " << v.describe() << "\n";
        ++bad;
      }
    }
    std::cout << samples.size() << " samples, " << bad << " violations\n";
    if (bad) rc = kExitPartial;
  }
  return rc;
}

// ---- import ----------------------------------------------------------------

struct ImportArgs {
  std::string in;
  std::string format;
  std::size_t limit = 0;
  std::string out;
  bool extract = false;
  BackendFlags flags;
};

int cmd_import(const ImportArgs& a) {
  const std::string started = utc_now();
  const Source source = a.format == "hotpotqa" ? Source::hotpotqa : Source::wikimultihop2;
  ImportStats stats;
  auto samples = load_multihop(json::parse(read_file(a.in)), source, a.limit, &stats);
  int rc = kExitOk;
  std::optional<Gateway> gw;
  if (a.extract) {
    gw.emplace(a.flags.gateway({}));
    std::vector<int> failed(samples.size(), 0);
    parallel::for_each_index(samples.size(), a.flags.threads, [&](std::size_t i) {
      try {
        samples[i].features = extract_question_features(*gw, samples[i].question);
      } catch (const Error&) {
        failed[i] = 1;
      }
    });
    std::vector<QASample> kept;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (failed[i]) {
        std::cerr << "extraction failed for " << sample_id(samples[i]) << "\n";
        rc = kExitPartial;
      } else {
        kept.push_back(std::move(samples[i]));
      }
    }
    samples = std::move(kept);
  }
  save_samples(a.out, samples);
  write_manifest(a.out, "import",
                 json{{"in", a.in},
                      {"format", a.format},
                      {"limit", a.limit},
                      {"records", stats.records},
                      {"missing_facts", stats.missing_facts},
                      {"skipped", stats.skipped},
                      {"written", samples.size()}},
                 gw ? &*gw : nullptr, started);
  std::cerr << "imported " << samples.size() << " samples (" << stats.skipped << " skipped, "
            << stats.missing_facts << " missing facts)\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain-of-Evidence discrimination, ScopeCoE retrieval and the evaluation harness"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "Extract intent, keywords and relations of questions");
  extract->add_option("--in", extract_args.in, "Questions, one per line");
  extract->add_option("--samples", extract_args.samples, "Samples JSONL (questions and mock rules)");
  extract->add_option("--out", extract_args.out, "Features JSONL")->required();
  extract_args.flags.add_to(extract);

  DiscriminateArgs disc_args;
  auto* disc = app.add_subcommand("discriminate", "Judge knowledge snippets against question features");
  disc->add_option("--features", disc_args.features, "One feature record (JSONL)")->required()->check(CLI::ExistingFile);
  disc->add_option("--knowledge", disc_args.knowledge, "Snippets JSONL")->required()->check(CLI::ExistingFile);
  disc->add_option("--out", disc_args.out, "Judgments JSONL")->required();
  disc->add_flag("--whole", disc_args.whole, "Judge the snippets joined as one knowledge unit");
  disc_args.flags.add_to(disc);

  std::string cover_in, cover_out;
  auto* cover = app.add_subcommand("cover", "Minimal coverage search over judgments");
  cover->add_option("--judgments", cover_in, "Judgments JSONL")->required()->check(CLI::ExistingFile);
  cover->add_option("--out", cover_out, "Selection JSONL")->required();

  PerturbArgs perturb_args;
  auto* perturb = app.add_subcommand("perturb", "SenP / WordP perturbation, incorrect answers, misinformation");
  perturb->add_option("--samples", perturb_args.samples, "Samples JSONL")->required()->check(CLI::ExistingFile);
  perturb->add_option("--mode", perturb_args.mode, "senp|wordp|answers|misinfo")
      ->required()
      ->check(CLI::IsMember({"senp", "wordp", "answers", "misinfo"}));
  perturb->add_option("--seed", perturb_args.seed, "Root seed")->capture_default_str();
  perturb->add_option("--count", perturb_args.count, "Misinformation snippets per sample")->capture_default_str();
  perturb->add_option("--out", perturb_args.out, "Output JSONL")->required();
  perturb_args.flags.add_to(perturb);

  MixArgs mix_args;
  auto* mix = app.add_subcommand("mix", "Interleave noise into sample knowledge at target ratios");
  mix->add_option("--samples", mix_args.samples, "Samples JSONL")->required()->check(CLI::ExistingFile);
  mix->add_option("--pool", mix_args.pool, "Noise snippets JSONL")->required()->check(CLI::ExistingFile);
  mix->add_option("--ratios", mix_args.ratios, "Comma-separated targets")->capture_default_str();
  mix->add_option("--seed", mix_args.seed, "Root seed")->capture_default_str();
  mix->add_option("--condition", mix_args.condition, "CoE, SenP or WordP text as the core")->capture_default_str();
  mix->add_option("--out", mix_args.out, "Contexts JSONL")->required();
  mix->add_option("--threads", mix_args.threads, "Parallelism budget")->capture_default_str();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Run the experiments of a plan");
  eval->add_option("--plan", eval_args.plan, "Plan file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_args.out, "Run directory")->required();
  eval->add_option("--threads", eval_args.threads, "Override the plan's parallelism");
  eval->add_option("--cache-dir", eval_args.cache_dir, "Override the cache directory");
  eval->add_option("--experiments", eval_args.experiments, "Run only these experiments")->delimiter(',');

  RagArgs rag_args;
  auto* rag = app.add_subcommand("rag", "Naive RAG versus ScopeCoE on the same corpora");
  rag->add_option("--samples", rag_args.samples, "Samples JSONL")->required()->check(CLI::ExistingFile);
  rag->add_option("--arms", rag_args.arms, "naive,scopecoe")->capture_default_str();
  rag->add_option("--k", rag_args.k, "Naive RAG top-k")->capture_default_str();
  rag->add_option("--retrieve-limit", rag_args.retrieve_limit, "Search results per question")->capture_default_str();
  rag->add_option("--fixtures", rag_args.fixtures, "Search fixtures directory");
  rag->add_option("--search", rag_args.search, "fixture or google")->capture_default_str();
  rag->add_option("--scorer", rag_args.scorer, "overlap or rerank")->capture_default_str();
  rag->add_option("--answer-model", rag_args.answer_model, "Answering model")->capture_default_str();
  rag->add_option("--repeats", rag_args.repeats, "Repeats per arm")->capture_default_str();
  rag->add_option("--seed", rag_args.seed, "Root seed")->capture_default_str();
  rag->add_option("--out", rag_args.out, "Run directory")->required();
  rag_args.flags.add_to(rag);

  std::string report_dir, report_out, report_unit;
  auto* report = app.add_subcommand("report", "Rebuild a report from an experiment's records");
  report->add_option("--results", report_dir, "results/<experiment> directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Markdown file (stdout when unset)");
  report->add_option("--mwu-unit", report_unit, "sample, sample-mean or repeat")
      ->check(CLI::IsMember({"sample", "sample-mean", "repeat"}));

  std::string validate_samples, validate_plan;
  auto* validate = app.add_subcommand("validate", "Check samples and/or a plan");
  validate->add_option("--samples", validate_samples, "Samples JSONL")->check(CLI::ExistingFile);
  validate->add_option("--plan", validate_plan, "Plan file")->check(CLI::ExistingFile);

  ImportArgs import_args;
  auto* import = app.add_subcommand("import", "Convert HotpotQA / 2WikiMultihopQA records to samples");
  import->add_option("--in", import_args.in, "Dataset JSON array")->required()->check(CLI::ExistingFile);
  import->add_option("--format", import_args.format, "hotpotqa or 2wiki")
      ->required()
      ->check(CLI::IsMember({"hotpotqa", "2wiki"}));
  import->add_option("--limit", import_args.limit, "Keep at most this many records (0: all)");
  import->add_option("--out", import_args.out, "Samples JSONL")->required();
  import->add_flag("--extract", import_args.extract, "Fill in features with the extraction prompts");
  import_args.flags.add_to(import);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitHard;
  }

  try {
    if (*extract) return cmd_extract(extract_args);
    if (*disc) return cmd_discriminate(disc_args);
    if (*cover) return cmd_cover(cover_in, cover_out);
    if (*perturb) return cmd_perturb(perturb_args);
    if (*mix) return cmd_mix(mix_args);
    if (*eval) return cmd_eval(eval_args);
    if (*rag) return cmd_rag(rag_args);
    if (*report) return cmd_report(report_dir, report_out, report_unit);
    if (*validate) return cmd_validate(validate_samples, validate_plan);
    if (*import) return cmd_import(import_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitHard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHard;
  }
  return kExitHard;
}
