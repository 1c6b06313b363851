#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coe {

// Root of every error the library raises. Callers that only need a message
// can catch this; the subclasses carry the failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class MissingBindingError : public Error {
 public:
  explicit MissingBindingError(std::string placeholder)
      : Error("missing binding for placeholder [" + placeholder + "]"),
        placeholder_(std::move(placeholder)) {}
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class BackendExhaustedError : public BackendError {
 public:
  BackendExhaustedError(int attempts, const std::string& last)
      : BackendError("backend exhausted after " + std::to_string(attempts) +
                     " attempts: " + last),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class MalformedResponseError : public Error {
 public:
  using Error::Error;
};

class UnparseableVerdictError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> violations)
      : Error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// A judge failure for one snippet; wraps the underlying message.
class JudgeError : public Error {
 public:
  JudgeError(std::string snippet_id, const std::string& cause)
      : Error("snippet " + snippet_id + ": " + cause),
        snippet_id_(std::move(snippet_id)) {}
  const std::string& snippet_id() const { return snippet_id_; }

 private:
  std::string snippet_id_;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class NoCandidatesError : public Error {
 public:
  using Error::Error;
};

class NeverBreaksError : public Error {
 public:
  using Error::Error;
};

class ExhaustedKeywordsError : public Error {
 public:
  using Error::Error;
};

class FormatMismatchError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class InsufficientNoiseError : public Error {
 public:
  using Error::Error;
};

class ToleranceUnreachableError : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  SearchError(std::string query, const std::string& cause)
      : Error("search failed for query \"" + query + "\": " + cause),
        query_(std::move(query)) {}
  const std::string& query() const { return query_; }

 private:
  std::string query_;
};

class SampleError : public Error {
 public:
  SampleError(std::string sample_id, const std::string& cause)
      : Error("sample " + sample_id + ": " + cause), sample_id_(std::move(sample_id)) {}
  const std::string& sample_id() const { return sample_id_; }

 private:
  std::string sample_id_;
};

// Plan/flag validation failure; field is a dotted path into the config.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace coe
