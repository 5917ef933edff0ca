#pragma once

// Curve parsing, the analysis envelope, serialization and batch processing.

#include "symcube/errors.hpp"
#include "symcube/sym3.hpp"

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symcube {

/// Malformed curve text. `offset` is the byte position of the problem.
class ParseError : public InputError {
public:
  ParseError(std::size_t offset, const std::string &message)
      : InputError("at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

struct CurveSpec {
  Curve curve;
  std::string label;
};

/// "[a1,a2,a3,a4,a6]" with optional whitespace; any text after the closing
/// bracket is taken as the label.
CurveSpec parse_curve(std::string_view text);

/// "label,a1,a2,a3,a4,a6"
CurveSpec parse_csv_row(std::string_view text);

enum class Status {
  Ok,
  RefusedUnsupported2,
  RefusedSingular,
  RefusedNonminimal,
  InvalidInput,
  Error,
};

std::string to_string(Status s);
inline constexpr Status kAllStatuses[] = {Status::Ok,           Status::RefusedUnsupported2,
                                          Status::RefusedSingular, Status::RefusedNonminimal,
                                          Status::InvalidInput, Status::Error};

enum class MinimalityMode { Verify, Minimize, AssumeMinimal };

std::string to_string(MinimalityMode m);

struct Options {
  MinimalityMode minimality = MinimalityMode::Verify;
  RootNumberProvider root_number; // empty: w(E/Q_3) stays symbolic
};

struct ReportEnvelope {
  std::string input;
  std::optional<CurveSpec> spec;
  Status status = Status::InvalidInput;
  std::string message;

  MinimalityMode minimality = MinimalityMode::Verify;
  std::optional<bool> input_minimal; // unknown under AssumeMinimal
  std::vector<Integer> nonminimal_primes;
  Transformation applied;
  std::optional<Curve> model; // the model that was analyzed
  std::optional<Invariants> invariants;
  std::optional<GlobalReport> report;
};

/// Primes at which `curve` is not minimal.
std::vector<Integer> nonminimal_primes(const Curve &curve);

ReportEnvelope analyze(const CurveSpec &spec, const Options &options);

/// Parses and analyzes one line; parse failures become InvalidInput.
ReportEnvelope analyze_text(std::string_view text, const Options &options);

nlohmann::json to_json(const ReportEnvelope &env);
std::string to_text(const ReportEnvelope &env);

/// Analyzes every non-blank, non-comment line of `in`, using up to `jobs`
/// worker threads. Output order matches input order. A first line starting
/// with "label," switches to CSV rows.
std::vector<ReportEnvelope> batch(std::istream &in, const Options &options, unsigned jobs);

std::map<Status, std::size_t> count_statuses(const std::vector<ReportEnvelope> &envs);
nlohmann::json summary_json(const std::vector<ReportEnvelope> &envs);
std::string summary_text(const std::vector<ReportEnvelope> &envs);

/// 0 for ok, 2 for refusals, 1 for invalid input and errors.
int exit_code(Status s);

} // namespace symcube
