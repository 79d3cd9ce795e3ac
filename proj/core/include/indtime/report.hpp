#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace indtime {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& text);

/// Outcome of one exact or statistical check.
struct TestReport {
  std::string kind;       ///< "exact" or "monte-carlo"
  std::string check;      ///< independence, conditional, law, factorization, if-identity, ...
  std::string statistic;  ///< max-abs-discrepancy, chi-square, distance-correlation, ks, ...
  double value = 0.0;     ///< observed statistic or discrepancy
  std::optional<double> p_value;
  std::size_t samples = 0;
  double discard_fraction = 0.0;
  std::vector<std::uint64_t> seeds;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
  nlohmann::json details = nlohmann::json::object();

  [[nodiscard]] bool passed() const noexcept { return verdict == Verdict::pass; }
};

void to_json(nlohmann::json& j, const TestReport& r);

/// One summary row: name,kind,check,statistic,value,verdict.
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const std::string& scenario, const TestReport& r);

/// Fixed-precision rendering used in reports so output is byte-stable.
std::string format_number(double x);

}  // namespace indtime
