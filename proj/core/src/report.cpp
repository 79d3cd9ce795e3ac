#include "indtime/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace indtime {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Verdict parse_verdict(const std::string& text) {
  if (text == "pass") return Verdict::pass;
  if (text == "fail") return Verdict::fail;
  if (text == "inconclusive") return Verdict::inconclusive;
  throw std::invalid_argument("unknown verdict '" + text + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"kind", r.kind},
                     {"check", r.check},
                     {"statistic", r.statistic},
                     {"value", r.value},
                     {"samples", r.samples},
                     {"discard_fraction", r.discard_fraction},
                     {"seeds", r.seeds},
                     {"verdict", to_string(r.verdict)}};
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.details.empty()) j["details"] = r.details;
}

void write_summary_header(std::ostream& out) { out << "name,kind,check,statistic,value,verdict\n"; }

void write_summary_row(std::ostream& out, const std::string& scenario, const TestReport& r) {
  const double shown = r.p_value ? *r.p_value : r.value;
  out << scenario << ',' << r.kind << ',' << r.check << ',' << r.statistic << ','
      << format_number(shown) << ',' << to_string(r.verdict) << '\n';
}

}  // namespace indtime
