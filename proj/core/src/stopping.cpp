#include "indtime/stopping.hpp"

#include <nlohmann/json.hpp>

namespace indtime {

TimeValue eval_stopping_time(const StoppingSpec& spec, const SampledView& path) {
  if (spec.kind == StoppingSpec::Kind::deterministic) return TimeValue::finite(spec.t);
  for (std::size_t i = 0; i <= path.last(); ++i) {
    const double v = path.at(i);
    if (spec.above ? v >= spec.level : v <= spec.level) return TimeValue::finite(path.time(i));
  }
  return TimeValue::infinite();
}

TimeValue eval_stopping_time(const StoppingSpec& spec, const EventPath& path) {
  if (spec.kind == StoppingSpec::Kind::deterministic) return TimeValue::finite(spec.t);
  const double d = path.drift();
  auto hit = [&](double v) { return spec.above ? v >= spec.level : v <= spec.level; };
  double begin = 0.0;
  for (std::size_t k = 0; k <= path.jump_count(); ++k) {
    const double end = k < path.jump_count() ? path.jump_times()[k] : path.horizon();
    const double v = path.value(begin);
    if (hit(v)) return TimeValue::finite(begin);
    if ((spec.above && d > 0.0) || (!spec.above && d < 0.0)) {
      const double cross = begin + (spec.level - v) / d;
      if (cross < end || (k == path.jump_count() && cross <= end)) return TimeValue::finite(cross);
    }
    begin = end;
  }
  return TimeValue::infinite();
}

void to_json(nlohmann::json& j, const StoppingSpec& s) {
  if (s.kind == StoppingSpec::Kind::deterministic)
    j = {{"kind", "deterministic"}, {"time", s.t}};
  else
    j = {{"kind", "first-passage"}, {"level", s.level}, {"direction", s.above ? "up" : "down"}};
}

}  // namespace indtime
