#pragma once

#include "indtime/paths.hpp"
#include "indtime/predicates.hpp"

namespace indtime {

/// Stopping times evaluated by first entrance.
struct StoppingSpec {
  enum class Kind { deterministic, first_passage };

  Kind kind = Kind::deterministic;
  double t = 0.0;
  double level = 0.0;
  bool above = false;  ///< first time X >= level, otherwise first time X <= level

  static StoppingSpec deterministic(double t) { return {Kind::deterministic, t, 0.0, false}; }
  static StoppingSpec first_passage(double level, bool above) {
    return {Kind::first_passage, 0.0, level, above};
  }
};

/// Infinite when the level is not reached on the observed horizon. On sampled
/// paths the first grid time is returned; on event paths the exact time.
TimeValue eval_stopping_time(const StoppingSpec& spec, const SampledView& path);
TimeValue eval_stopping_time(const StoppingSpec& spec, const EventPath& path);

void to_json(nlohmann::json& j, const StoppingSpec& s);

}  // namespace indtime
