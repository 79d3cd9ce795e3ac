#include "indtime/paths.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace indtime {

// SequencePath -----------------------------------------------------------------

SequencePath SequencePath::values(std::vector<double> y) {
  return SequencePath(SequenceRole::values, std::move(y));
}

SequencePath SequencePath::walk(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("walk needs X_0");
  return SequencePath(SequenceRole::walk, std::move(x));
}

SequencePath SequencePath::walk_from_steps(std::span<const double> steps) {
  std::vector<double> x(steps.size() + 1, 0.0);
  for (std::size_t i = 0; i < steps.size(); ++i) x[i + 1] = x[i] + steps[i];
  return SequencePath(SequenceRole::walk, std::move(x));
}

double SequencePath::at(std::size_t i) const {
  if (role_ == SequenceRole::values) {
    if (i < 1 || i > data_.size()) throw std::out_of_range("sequence index outside 1..L");
    return data_[i - 1];
  }
  if (i >= data_.size()) throw std::out_of_range("walk index outside 0..L");
  return data_[i];
}

SequencePath SequencePath::steps() const {
  if (role_ != SequenceRole::walk) throw std::invalid_argument("steps() needs a walk");
  std::vector<double> y(data_.size() - 1);
  for (std::size_t i = 1; i < data_.size(); ++i) y[i - 1] = data_[i] - data_[i - 1];
  return values(std::move(y));
}

SequencePath SequencePath::cumulative() const {
  if (role_ != SequenceRole::values) throw std::invalid_argument("cumulative() needs values");
  return walk_from_steps(data_);
}

// GridPath ---------------------------------------------------------------------

GridPath::GridPath(double step, std::vector<double> values) : step_(step), values_(std::move(values)) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (values_.empty()) throw std::invalid_argument("grid path needs at least one point");
}

std::size_t GridPath::index_of(double t) const {
  if (t < 0.0) throw std::out_of_range("negative time");
  const double k = std::round(t / step_);
  if (std::abs(t / step_ - k) > 1e-7) throw std::invalid_argument("time is off the grid");
  const auto idx = static_cast<std::size_t>(k);
  if (idx >= values_.size()) throw std::out_of_range("time exceeds the horizon");
  return idx;
}

// EventPath --------------------------------------------------------------------

EventPath::EventPath(double drift, std::vector<double> jump_times, std::vector<double> jump_sizes,
                     double horizon, double start)
    : start_(start),
      drift_(drift),
      jump_times_(std::move(jump_times)),
      jump_sizes_(std::move(jump_sizes)),
      horizon_(horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("negative horizon");
  if (jump_times_.size() != jump_sizes_.size())
    throw std::invalid_argument("jump times and sizes differ in length");
  for (std::size_t i = 0; i < jump_times_.size(); ++i) {
    if (!(jump_times_[i] > 0.0) || jump_times_[i] > horizon_)
      throw std::invalid_argument("jump time outside (0, horizon]");
    if (i > 0 && !(jump_times_[i] > jump_times_[i - 1]))
      throw std::invalid_argument("jump times must be strictly increasing");
  }
}

std::size_t EventPath::jumps_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(jump_times_.begin(), jump_times_.end(), t) - jump_times_.begin());
}

double EventPath::value(double t) const {
  double v = start_ + drift_ * t;
  const std::size_t n = jumps_until(t);
  for (std::size_t i = 0; i < n; ++i) v += jump_sizes_[i];
  return v;
}

double EventPath::left_limit(double t) const {
  double v = start_ + drift_ * t;
  const auto n = static_cast<std::size_t>(
      std::lower_bound(jump_times_.begin(), jump_times_.end(), t) - jump_times_.begin());
  for (std::size_t i = 0; i < n; ++i) v += jump_sizes_[i];
  return v;
}

EventPath EventPath::truncated(double t) const {
  if (t < 0.0 || t > horizon_) throw std::out_of_range("truncation time outside [0, horizon]");
  const std::size_t n = jumps_until(t);
  return EventPath(drift_, {jump_times_.begin(), jump_times_.begin() + static_cast<long>(n)},
                   {jump_sizes_.begin(), jump_sizes_.begin() + static_cast<long>(n)}, t, start_);
}

// SupremumProfile --------------------------------------------------------------

SupremumProfile::SupremumProfile(std::vector<Segment> segments, double horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
  if (segments_.empty() || segments_.front().begin != 0.0)
    throw std::invalid_argument("profile must start at time 0");
}

double SupremumProfile::value(double t) const {
  if (t < 0.0 || t > horizon_) throw std::out_of_range("time outside [0, horizon]");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const Segment& s) { return x < s.begin; });
  --it;
  return it->value + it->slope * (t - it->begin);
}

std::string to_string(const TimeValue& value) {
  switch (value.kind()) {
    case TimeValue::Kind::finite:
      return "finite(" + std::to_string(value.time()) + ")";
    case TimeValue::Kind::tail_assumed:
      return "tail-assumed(" + std::to_string(value.time()) + ")";
    case TimeValue::Kind::infinite:
      return "infinite";
    case TimeValue::Kind::undecided:
      return "undecided";
  }
  return "?";
}

// Shifts -----------------------------------------------------------------------

SequencePath strict_post(const SequencePath& seq, std::size_t n) {
  if (seq.role() != SequenceRole::values) throw std::invalid_argument("strict_post needs values");
  if (n > seq.horizon()) throw std::out_of_range("shift index beyond the horizon");
  const auto d = seq.data();
  return SequencePath::values({d.begin() + static_cast<long>(n), d.end()});
}

SequencePath delta_shift(const SequencePath& walk, std::size_t n) {
  if (walk.role() != SequenceRole::walk) throw std::invalid_argument("delta_shift needs a walk");
  if (n > walk.horizon()) throw std::out_of_range("shift index beyond the horizon");
  const auto d = walk.data();
  std::vector<double> x(d.begin() + static_cast<long>(n), d.end());
  const double base = x.front();
  for (double& v : x) v -= base;
  x.front() = 0.0;
  return SequencePath::walk(std::move(x));
}

SequencePath theta_shift(const SequencePath& walk, std::size_t n) {
  if (walk.role() != SequenceRole::walk) throw std::invalid_argument("theta_shift needs a walk");
  if (n > walk.horizon()) throw std::out_of_range("shift index beyond the horizon");
  const auto d = walk.data();
  return SequencePath::walk({d.begin() + static_cast<long>(n), d.end()});
}

GridPath delta_shift(const GridPath& path, double t) {
  const std::size_t k = path.index_of(t);
  const auto v = path.values();
  std::vector<double> x(v.begin() + static_cast<long>(k), v.end());
  const double base = x.front();
  for (double& e : x) e -= base;
  x.front() = 0.0;
  return GridPath(path.step(), std::move(x));
}

GridPath theta_shift(const GridPath& path, double t) {
  const std::size_t k = path.index_of(t);
  const auto v = path.values();
  return GridPath(path.step(), {v.begin() + static_cast<long>(k), v.end()});
}

namespace {

EventPath shifted(const EventPath& path, double t, double start) {
  if (t < 0.0 || t > path.horizon()) throw std::out_of_range("shift time outside [0, horizon]");
  const std::size_t first = path.jumps_until(t);
  std::vector<double> times;
  std::vector<double> sizes;
  for (std::size_t i = first; i < path.jump_count(); ++i) {
    times.push_back(path.jump_times()[i] - t);
    sizes.push_back(path.jump_sizes()[i]);
  }
  return EventPath(path.drift(), std::move(times), std::move(sizes), path.horizon() - t, start);
}

}  // namespace

EventPath delta_shift(const EventPath& path, double t) { return shifted(path, t, 0.0); }

EventPath theta_shift(const EventPath& path, double t) { return shifted(path, t, path.value(t)); }

SequencePath running_supremum(const SequencePath& walk) {
  if (walk.role() != SequenceRole::walk) throw std::invalid_argument("running_supremum needs a walk");
  std::vector<double> s(walk.data().begin(), walk.data().end());
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = std::max(s[i], s[i - 1]);
  return SequencePath::walk(std::move(s));
}

GridPath running_supremum(const GridPath& path) {
  std::vector<double> s(path.values().begin(), path.values().end());
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = std::max(s[i], s[i - 1]);
  return GridPath(path.step(), std::move(s));
}

SupremumProfile running_supremum(const EventPath& path) {
  std::vector<SupremumProfile::Segment> segs;
  auto push = [&segs](double begin, double value, double slope) {
    if (!segs.empty()) {
      auto& last = segs.back();
      if (last.begin == begin) {
        last = {begin, value, slope};
        return;
      }
      if (last.slope == 0.0 && slope == 0.0 && last.value == value) return;
    }
    segs.push_back({begin, value, slope});
  };

  const double d = path.drift();
  const auto times = path.jump_times();
  double sup = path.start();
  double seg_start = 0.0;
  double seg_value = path.start();
  for (std::size_t k = 0; k <= times.size(); ++k) {
    const double seg_end = k < times.size() ? times[k] : path.horizon();
    if (seg_value >= sup) {
      sup = seg_value;
      push(seg_start, sup, d > 0.0 ? d : 0.0);
      if (d > 0.0) sup = seg_value + d * (seg_end - seg_start);
    } else if (d > 0.0 && seg_value + d * (seg_end - seg_start) > sup) {
      const double cross = seg_start + (sup - seg_value) / d;
      push(seg_start, sup, 0.0);
      push(cross, sup, d);
      sup = seg_value + d * (seg_end - seg_start);
    } else {
      push(seg_start, sup, 0.0);
    }
    if (k < times.size()) {
      seg_start = times[k];
      seg_value = path.left_limit(seg_start) + path.jump_sizes()[k];
    }
  }
  return SupremumProfile(std::move(segs), path.horizon());
}

// Serialization ----------------------------------------------------------------

void write_csv(std::ostream& out, const SequencePath& path) {
  out << "time,value\n";
  const auto d = path.data();
  const std::size_t offset = path.role() == SequenceRole::values ? 1 : 0;
  for (std::size_t i = 0; i < d.size(); ++i) out << (i + offset) << ',' << d[i] << '\n';
}

void write_csv(std::ostream& out, const GridPath& path) {
  out << "time,value\n";
  for (std::size_t i = 0; i < path.size(); ++i) out << path.time(i) << ',' << path[i] << '\n';
}

void write_csv(std::ostream& out, const EventPath& path) {
  out << "time,value\n";
  out << 0.0 << ',' << path.start() << '\n';
  for (double t : path.jump_times()) {
    out << t << ',' << path.left_limit(t) << '\n';
    out << t << ',' << path.value(t) << '\n';
  }
  out << path.horizon() << ',' << path.value(path.horizon()) << '\n';
}

void to_json(nlohmann::json& j, const SequencePath& path) {
  j = {{"kind", path.role() == SequenceRole::values ? "sequence" : "walk"},
       {"horizon", path.horizon()},
       {"values", std::vector<double>(path.data().begin(), path.data().end())}};
}

void to_json(nlohmann::json& j, const GridPath& path) {
  j = {{"kind", "grid"},
       {"step", path.step()},
       {"values", std::vector<double>(path.values().begin(), path.values().end())}};
}

void to_json(nlohmann::json& j, const EventPath& path) {
  j = {{"kind", "event"},
       {"start", path.start()},
       {"drift", path.drift()},
       {"horizon", path.horizon()},
       {"jump_times", std::vector<double>(path.jump_times().begin(), path.jump_times().end())},
       {"jump_sizes", std::vector<double>(path.jump_sizes().begin(), path.jump_sizes().end())}};
}

void to_json(nlohmann::json& j, const TimeValue& value) {
  switch (value.kind()) {
    case TimeValue::Kind::finite:
      j = {{"kind", "finite"}, {"time", value.time()}};
      break;
    case TimeValue::Kind::tail_assumed:
      j = {{"kind", "tail-assumed"}, {"time", value.time()}};
      break;
    case TimeValue::Kind::infinite:
      j = {{"kind", "infinite"}};
      break;
    case TimeValue::Kind::undecided:
      j = {{"kind", "undecided"}};
      break;
  }
}

}  // namespace indtime
