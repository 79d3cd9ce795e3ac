#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace indtime {

/// How the entries of a SequencePath are indexed.
enum class SequenceRole {
  values,  ///< Y_1..Y_L: a sequence of values, first index 1
  walk,    ///< X_0..X_L: a walk, first index 0
};

/// A finite realization of a discrete-time sequence or walk.
///
/// Sampled walks start at 0; a walk produced by theta_shift starts at the
/// value the original walk had at the shift time.
class SequencePath {
 public:
  SequencePath() = default;

  static SequencePath values(std::vector<double> y);
  static SequencePath walk(std::vector<double> x);
  /// Walk X_0 = 0, X_n = Y_1 + ... + Y_n.
  static SequencePath walk_from_steps(std::span<const double> steps);

  [[nodiscard]] SequenceRole role() const noexcept { return role_; }
  /// L: number of values, or number of steps of a walk.
  [[nodiscard]] std::size_t horizon() const noexcept {
    return role_ == SequenceRole::values ? data_.size() : data_.size() - 1;
  }
  /// Role-indexed access: values use 1..L, walks use 0..L.
  [[nodiscard]] double at(std::size_t i) const;
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  /// Increments of a walk as a value sequence.
  [[nodiscard]] SequencePath steps() const;
  /// Partial sums of a value sequence as a walk from 0.
  [[nodiscard]] SequencePath cumulative() const;

  friend bool operator==(const SequencePath&, const SequencePath&) = default;

 private:
  SequencePath(SequenceRole role, std::vector<double> data) : role_(role), data_(std::move(data)) {}

  SequenceRole role_ = SequenceRole::values;
  std::vector<double> data_;
};

/// A continuous-time path sampled on the uniform grid 0, h, 2h, ...
class GridPath {
 public:
  GridPath() = default;
  GridPath(double step, std::vector<double> values);

  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double horizon() const noexcept {
    return step_ * static_cast<double>(values_.size() - 1);
  }
  [[nodiscard]] double time(std::size_t i) const noexcept { return step_ * static_cast<double>(i); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Grid index of t; throws std::invalid_argument when t is off the grid
  /// and std::out_of_range when t exceeds the horizon.
  [[nodiscard]] std::size_t index_of(double t) const;
  [[nodiscard]] double value_at(double t) const { return values_[index_of(t)]; }

  friend bool operator==(const GridPath&, const GridPath&) = default;

 private:
  double step_ = 1.0;
  std::vector<double> values_;
};

/// Exact representation of drift plus finitely many jumps on [0, horizon]:
/// X_t = start + drift * t + sum of jump sizes at jump times <= t.
class EventPath {
 public:
  EventPath() = default;
  EventPath(double drift, std::vector<double> jump_times, std::vector<double> jump_sizes,
            double horizon, double start = 0.0);

  [[nodiscard]] double start() const noexcept { return start_; }
  [[nodiscard]] double drift() const noexcept { return drift_; }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::span<const double> jump_times() const noexcept { return jump_times_; }
  [[nodiscard]] std::span<const double> jump_sizes() const noexcept { return jump_sizes_; }
  [[nodiscard]] std::size_t jump_count() const noexcept { return jump_times_.size(); }

  /// Right-continuous value at t in [0, horizon].
  [[nodiscard]] double value(double t) const;
  /// Left limit X_{t-}; equals value(0) at t = 0.
  [[nodiscard]] double left_limit(double t) const;
  /// Number of jumps in (0, t].
  [[nodiscard]] std::size_t jumps_until(double t) const;
  /// Path restricted to [0, t] (adapted view).
  [[nodiscard]] EventPath truncated(double t) const;

  friend bool operator==(const EventPath&, const EventPath&) = default;

 private:
  double start_ = 0.0;
  double drift_ = 0.0;
  std::vector<double> jump_times_;
  std::vector<double> jump_sizes_;
  double horizon_ = 0.0;
};

/// Running supremum of an EventPath: nondecreasing, piecewise linear with
/// slopes 0 or the path drift, right-continuous.
class SupremumProfile {
 public:
  struct Segment {
    double begin;
    double value;
    double slope;
  };

  SupremumProfile(std::vector<Segment> segments, double horizon);

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::span<const Segment> segments() const noexcept { return segments_; }

 private:
  std::vector<Segment> segments_;
  double horizon_;
};

/// Value of a random time: a time in [0, horizon], +infinity, a time decided
/// by assuming the unobserved tail follows the drift limit, or undecided.
class TimeValue {
 public:
  enum class Kind { finite, infinite, tail_assumed, undecided };

  TimeValue() noexcept : kind_(Kind::undecided), t_(0.0) {}

  static TimeValue finite(double t) noexcept { return {Kind::finite, t}; }
  static TimeValue infinite() noexcept { return {Kind::infinite, 0.0}; }
  static TimeValue tail_assumed(double t) noexcept { return {Kind::tail_assumed, t}; }
  static TimeValue undecided() noexcept { return {Kind::undecided, 0.0}; }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// True for finite and tail-assumed values.
  [[nodiscard]] bool has_time() const noexcept {
    return kind_ == Kind::finite || kind_ == Kind::tail_assumed;
  }
  [[nodiscard]] bool is_infinite() const noexcept { return kind_ == Kind::infinite; }
  [[nodiscard]] bool is_undecided() const noexcept { return kind_ == Kind::undecided; }
  /// The time; only meaningful when has_time().
  [[nodiscard]] double time() const noexcept { return t_; }

  friend bool operator==(const TimeValue&, const TimeValue&) = default;

 private:
  TimeValue(Kind kind, double t) noexcept : kind_(kind), t_(t) {}
  Kind kind_;
  double t_;
};

std::string to_string(const TimeValue& value);

/// Comparison tolerances used by path predicates.
inline constexpr double kEventTolerance = 0.0;
inline constexpr double kGridTolerance = 1e-12;

// Shift operators -------------------------------------------------------------

/// (Y_{n+1}, ..., Y_L) of a value sequence.
SequencePath strict_post(const SequencePath& seq, std::size_t n);

/// s -> X_{t+s} - X_t on the remaining horizon.
SequencePath delta_shift(const SequencePath& walk, std::size_t n);
GridPath delta_shift(const GridPath& path, double t);
EventPath delta_shift(const EventPath& path, double t);

/// s -> X_{t+s} on the remaining horizon.
SequencePath theta_shift(const SequencePath& walk, std::size_t n);
GridPath theta_shift(const GridPath& path, double t);
EventPath theta_shift(const EventPath& path, double t);

SequencePath running_supremum(const SequencePath& walk);
GridPath running_supremum(const GridPath& path);
SupremumProfile running_supremum(const EventPath& path);

// Serialization ---------------------------------------------------------------

/// CSV with header "time,value". Jump times of an EventPath produce two rows
/// (left limit, then value).
void write_csv(std::ostream& out, const SequencePath& path);
void write_csv(std::ostream& out, const GridPath& path);
void write_csv(std::ostream& out, const EventPath& path);

void to_json(nlohmann::json& j, const SequencePath& path);
void to_json(nlohmann::json& j, const GridPath& path);
void to_json(nlohmann::json& j, const EventPath& path);
void to_json(nlohmann::json& j, const TimeValue& value);

}  // namespace indtime
