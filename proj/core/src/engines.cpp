#include "indtime/engines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "indtime/parallel.hpp"

namespace indtime {

// StepLaw ----------------------------------------------------------------------

StepLaw StepLaw::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli p outside [0, 1]");
  return StepLaw(Kind::bernoulli, {p});
}

StepLaw StepLaw::finite_support(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("finite-support law needs matching values and probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
  StepLaw law(Kind::finite_support, std::move(probs), std::move(values));
  law.cdf_.resize(law.params_.size());
  std::partial_sum(law.params_.begin(), law.params_.end(), law.cdf_.begin());
  return law;
}

StepLaw StepLaw::gaussian(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian sigma must be nonnegative");
  return StepLaw(Kind::gaussian, {mu, sigma});
}

StepLaw StepLaw::constant(double c) { return StepLaw(Kind::constant, {c}); }

StepLaw StepLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return StepLaw(Kind::exponential, {rate});
}

double StepLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::bernoulli:
      return rng.uniform() < params_[0] ? 1.0 : 0.0;
    case Kind::finite_support: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), values_.size() - 1);
      return values_[i];
    }
    case Kind::gaussian:
      return params_[0] + params_[1] * rng.normal();
    case Kind::constant:
      return params_[0];
    case Kind::exponential:
      return rng.exponential(params_[0]);
  }
  return 0.0;
}

double StepLaw::mean() const {
  switch (kind_) {
    case Kind::bernoulli:
      return params_[0];
    case Kind::finite_support:
      return std::inner_product(values_.begin(), values_.end(), params_.begin(), 0.0);
    case Kind::gaussian:
    case Kind::constant:
      return params_[0];
    case Kind::exponential:
      return 1.0 / params_[0];
  }
  return 0.0;
}

bool StepLaw::is_finite() const noexcept {
  return kind_ == Kind::bernoulli || kind_ == Kind::finite_support || kind_ == Kind::constant;
}

std::vector<double> StepLaw::support() const {
  switch (kind_) {
    case Kind::bernoulli:
      return {0.0, 1.0};
    case Kind::finite_support:
      return values_;
    case Kind::constant:
      return {params_[0]};
    default:
      throw std::logic_error("law has no finite support");
  }
}

std::vector<double> StepLaw::probabilities() const {
  switch (kind_) {
    case Kind::bernoulli:
      return {1.0 - params_[0], params_[0]};
    case Kind::finite_support:
      return params_;
    case Kind::constant:
      return {1.0};
    default:
      throw std::logic_error("law has no finite support");
  }
}

bool StepLaw::strictly_positive() const {
  switch (kind_) {
    case Kind::exponential:
      return true;
    case Kind::gaussian:
      return false;
    default: {
      const auto s = support();
      const auto p = probabilities();
      for (std::size_t i = 0; i < s.size(); ++i)
        if (p[i] > 0.0 && !(s[i] > 0.0)) return false;
      return true;
    }
  }
}

std::string StepLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::bernoulli:
      os << "bernoulli(" << params_[0] << ")";
      break;
    case Kind::finite_support:
      os << "finite-support(";
      for (std::size_t i = 0; i < values_.size(); ++i)
        os << (i ? ", " : "") << values_[i] << ":" << params_[i];
      os << ")";
      break;
    case Kind::gaussian:
      os << "gaussian(" << params_[0] << ", " << params_[1] << ")";
      break;
    case Kind::constant:
      os << "constant(" << params_[0] << ")";
      break;
    case Kind::exponential:
      os << "exponential(" << params_[0] << ")";
      break;
  }
  return os.str();
}

// LevySpec ---------------------------------------------------------------------

LevySpec LevySpec::bm_drift(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("bm-drift needs sigma > 0");
  LevySpec s;
  s.kind = Kind::bm_drift;
  s.mu = mu;
  s.sigma = sigma;
  return s;
}

LevySpec LevySpec::compound_poisson(double rate, StepLaw jump_law) {
  if (!(rate > 0.0)) throw std::invalid_argument("compound Poisson needs rate > 0");
  LevySpec s;
  s.kind = Kind::compound_poisson;
  s.rate = rate;
  s.jump_law = std::move(jump_law);
  return s;
}

LevySpec LevySpec::drift_minus_cp(double drift, double rate, StepLaw jump_law) {
  if (!(rate > 0.0)) throw std::invalid_argument("compound Poisson needs rate > 0");
  if (!jump_law.strictly_positive())
    throw std::invalid_argument("drift-minus-cp needs jumps supported on (0, inf)");
  LevySpec s;
  s.kind = Kind::drift_minus_cp;
  s.drift = drift;
  s.rate = rate;
  s.jump_law = std::move(jump_law);
  return s;
}

double LevySpec::mean_drift() const {
  switch (kind) {
    case Kind::bm_drift:
      return mu;
    case Kind::compound_poisson:
      return rate * jump_law.mean();
    case Kind::drift_minus_cp:
      return drift - rate * jump_law.mean();
  }
  return 0.0;
}

double EngineSpec::mean_drift() const {
  switch (kind) {
    case Kind::iid:
    case Kind::random_walk:
      return law.mean();
    case Kind::levy:
      return levy_spec.mean_drift();
  }
  return 0.0;
}

// Samplers ---------------------------------------------------------------------

SequencePath sample_iid(const StepLaw& law, std::size_t horizon, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  std::vector<double> y(horizon);
  for (double& v : y) v = law.sample(rng);
  return SequencePath::values(std::move(y));
}

SequencePath sample_random_walk(const StepLaw& law, std::size_t horizon, Rng& rng) {
  return sample_iid(law, horizon, rng).cumulative();
}

GridPath sample_bm_drift(double mu, double sigma, double step, double horizon, Rng& rng) {
  if (!(step > 0.0) || !(horizon > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("bm-drift needs step > 0, horizon > 0, sigma > 0");
  const double k = std::round(horizon / step);
  if (std::abs(horizon / step - k) > 1e-7) throw std::invalid_argument("horizon must be a multiple of step");
  const auto n = static_cast<std::size_t>(k);
  std::vector<double> x(n + 1, 0.0);
  const double m = mu * step;
  const double s = sigma * std::sqrt(step);
  for (std::size_t i = 1; i <= n; ++i) x[i] = x[i - 1] + m + s * rng.normal();
  return GridPath(step, std::move(x));
}

namespace {

EventPath sample_poisson_events(double drift, double rate, const StepLaw& jump_law, double sign,
                                double horizon, Rng& rng) {
  if (!(rate > 0.0) || !(horizon >= 0.0)) throw std::invalid_argument("needs rate > 0 and horizon >= 0");
  std::vector<double> times;
  std::vector<double> sizes;
  double t = rng.exponential(rate);
  while (t <= horizon) {
    times.push_back(t);
    sizes.push_back(sign * jump_law.sample(rng));
    t += rng.exponential(rate);
  }
  return EventPath(drift, std::move(times), std::move(sizes), horizon);
}

}  // namespace

EventPath sample_compound_poisson(double rate, const StepLaw& jump_law, double horizon, Rng& rng) {
  return sample_poisson_events(0.0, rate, jump_law, 1.0, horizon, rng);
}

EventPath sample_drift_minus_cp(double drift, double rate, const StepLaw& jump_law, double horizon,
                                Rng& rng) {
  if (!jump_law.strictly_positive())
    throw std::invalid_argument("drift-minus-cp needs jumps supported on (0, inf)");
  return sample_poisson_events(drift, rate, jump_law, -1.0, horizon, rng);
}

Path sample_path(const EngineSpec& spec, const SampleBudget& budget, Rng& rng) {
  switch (spec.kind) {
    case EngineSpec::Kind::iid:
    case EngineSpec::Kind::random_walk: {
      const double k = std::round(budget.horizon);
      if (k < 1 || std::abs(k - budget.horizon) > 1e-9)
        throw std::invalid_argument("discrete horizon must be a positive integer");
      return sample_random_walk(spec.law, static_cast<std::size_t>(k), rng);
    }
    case EngineSpec::Kind::levy: {
      const auto& l = spec.levy_spec;
      switch (l.kind) {
        case LevySpec::Kind::bm_drift:
          return sample_bm_drift(l.mu, l.sigma, budget.step, budget.horizon, rng);
        case LevySpec::Kind::compound_poisson:
          return sample_compound_poisson(l.rate, l.jump_law, budget.horizon, rng);
        case LevySpec::Kind::drift_minus_cp:
          return sample_drift_minus_cp(l.drift, l.rate, l.jump_law, budget.horizon, rng);
      }
    }
  }
  throw std::logic_error("unknown engine");
}

std::vector<Path> sample_batch(const EngineSpec& spec, const SampleBudget& budget, std::size_t count,
                               std::uint64_t master_seed, std::uint64_t first, unsigned jobs) {
  std::vector<Path> out(count);
  parallel_chunks(count, jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(SeedStream::of(master_seed, seed_domain::paths, first + i));
      out[i] = sample_path(spec, budget, rng);
    }
  });
  return out;
}

}  // namespace indtime
