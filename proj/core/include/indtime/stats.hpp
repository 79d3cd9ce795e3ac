#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indtime/report.hpp"

namespace indtime {

/// One sample per row; every row of a set has the same length.
using SampleRows = std::vector<std::vector<double>>;

enum class IndependenceStatistic { chi_square_binned, distance_correlation };
enum class LawStatistic { ks, chi_square };

std::string to_string(IndependenceStatistic s);
std::string to_string(LawStatistic s);
IndependenceStatistic parse_independence_statistic(const std::string& text);
LawStatistic parse_law_statistic(const std::string& text);

struct PermutationOptions {
  std::size_t n_permutations = 999;
  double alpha = 0.01;
  std::size_t min_samples = 200;
  std::size_t bins = 8;           ///< per dimension before merging
  std::size_t min_expected = 5;   ///< per cell of the contingency table
  std::size_t dcor_cap = 1000;    ///< distance correlation uses the first rows only
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

struct LawTestOptions {
  double alpha = 0.01;
  std::size_t min_samples = 200;
  std::size_t bins = 8;
  std::size_t min_expected = 5;
};

/// Permutation test of independence between the rows of z and h (paired by
/// index). p = (1 + #{T_perm >= T_obs}) / (n_permutations + 1); p = 1 when
/// either side is constant. Passes iff p > alpha.
TestReport mc_independence_test(const SampleRows& z, const SampleRows& h, IndependenceStatistic statistic,
                                const PermutationOptions& opts = {});

/// Two-sample test that a and b share a law. KS compares each coordinate and
/// combines the p-values with a Bonferroni correction; chi-square bins the
/// pooled sample jointly. Passes iff p > alpha.
TestReport mc_law_test(const SampleRows& a, const SampleRows& b, LawStatistic statistic,
                       const LawTestOptions& opts = {});

// Building blocks ----------------------------------------------------------------

/// Bin index of every value, cut points at the pooled empirical quantiles
/// k/bins; tied quantiles collapse into one bin.
std::vector<std::size_t> equiprobable_bins(std::span<const double> values, std::size_t bins);

/// Joint cell of each row when every column is binned into `bins` classes,
/// renumbered 0..cells-1 in increasing code order.
std::vector<std::size_t> joint_cells(const SampleRows& rows, std::size_t bins, std::size_t& cells);

/// Pearson statistic of the contingency table of (a[i], b[i]).
double pearson_statistic(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t na,
                         std::size_t nb);

/// Squared sample distance correlation of the rows of x and y.
double distance_correlation(const SampleRows& x, const SampleRows& y);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Kolmogorov tail Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);
/// Asymptotic p-value with the Stephens small-sample correction.
double ks_p_value(double d, std::size_t n, std::size_t m);

/// Survival function of the chi-square law.
double chi_square_sf(double x, double dof);

}  // namespace indtime
