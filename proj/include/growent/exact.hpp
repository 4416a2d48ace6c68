#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "growent/alphabet.hpp"

// Population functionals of a Pmf, computed by direct summation over the
// support. All logarithms are natural (nats).
//
// The linearization variable T = -ln p(X) - H takes the value
// -(ln p_i + H) with probability p_i; its moments below are exact sums over
// that law.
namespace growent {

// Variances at or below this are treated as exactly zero.
inline constexpr double kDegenerateVariance = 1e-14;

struct PopulationSummary {
  double entropy = 0.0;  // H
  double sigma2 = 0.0;   // Var(ln p(X))
  double sigma = 0.0;
  std::size_t size = 0;

  bool degenerate() const { return sigma2 == 0.0; }
};

/// Moderate deviation scale b_n = n^rho plus the epsilon of the summability
/// condition and the thresholds r probed by the Monte Carlo run.
struct MdpSchedule {
  double rho = 0.1;
  double epsilon = 1.0;
  std::vector<double> thresholds{0.5};

  double scale(std::int64_t n) const;
};
void validate(const MdpSchedule& schedule);

double entropy(const Pmf& pmf);
PopulationSummary variance_log(const Pmf& pmf);

/// E|T|^{2+delta}, delta in [0, 1].
double abs_central_moment(const Pmf& pmf, double delta);

/// sum p|ln p|^{2+delta} + H^{2+delta}. The elementary inequality
/// (a+b)^q <= 2^{q-1}(a^q + b^q) gives
/// abs_central_moment <= 2^{1+delta} * remark_moment_bound.
double remark_moment_bound(const Pmf& pmf, double delta);

/// E exp(delta |T| / sigma).
double exp_moment(const Pmf& pmf, double delta);

/// [sum p^{1 - delta/sigma}] * exp(delta H / sigma), an upper bound on
/// exp_moment. Meaningful as a uniform-in-K bound only when delta < sigma;
/// see exp_envelope_admissible().
double remark_exp_envelope(const Pmf& pmf, double delta);
bool exp_envelope_admissible(const PopulationSummary& pop, double delta);

/// (1/sigma^2) E[T^2 ; |T| > epsilon sqrt(n) sigma].
double lindeberg_residual(const Pmf& pmf, std::int64_t n, double epsilon);

/// E|T|^{2+delta} / (n^{delta/2} sigma^{2+delta}) + sqrt(K / (sqrt(n) sigma)),
/// the Berry-Esseen right-hand side with the absolute constant set to 1.
double berry_esseen_shape(const Pmf& pmf, std::int64_t n, double delta);

/// (1/b_n^2) log sum_i exp(-2 eps sqrt(n) b_n sigma p_i^2).
double mdp_condition(const Pmf& pmf, std::int64_t n, const MdpSchedule& schedule);

/// Hoeffding: P(|sum X_i| > r n) <= 2 exp(-2 n^2 r^2 / sum (b_i - a_i)^2).
double hoeffding_tail(double n, double r, double range_sq_sum);

/// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace growent
