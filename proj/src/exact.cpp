#include "growent/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "growent/error.hpp"
#include "growent/numeric.hpp"

namespace growent {

namespace {

void require_delta_unit(double delta, const char* where) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument(std::string(where) + ": delta must lie in [0, 1]");
  }
}

void require_positive(double v, const char* what, const char* where) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(where) + ": " + what + " must be positive and finite");
  }
}

PopulationSummary nondegenerate(const Pmf& pmf, const char* where) {
  const auto pop = variance_log(pmf);
  if (pop.degenerate()) throw DegenerateVariance(where);
  return pop;
}

}  // namespace

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  NeumaierSum s;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s.value());
}

double MdpSchedule::scale(std::int64_t n) const {
  return std::pow(static_cast<double>(n), rho);
}

void validate(const MdpSchedule& schedule) {
  if (!(schedule.rho > 0.0 && schedule.rho < 0.5)) {
    throw InvalidArgument("mdp: rho must satisfy 0 < rho < 1/2");
  }
  require_positive(schedule.epsilon, "epsilon", "mdp");
  if (schedule.thresholds.empty()) {
    throw InvalidArgument("mdp: at least one threshold r is required");
  }
  for (double r : schedule.thresholds) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw InvalidArgument("mdp: thresholds must be finite and >= 0");
    }
  }
}

double entropy(const Pmf& pmf) {
  NeumaierSum h;
  for (double p : pmf.probs()) h += -p * std::log(p);
  return std::max(0.0, h.value());
}

PopulationSummary variance_log(const Pmf& pmf) {
  PopulationSummary pop;
  pop.size = pmf.size();
  pop.entropy = entropy(pmf);
  // Central form: sum p (ln p + H)^2 equals sum p ln^2 p - H^2 without the
  // cancellation of the raw-moment form.
  NeumaierSum v;
  for (double p : pmf.probs()) {
    const double c = std::log(p) + pop.entropy;
    v += p * c * c;
  }
  pop.sigma2 = v.value();
  if (pop.sigma2 <= kDegenerateVariance) pop.sigma2 = 0.0;
  pop.sigma = std::sqrt(pop.sigma2);
  return pop;
}

double abs_central_moment(const Pmf& pmf, double delta) {
  require_delta_unit(delta, "abs_central_moment");
  const double h = entropy(pmf);
  const double q = 2.0 + delta;
  NeumaierSum m;
  for (double p : pmf.probs()) m += p * std::pow(std::abs(std::log(p) + h), q);
  return m.value();
}

double remark_moment_bound(const Pmf& pmf, double delta) {
  require_delta_unit(delta, "remark_moment_bound");
  const double h = entropy(pmf);
  const double q = 2.0 + delta;
  NeumaierSum m;
  for (double p : pmf.probs()) m += p * std::pow(std::abs(std::log(p)), q);
  return m.value() + std::pow(h, q);
}

double exp_moment(const Pmf& pmf, double delta) {
  require_positive(delta, "delta", "exp_moment");
  const auto pop = nondegenerate(pmf, "exp_moment");
  const double scale = delta / pop.sigma;
  NeumaierSum m;
  for (double p : pmf.probs()) m += p * std::exp(scale * std::abs(std::log(p) + pop.entropy));
  return m.value();
}

double remark_exp_envelope(const Pmf& pmf, double delta) {
  require_positive(delta, "delta", "remark_exp_envelope");
  const auto pop = nondegenerate(pmf, "remark_exp_envelope");
  const double scale = delta / pop.sigma;
  NeumaierSum power_sum;
  for (double p : pmf.probs()) power_sum += std::exp((1.0 - scale) * std::log(p));
  return power_sum.value() * std::exp(scale * pop.entropy);
}

bool exp_envelope_admissible(const PopulationSummary& pop, double delta) {
  return pop.sigma > 0.0 && delta / pop.sigma < 1.0;
}

double lindeberg_residual(const Pmf& pmf, std::int64_t n, double epsilon) {
  if (n < 1) throw InvalidArgument("lindeberg_residual: n must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("lindeberg_residual: epsilon must be positive");
  const auto pop = nondegenerate(pmf, "lindeberg_residual");
  const double threshold = epsilon * std::sqrt(static_cast<double>(n)) * pop.sigma;
  NeumaierSum tail;
  NeumaierSum full;
  for (double p : pmf.probs()) {
    const double c = std::log(p) + pop.entropy;
    const double term = p * c * c;
    full += term;
    if (std::abs(c) > threshold) tail += term;
  }
  // Same terms in the same order, so an all-inclusive tail gives exactly 1.
  return std::clamp(tail.value() / full.value(), 0.0, 1.0);
}

double berry_esseen_shape(const Pmf& pmf, std::int64_t n, double delta) {
  require_delta_unit(delta, "berry_esseen_shape");
  if (n < 1) throw InvalidArgument("berry_esseen_shape: n must be >= 1");
  const auto pop = nondegenerate(pmf, "berry_esseen_shape");
  const double nn = static_cast<double>(n);
  const double moment = abs_central_moment(pmf, delta);
  const double moment_term = moment / (std::pow(nn, delta / 2.0) * std::pow(pop.sigma, 2.0 + delta));
  const double size_term = std::sqrt(static_cast<double>(pmf.size()) / (std::sqrt(nn) * pop.sigma));
  return moment_term + size_term;
}

double mdp_condition(const Pmf& pmf, std::int64_t n, const MdpSchedule& schedule) {
  validate(schedule);
  if (n < 1) throw InvalidArgument("mdp_condition: n must be >= 1");
  const auto pop = nondegenerate(pmf, "mdp_condition");
  const double b = schedule.scale(n);
  const double coeff = 2.0 * schedule.epsilon * std::sqrt(static_cast<double>(n)) * b * pop.sigma;
  std::vector<double> exponents;
  exponents.reserve(pmf.size());
  for (double p : pmf.probs()) exponents.push_back(-coeff * p * p);
  return log_sum_exp(exponents) / (b * b);
}

double hoeffding_tail(double n, double r, double range_sq_sum) {
  require_positive(n, "n", "hoeffding_tail");
  require_positive(r, "r", "hoeffding_tail");
  require_positive(range_sq_sum, "range_sq_sum", "hoeffding_tail");
  return 2.0 * std::exp(-2.0 * n * n * r * r / range_sq_sum);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace growent
