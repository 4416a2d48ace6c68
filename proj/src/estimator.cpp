#include "growent/estimator.hpp"

#include <cmath>

#include "growent/error.hpp"
#include "growent/numeric.hpp"

namespace growent {

std::vector<double> empirical_pmf(const CountVector& counts) {
  validate(counts);
  const double n = static_cast<double>(counts.total);
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(counts.counts[i]) / n;
  return out;
}

double plugin_entropy(const CountVector& counts) {
  validate(counts);
  const double n = static_cast<double>(counts.total);
  NeumaierSum h;
  for (auto c : counts.counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / n;
    h += -q * std::log(q);
  }
  return std::max(0.0, h.value());
}

DecompositionReport decompose(const CountVector& counts, const Pmf& pmf) {
  return decompose(counts, pmf, variance_log(pmf));
}

DecompositionReport decompose(const CountVector& counts, const Pmf& pmf,
                              const PopulationSummary& pop) {
  validate(counts);
  if (counts.size() != pmf.size()) {
    throw InvalidArgument("decompose: count vector has " + std::to_string(counts.size()) +
                          " cells but the pmf has " + std::to_string(pmf.size()));
  }
  const double n = static_cast<double>(counts.total);
  NeumaierSum h;
  NeumaierSum a;
  NeumaierSum d;
  NeumaierSum x;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const double p = pmf[i];
    const double lp = std::log(p);
    const double q = static_cast<double>(counts.counts[i]) / n;
    const double diff = q - p;
    a += -diff * lp;
    x += diff * diff / p;
    if (counts.counts[i] > 0) {
      const double lq = std::log(q);
      h += -q * lq;
      d += q * (lq - lp);
    }
  }
  DecompositionReport r;
  r.plugin_entropy = std::max(0.0, h.value());
  r.linear_term = a.value();
  r.kl_term = d.value();
  r.chi2_term = x.value();
  if (!pop.degenerate()) {
    r.standardized = std::sqrt(n) * (r.plugin_entropy - pop.entropy) / pop.sigma;
  }
  return r;
}

double standardized_stat(const CountVector& counts, const PopulationSummary& pop) {
  if (pop.degenerate()) throw DegenerateVariance("standardized_stat");
  if (counts.size() != pop.size) {
    throw InvalidArgument("standardized_stat: count vector size does not match the population");
  }
  const double n = static_cast<double>(counts.total);
  return std::sqrt(n) * (plugin_entropy(counts) - pop.entropy) / pop.sigma;
}

}  // namespace growent
