#pragma once

#include <optional>
#include <vector>

#include "growent/alphabet.hpp"
#include "growent/exact.hpp"
#include "growent/sampling.hpp"

namespace growent {

/// Plug-in entropy and its exact split
///
///   H_hat - H = A - D,   0 <= D <= X,
///
/// with A = -sum (p_hat - p) ln p (the mean of the linearization variables),
/// D = sum p_hat ln(p_hat / p) and X = sum (p_hat - p)^2 / p.
struct DecompositionReport {
  double plugin_entropy = 0.0;
  double linear_term = 0.0;
  double kl_term = 0.0;
  double chi2_term = 0.0;
  // sqrt(n)(H_hat - H)/sigma; empty when sigma == 0.
  std::optional<double> standardized;
};

std::vector<double> empirical_pmf(const CountVector& counts);

/// -sum p_hat ln p_hat with 0 ln 0 = 0.
double plugin_entropy(const CountVector& counts);

DecompositionReport decompose(const CountVector& counts, const Pmf& pmf);

// Same, reusing a precomputed summary of `pmf` (hot path in Monte Carlo).
DecompositionReport decompose(const CountVector& counts, const Pmf& pmf,
                              const PopulationSummary& pop);

double standardized_stat(const CountVector& counts, const PopulationSummary& pop);

}  // namespace growent
