#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "growent/alphabet.hpp"
#include "growent/exact.hpp"
#include "growent/sampling.hpp"

namespace growent {

// Two-sided 95% Kolmogorov-Smirnov null coefficient: D_M <= 1.36 / sqrt(M).
inline constexpr double kKsCoefficient95 = 1.36;
// Expected exceedances required before an MDP cell is estimated.
inline constexpr double kMinExpectedExceedances = 20.0;

enum class KRuleKind { Fixed, Pow, LogPow };

/// Alphabet size as a function of the sample size:
///   Fixed   K = value
///   Pow     K = floor(n^value)
///   LogPow  K = floor((ln n)^value)
struct KRule {
  KRuleKind kind = KRuleKind::Fixed;
  double value = 2.0;

  std::size_t size_for(std::int64_t n) const;
};

/// "fixed:100", "pow:0.333", "logpow:0.4".
KRule parse_k_rule(std::string_view text);
std::string format_k_rule(const KRule& rule);

struct ExperimentConfig {
  FamilyKind family = FamilyKind::Harmonic;
  KRule k_rule;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 2000;
  std::uint64_t master_seed = 0;
  double delta = 1.0;
  std::optional<MdpSchedule> mdp;
  SamplerKind sampler = SamplerKind::Multinomial;
  // Ceiling for the MDP replicate auto-raise.
  std::int64_t max_replicates = 1'000'000;
};

void validate(const ExperimentConfig& config);

/// Pmf of the configured family at sample size n.
Pmf realize_pmf(const ExperimentConfig& config, std::int64_t n);

struct RunOptions {
  unsigned workers = 1;
};

/// Sorted standardized statistics for one n and what they say about the
/// normal approximation.
struct EcdfSummary {
  std::int64_t n = 0;
  std::size_t size = 0;  // K
  std::int64_t replicates = 0;
  double entropy = 0.0;  // exact H_n
  double sigma = 0.0;    // exact sigma_n
  std::vector<double> z_sorted;
  double ks_distance = 0.0;
  double mean_z = 0.0;
  double var_z = 0.0;
  double mean_kl = 0.0;
  double mean_chi2 = 0.0;
  double se_chi2 = 0.0;
  double expected_chi2 = 0.0;  // (K-1)/n
  double max_identity_error = 0.0;
  std::int64_t inequality_violations = 0;
};

/// sup_x |F_M(x) - Phi(x)| over the jump points of the ECDF.
double ks_distance(std::span<const double> sorted_samples);

/// Sorts `z` and fills the Z-only fields of an EcdfSummary.
EcdfSummary summarize_standardized(std::vector<double> z);

std::vector<EcdfSummary> run_clt(const ExperimentConfig& config, const RunOptions& options = {});

struct BeRow {
  std::int64_t n = 0;
  std::size_t size = 0;
  double ks_distance = 0.0;
  double bound_shape = 0.0;
  double ratio = 0.0;
};

struct BeSweep {
  std::vector<BeRow> rows;
  std::vector<EcdfSummary> details;
  int inversions = 0;           // adjacent increases of ks along the grid
  bool ks_nonincreasing = false;  // at most one increase, within MC noise
  double ratio_spread = 0.0;    // max ratio / min ratio
};

/// Monotonicity verdict and spread over precomputed rows.
BeSweep assemble_be_sweep(std::vector<BeRow> rows, std::int64_t replicates);

BeSweep run_be_sweep(const ExperimentConfig& config, const RunOptions& options = {});

enum class MdpStatus { Ok, NoExceedances, Infeasible };
std::string_view mdp_status_name(MdpStatus status);

struct MdpCell {
  std::int64_t n = 0;
  std::size_t size = 0;
  double r = 0.0;
  double scale = 0.0;  // b_n
  std::int64_t replicates = 0;
  std::int64_t exceedances = 0;
  std::optional<double> probability;            // absent when infeasible
  std::optional<double> scaled_log_probability;  // (1/b_n^2) ln P_hat
  double target = 0.0;                           // -r^2/2
  std::optional<double> relative_error;          // |scaled/target - 1|
  double condition = 0.0;                        // exact mdp_condition
  MdpStatus status = MdpStatus::Ok;
};

struct MdpResult {
  std::vector<MdpCell> cells;
};

/// Replicates needed so that M * 2(1 - Phi(r b_n)) >= kMinExpectedExceedances.
std::int64_t required_mdp_replicates(double r, double scale);

MdpResult run_mdp(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace growent
