#include "growent/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "growent/error.hpp"
#include "growent/estimator.hpp"
#include "growent/numeric.hpp"
#include "growent/random.hpp"

namespace growent {

namespace {

constexpr std::int64_t kMaxReplicates = std::int64_t{1} << 32;
// Guards floor() against n^kappa landing a hair under an integer.
constexpr double kFloorSlack = 1e-9;

// Runs fn(i) for i in [0, count). Each index is executed exactly once;
// callers write results by index so the outcome does not depend on the
// number of workers.
template <typename Fn>
void parallel_for(std::int64_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    try {
      for (;;) {
        const std::int64_t begin = next.fetch_add(kChunk);
        if (begin >= count) return;
        const std::int64_t end = std::min(count, begin + kChunk);
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
}

struct ReplicateOutcome {
  double z = 0.0;
  double kl = 0.0;
  double chi2 = 0.0;
  double identity_error = 0.0;
  bool inequality_ok = true;
};

struct Population {
  std::int64_t n = 0;
  Pmf pmf;
  PopulationSummary summary;
};

Population realize_population(const ExperimentConfig& config, std::int64_t n) {
  Pmf pmf = realize_pmf(config, n);
  auto summary = variance_log(pmf);
  if (summary.degenerate()) {
    throw DegenerateVariance(std::string(family_name(config.family)) + " family at n=" +
                             std::to_string(n));
  }
  return Population{n, std::move(pmf), summary};
}

template <typename Sampler>
std::vector<ReplicateOutcome> simulate_with(const Sampler& sampler, const Population& pop,
                                            std::int64_t replicates, std::uint64_t master_seed,
                                            std::uint64_t grid_index, unsigned workers) {
  std::vector<ReplicateOutcome> out(static_cast<std::size_t>(replicates));
  parallel_for(replicates, workers, [&](std::int64_t j) {
    const SeedSpec spec{master_seed, (grid_index << 32) | static_cast<std::uint64_t>(j)};
    Xoshiro256 rng(derive_stream_seed(spec));
    const CountVector counts = sampler.sample(pop.n, rng);
    const auto report = decompose(counts, pop.pmf, pop.summary);
    ReplicateOutcome& o = out[static_cast<std::size_t>(j)];
    o.z = *report.standardized;
    o.kl = report.kl_term;
    o.chi2 = report.chi2_term;
    o.identity_error = std::abs((report.plugin_entropy - pop.summary.entropy) -
                                (report.linear_term - report.kl_term));
    o.inequality_ok = report.kl_term >= 0.0 && report.kl_term <= report.chi2_term;
  });
  return out;
}

std::vector<ReplicateOutcome> simulate(const ExperimentConfig& config, const Population& pop,
                                       std::int64_t replicates, std::uint64_t grid_index,
                                       const RunOptions& options) {
  if (config.sampler == SamplerKind::Categorical) {
    return simulate_with(CategoricalSampler(pop.pmf), pop, replicates, config.master_seed,
                         grid_index, options.workers);
  }
  return simulate_with(ConditionalBinomialSampler(pop.pmf), pop, replicates, config.master_seed,
                       grid_index, options.workers);
}

EcdfSummary summarize(const Population& pop, const std::vector<ReplicateOutcome>& outcomes) {
  std::vector<double> z;
  z.reserve(outcomes.size());
  for (const auto& o : outcomes) z.push_back(o.z);
  EcdfSummary s = summarize_standardized(std::move(z));
  s.n = pop.n;
  s.size = pop.pmf.size();
  s.entropy = pop.summary.entropy;
  s.sigma = pop.summary.sigma;

  const double m = static_cast<double>(outcomes.size());
  NeumaierSum kl;
  NeumaierSum chi2;
  for (const auto& o : outcomes) {
    kl += o.kl;
    chi2 += o.chi2;
    s.max_identity_error = std::max(s.max_identity_error, o.identity_error);
    if (!o.inequality_ok) ++s.inequality_violations;
  }
  s.mean_kl = kl.value() / m;
  s.mean_chi2 = chi2.value() / m;
  NeumaierSum dev;
  for (const auto& o : outcomes) dev += (o.chi2 - s.mean_chi2) * (o.chi2 - s.mean_chi2);
  s.se_chi2 = m > 1 ? std::sqrt(dev.value() / (m - 1.0) / m) : 0.0;
  s.expected_chi2 = static_cast<double>(s.size - 1) / static_cast<double>(pop.n);
  return s;
}

}  // namespace

std::size_t KRule::size_for(std::int64_t n) const {
  const double nn = static_cast<double>(n);
  double k = 0.0;
  switch (kind) {
    case KRuleKind::Fixed:
      k = value;
      break;
    case KRuleKind::Pow:
      k = std::pow(nn, value);
      break;
    case KRuleKind::LogPow:
      k = n > 1 ? std::pow(std::log(nn), value) : 0.0;
      break;
  }
  return static_cast<std::size_t>(std::floor(k + kFloorSlack));
}

KRule parse_k_rule(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("K rule '" + std::string(text) + "' must be fixed:K, pow:kappa or logpow:kappa");
  }
  const auto head = text.substr(0, colon);
  const auto tail = text.substr(colon + 1);
  KRule rule;
  if (head == "fixed") {
    rule.kind = KRuleKind::Fixed;
  } else if (head == "pow") {
    rule.kind = KRuleKind::Pow;
  } else if (head == "logpow") {
    rule.kind = KRuleKind::LogPow;
  } else {
    throw InvalidArgument("unknown K rule '" + std::string(head) + "'");
  }
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), rule.value);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || !(rule.value > 0.0)) {
    throw InvalidArgument("K rule '" + std::string(text) + "': value must be a positive number");
  }
  if (rule.kind == KRuleKind::Fixed && rule.value != std::floor(rule.value)) {
    throw InvalidArgument("K rule '" + std::string(text) + "': fixed K must be an integer");
  }
  return rule;
}

std::string format_k_rule(const KRule& rule) {
  std::string out;
  switch (rule.kind) {
    case KRuleKind::Fixed: out = "fixed:"; break;
    case KRuleKind::Pow: out = "pow:"; break;
    case KRuleKind::LogPow: out = "logpow:"; break;
  }
  // Shortest representation that parses back to the same double.
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, rule.value);
  out.append(buf, end);
  return out;
}

void validate(const ExperimentConfig& config) {
  if (config.family == FamilyKind::Custom) {
    throw InvalidArgument("experiments need a parametric family, not custom");
  }
  if (!(config.k_rule.value > 0.0) || !std::isfinite(config.k_rule.value)) {
    throw InvalidArgument("K rule value must be positive");
  }
  if (config.n_grid.empty()) throw InvalidArgument("n grid is empty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    const auto n = config.n_grid[i];
    if (n < 1 || n > kMaxSampleSize) throw InvalidArgument("n grid entries must lie in [1, 2^62]");
    if (i > 0 && n <= config.n_grid[i - 1]) throw InvalidArgument("n grid must be strictly increasing");
  }
  if (config.replicates < 100) {
    throw InvalidArgument("replicates must be >= 100 for a distributional summary");
  }
  if (config.max_replicates < config.replicates || config.max_replicates > kMaxReplicates) {
    throw InvalidArgument("max_replicates must lie in [replicates, 2^32]");
  }
  if (!(config.delta >= 0.0 && config.delta <= 1.0)) {
    throw InvalidArgument("delta must lie in [0, 1]");
  }
  if (config.mdp) validate(*config.mdp);
}

Pmf realize_pmf(const ExperimentConfig& config, std::int64_t n) {
  const std::size_t k = config.k_rule.size_for(n);
  if (k < 2) {
    throw InvalidArgument("K rule " + format_k_rule(config.k_rule) + " gives K=" +
                          std::to_string(k) + " < 2 at n=" + std::to_string(n));
  }
  return build_family(FamilySpec{config.family, k, {}});
}

double ks_distance(std::span<const double> sorted_samples) {
  if (sorted_samples.empty()) throw InvalidArgument("ks_distance: empty sample");
  const double m = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t j = 0; j < sorted_samples.size(); ++j) {
    const double f = normal_cdf(sorted_samples[j]);
    const double above = static_cast<double>(j + 1) / m - f;
    const double below = f - static_cast<double>(j) / m;
    d = std::max({d, std::abs(above), std::abs(below)});
  }
  return d;
}

EcdfSummary summarize_standardized(std::vector<double> z) {
  if (z.empty()) throw InvalidArgument("summarize_standardized: empty sample");
  std::sort(z.begin(), z.end());
  EcdfSummary s;
  s.replicates = static_cast<std::int64_t>(z.size());
  s.ks_distance = ks_distance(z);
  const double m = static_cast<double>(z.size());
  NeumaierSum sum;
  for (double v : z) sum += v;
  s.mean_z = sum.value() / m;
  NeumaierSum dev;
  for (double v : z) dev += (v - s.mean_z) * (v - s.mean_z);
  s.var_z = z.size() > 1 ? dev.value() / (m - 1.0) : 0.0;
  s.z_sorted = std::move(z);
  return s;
}

std::vector<EcdfSummary> run_clt(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  std::vector<EcdfSummary> out;
  out.reserve(config.n_grid.size());
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const auto pop = realize_population(config, config.n_grid[g]);
    const auto outcomes = simulate(config, pop, config.replicates, g, options);
    out.push_back(summarize(pop, outcomes));
  }
  return out;
}

BeSweep assemble_be_sweep(std::vector<BeRow> rows, std::int64_t replicates) {
  BeSweep sweep;
  const double noise = 2.0 * kKsCoefficient95 / std::sqrt(static_cast<double>(replicates));
  bool within_noise = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lo = std::min(lo, rows[i].ratio);
    hi = std::max(hi, rows[i].ratio);
    if (i > 0 && rows[i].ks_distance > rows[i - 1].ks_distance) {
      ++sweep.inversions;
      if (rows[i].ks_distance - rows[i - 1].ks_distance > noise) within_noise = false;
    }
  }
  sweep.ks_nonincreasing = sweep.inversions == 0 || (sweep.inversions == 1 && within_noise);
  sweep.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  sweep.rows = std::move(rows);
  return sweep;
}

BeSweep run_be_sweep(const ExperimentConfig& config, const RunOptions& options) {
  auto details = run_clt(config, options);
  std::vector<BeRow> rows;
  rows.reserve(details.size());
  for (const auto& d : details) {
    const Pmf pmf = realize_pmf(config, d.n);
    BeRow row;
    row.n = d.n;
    row.size = d.size;
    row.ks_distance = d.ks_distance;
    row.bound_shape = berry_esseen_shape(pmf, d.n, config.delta);
    row.ratio = row.ks_distance / row.bound_shape;
    rows.push_back(row);
  }
  auto sweep = assemble_be_sweep(std::move(rows), config.replicates);
  sweep.details = std::move(details);
  return sweep;
}

std::string_view mdp_status_name(MdpStatus status) {
  switch (status) {
    case MdpStatus::Ok: return "ok";
    case MdpStatus::NoExceedances: return "no exceedances";
    case MdpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::int64_t required_mdp_replicates(double r, double scale) {
  const double tail = std::erfc(r * scale / std::sqrt(2.0));
  const double needed = std::ceil(kMinExpectedExceedances / tail);
  if (!(tail > 0.0) || needed > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2)) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return static_cast<std::int64_t>(needed);
}

MdpResult run_mdp(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  if (!config.mdp) throw InvalidArgument("run_mdp: no mdp schedule configured");
  const MdpSchedule& schedule = *config.mdp;

  MdpResult result;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const std::int64_t n = config.n_grid[g];
    const auto pop = realize_population(config, n);
    const double b = schedule.scale(n);
    const double condition = mdp_condition(pop.pmf, n, schedule);
    if (!std::isfinite(condition)) {
      throw NumericError("mdp_condition is not finite at n=" + std::to_string(n));
    }

    std::int64_t replicates = config.replicates;
    std::vector<bool> feasible;
    for (double r : schedule.thresholds) {
      const auto need = required_mdp_replicates(r, b);
      feasible.push_back(need <= config.max_replicates);
      if (feasible.back()) replicates = std::max(replicates, need);
    }
    const auto outcomes = simulate(config, pop, replicates, g, options);

    for (std::size_t t = 0; t < schedule.thresholds.size(); ++t) {
      MdpCell cell;
      cell.n = n;
      cell.size = pop.pmf.size();
      cell.r = schedule.thresholds[t];
      cell.scale = b;
      cell.target = -0.5 * cell.r * cell.r;
      cell.condition = condition;
      if (!feasible[t]) {
        cell.status = MdpStatus::Infeasible;
        result.cells.push_back(cell);
        continue;
      }
      cell.replicates = replicates;
      const double cut = cell.r * b;
      for (const auto& o : outcomes) {
        if (std::abs(o.z) > cut) ++cell.exceedances;
      }
      cell.probability = static_cast<double>(cell.exceedances) / static_cast<double>(replicates);
      if (cell.exceedances == 0) {
        cell.status = MdpStatus::NoExceedances;
      } else {
        cell.scaled_log_probability = std::log(*cell.probability) / (b * b);
        if (cell.target != 0.0) {
          cell.relative_error = std::abs(*cell.scaled_log_probability / cell.target - 1.0);
        }
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

}  // namespace growent
