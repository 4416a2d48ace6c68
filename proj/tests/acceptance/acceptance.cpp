// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion 5   a single one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "growent/cli.hpp"
#include "growent/estimator.hpp"
#include "growent/exact.hpp"
#include "growent/montecarlo.hpp"
#include "growent/random.hpp"
#include "growent/sampling.hpp"
#include "oracle.hpp"

using namespace growent;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Pmf family(FamilyKind kind, std::size_t k) { return build_family({kind, k, {}}); }

// Shared by criteria 5, 6, 7 and 11.
constexpr std::uint64_t kCltSeed = 20240517;
constexpr std::int64_t kCltReplicates = 2000;

ExperimentConfig clt_config() {
  ExperimentConfig c;
  c.family = FamilyKind::Harmonic;
  c.k_rule = parse_k_rule("pow:0.3333333333333333");
  c.n_grid = {100000};
  c.replicates = kCltReplicates;
  c.master_seed = kCltSeed;
  c.delta = 1.0;
  return c;
}

const EcdfSummary& clt_summary() {
  static const EcdfSummary summary = run_clt(clt_config(), {std::max(1u, std::thread::hardware_concurrency())})[0];
  return summary;
}

bool approaching_one(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(std::abs(values[i] - 1.0) < std::abs(values[i - 1] - 1.0))) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.4f", v[i]);
  return s;
}

Verdict criterion_1() {
  std::mt19937_64 gen(1);
  std::vector<std::vector<double>> cases;
  for (int t = 0; t < 50; ++t) cases.push_back(oracle::random_probs(gen, 50));
  const Pmf harmonic = family(FamilyKind::Harmonic, 10000);
  cases.emplace_back(harmonic.probs().begin(), harmonic.probs().end());
  double worst = 0.0;
  for (const auto& probs : cases) {
    const Pmf pmf = validate_pmf(probs);
    const auto p = pmf.probs();
    worst = std::max(worst, oracle::rel_err(entropy(pmf), oracle::entropy(p)));
    worst = std::max(worst, oracle::rel_err(variance_log(pmf).sigma2, oracle::variance_log(p)));
    for (double d : {0.0, 0.5, 1.0}) {
      worst = std::max(worst, oracle::rel_err(abs_central_moment(pmf, d), oracle::abs_central_moment(p, d)));
    }
    for (double d : {0.1, 0.5}) {
      worst = std::max(worst, oracle::rel_err(exp_moment(pmf, d), oracle::exp_moment(p, d)));
    }
  }
  return {worst <= 1e-10, fmt("51 pmfs, max relative error %.3g (tol 1e-10)", worst)};
}

Verdict criterion_2() {
  std::vector<double> var_ratio;
  std::vector<double> ent_ratio;
  for (double k : {1e3, 1e4, 1e5, 1e6}) {
    const auto pop = variance_log(family(FamilyKind::Harmonic, static_cast<std::size_t>(k)));
    const double lk = std::log(k);
    var_ratio.push_back(12.0 * pop.sigma2 / (lk * lk));
    ent_ratio.push_back(pop.entropy / (0.5 * lk));
  }
  const bool var_ok = approaching_one(var_ratio) && std::abs(var_ratio.back() - 1.0) <= 0.3;
  const bool ent_ok = approaching_one(ent_ratio) && std::abs(ent_ratio.back() - 1.0) <= 0.2;
  return {var_ok && ent_ok, "12 sigma^2/ln^2 K = [" + join(var_ratio) + "] (final tol 0.3) " +
                                (var_ok ? "ok" : "FAILS") + "; H/(ln K/2) = [" + join(ent_ratio) +
                                "] (final tol 0.2) " + (ent_ok ? "ok" : "FAILS")};
}

Verdict criterion_3() {
  double lo = INFINITY;
  double hi = 0.0;
  for (std::size_t k = 5; k <= 500; ++k) {
    const double s2 = variance_log(family(FamilyKind::ExpGeometric, k)).sigma2;
    lo = std::min(lo, s2);
    hi = std::max(hi, s2);
  }
  return {lo >= 0.1 && hi <= 10.0, fmt("sigma^2 over K=5..500 in [%.4f, %.4f] (required [0.1, 10])", lo, hi)};
}

Verdict criterion_4() {
  std::vector<double> ratio;
  for (double k : {1e3, 1e4, 1e5, 1e6}) {
    const double s2 = variance_log(family(FamilyKind::LogHarmonic, static_cast<std::size_t>(k))).sigma2;
    const double lk = std::log(k);
    ratio.push_back(2.0 * s2 * std::log(lk) / (lk * lk));
  }
  const bool ok = approaching_one(ratio) && std::abs(ratio.back() - 1.0) <= 0.3;
  return {ok, "2 sigma^2 ln ln K/ln^2 K = [" + join(ratio) + "] (final tol 0.3)"};
}

Verdict criterion_5() {
  const auto& s = clt_summary();
  return {s.ks_distance <= 0.08,
          fmt("n=%lld K=%zu M=%lld: KS = %.4f (tol 0.08), mean Z %.3f, var Z %.3f", static_cast<long long>(s.n),
              s.size, static_cast<long long>(s.replicates), s.ks_distance, s.mean_z, s.var_z)};
}

Verdict criterion_6() {
  const auto& s = clt_summary();
  const bool ok = s.max_identity_error <= 1e-12 && s.inequality_violations == 0 &&
                  s.replicates >= 2000;
  return {ok, fmt("%lld replicates: max |(H^-H)-(A-D)| = %.3g (tol 1e-12), %lld violations of 0<=D<=X",
                  static_cast<long long>(s.replicates), s.max_identity_error,
                  static_cast<long long>(s.inequality_violations))};
}

Verdict criterion_7() {
  const auto& s = clt_summary();
  const double z = (s.mean_chi2 - s.expected_chi2) / s.se_chi2;
  return {std::abs(z) <= 4.0, fmt("mean X = %.6g, (K-1)/n = %.6g, SE = %.3g: %.2f SE (tol 4)", s.mean_chi2,
                                  s.expected_chi2, s.se_chi2, z)};
}

Verdict criterion_8() {
  ExperimentConfig c;
  c.family = FamilyKind::Harmonic;
  c.k_rule = parse_k_rule("pow:0.2");
  c.n_grid = {1000, 10000, 100000};
  c.replicates = 2000;
  c.master_seed = 8;
  c.delta = 1.0;
  const auto sweep = run_be_sweep(c, {std::max(1u, std::thread::hardware_concurrency())});
  std::string rows;
  for (const auto& r : sweep.rows) {
    rows += fmt(" n=%lld K=%zu ks=%.4f shape=%.4f ratio=%.4f;", static_cast<long long>(r.n), r.size,
                r.ks_distance, r.bound_shape, r.ratio);
  }
  const bool ok = sweep.ks_nonincreasing && sweep.ratio_spread <= 5.0;
  return {ok, rows + fmt(" inversions=%d, ratio spread %.3f (tol 5)", sweep.inversions, sweep.ratio_spread)};
}

Verdict criterion_9() {
  ExperimentConfig c;
  c.family = FamilyKind::ExpGeometric;
  c.k_rule = parse_k_rule("logpow:0.4");
  c.n_grid = {1000, 10000, 100000};
  c.replicates = 2000;
  c.master_seed = 9;
  c.max_replicates = 1'000'000;
  c.mdp = MdpSchedule{0.1, 1.0, {0.5}};
  const auto res = run_mdp(c, {std::max(1u, std::thread::hardware_concurrency())});
  bool ok = res.cells.size() == 3;
  std::string rows;
  for (std::size_t i = 0; i < res.cells.size(); ++i) {
    const auto& cell = res.cells[i];
    if (cell.status != MdpStatus::Ok || !cell.relative_error) {
      ok = false;
      rows += fmt(" n=%lld status=%s;", static_cast<long long>(cell.n), std::string(mdp_status_name(cell.status)).c_str());
      continue;
    }
    rows += fmt(" n=%lld K=%zu M=%lld P=%.4g scaled=%.4f relerr=%.4f cond=%.4f;", static_cast<long long>(cell.n),
                cell.size, static_cast<long long>(cell.replicates), *cell.probability,
                *cell.scaled_log_probability, *cell.relative_error, cell.condition);
    if (i > 0) {
      const auto& prev = res.cells[i - 1];
      if (!prev.relative_error || !(*cell.relative_error < *prev.relative_error)) ok = false;
      if (!(cell.condition < prev.condition)) ok = false;
    }
  }
  if (ok) ok = *res.cells.back().relative_error <= 1.0;
  return {ok, rows + " (relerr decreasing, final <= 1; condition strictly decreasing)"};
}

Verdict criterion_10() {
  const std::size_t k = 100;
  const std::int64_t n = 1000;
  const int reps = 10000;
  const Pmf pmf = family(FamilyKind::Harmonic, k);
  const CategoricalSampler categorical(pmf);
  const ConditionalBinomialSampler multinomial(pmf);
  std::vector<double> a(k, 0.0);
  std::vector<double> b(k, 0.0);
  for (int r = 0; r < reps; ++r) {
    Xoshiro256 g1(derive_stream_seed({101, static_cast<std::uint64_t>(r)}));
    Xoshiro256 g2(derive_stream_seed({202, static_cast<std::uint64_t>(r)}));
    const auto ca = categorical.sample(n, g1);
    const auto cb = multinomial.sample(n, g2);
    for (std::size_t i = 0; i < k; ++i) {
      a[i] += static_cast<double>(ca.counts[i]);
      b[i] += static_cast<double>(cb.counts[i]);
    }
  }
  // 2 x K homogeneity statistic of the pooled counts; equal totals per row.
  double stat = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = 0.5 * (a[i] + b[i]);
    stat += (a[i] - e) * (a[i] - e) / e + (b[i] - e) * (b[i] - e) / e;
  }
  const boost::math::chi_squared_distribution<double> ref(static_cast<double>(k - 1));
  const double q = boost::math::quantile(ref, 0.999);
  return {stat < q, fmt("K=%zu n=%lld M=%d: pooled chi-square %.2f, 99.9%% quantile %.2f (df %zu)", k,
                        static_cast<long long>(n), reps, stat, q, k - 1)};
}

Verdict criterion_11() {
  std::vector<std::string> base{"clt", "--family", "harmonic", "--K-rule", "pow:0.3333333333333333",
                                "--n-grid", "100000", "--reps", std::to_string(kCltReplicates),
                                "--seed", std::to_string(kCltSeed), "--no-timing"};
  auto render = [&](const char* workers) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers});
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return std::make_pair(code, out.str());
  };
  const auto one = render("1");
  const auto eight = render("8");
  const bool ok = one.first == 0 && eight.first == 0 && one.second == eight.second && !one.second.empty();
  return {ok, fmt("--workers 1 vs 8: exit %d/%d, %zu vs %zu bytes, %s", one.first, eight.first, one.second.size(),
                  eight.second.size(), one.second == eight.second ? "identical" : "DIFFERENT")};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"exact functionals vs high-precision oracle", 5, criterion_1},
      {"harmonic asymptotics", 10, criterion_2},
      {"geometric variance bounded", 1, criterion_3},
      {"log-harmonic asymptotics", 10, criterion_4},
      {"CLT experiment KS distance", 60, criterion_5},
      {"decomposition identity on every replicate", 60, criterion_6},
      {"chi-square mean identity", 60, criterion_7},
      {"Berry-Esseen shape sweep", 180, criterion_8},
      {"moderate deviation trend", 300, criterion_9},
      {"sampler cross-validation", 30, criterion_10},
      {"determinism across worker counts", 120, criterion_11},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << c.name << "): " << v.detail
              << fmt(" [%.2fs, budget %.0fs%s]", secs, c.budget_seconds, in_time ? "" : ", OVER BUDGET") << "\n";
  }
  return failures == 0 ? 0 : 1;
}
