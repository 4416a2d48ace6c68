#include "growent/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "growent/error.hpp"
#include "growent/numeric.hpp"

namespace growent {

namespace {

constexpr double kInversionLimit = 30.0;

void require_sample_size(std::int64_t n, const char* where) {
  if (n < 1) throw InvalidArgument(std::string(where) + ": n must be >= 1");
  if (n > kMaxSampleSize) throw InvalidArgument(std::string(where) + ": n exceeds 2^62");
}

// Sequential search from k = 0. Requires p <= 1/2 and n p small, so q^n is
// far from underflow.
std::int64_t binomial_inversion(Xoshiro256& rng, std::int64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = (static_cast<double>(n) + 1.0) * s;
  const double r0 = std::exp(static_cast<double>(n) * std::log1p(-p));
  for (;;) {
    double u = rng.uniform();
    double f = r0;
    for (std::int64_t x = 0; x <= n; ++x) {
      if (u < f) return x;
      u -= f;
      f *= a / static_cast<double>(x + 1) - s;
    }
    // Rounding left u above the total mass; draw again.
  }
}

// Hormann (1993), "The generation of binomial random variates", BTRS.
std::int64_t binomial_btrs(Xoshiro256& rng, std::int64_t n, double p) {
  const double nn = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nn * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nn * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const auto m = static_cast<std::int64_t>(std::floor((nn + 1.0) * p));
  const double h = log_factorial(m) + log_factorial(n - m);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > nn) continue;
    const auto k = static_cast<std::int64_t>(kf);
    if (us >= 0.07 && v <= v_r) return k;
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - log_factorial(k) - log_factorial(n - k) + static_cast<double>(k - m) * lpq) {
      return k;
    }
  }
}

}  // namespace

void validate(const CountVector& counts) {
  if (counts.total < 1) throw InvalidArgument("CountVector: total must be >= 1");
  std::int64_t sum = 0;
  for (auto c : counts.counts) {
    if (c < 0) throw InvalidArgument("CountVector: negative count");
    sum += c;
  }
  if (sum != counts.total) throw InvalidArgument("CountVector: counts do not sum to total");
}

AliasTable::AliasTable(const Pmf& pmf) : cutoff_(pmf.size()), alias_(pmf.size()) {
  const std::size_t k = pmf.size();
  std::vector<double> scaled(k);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  small.reserve(k);
  large.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    scaled[i] = pmf[i] * static_cast<double>(k);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t lo = small.back();
    small.pop_back();
    const std::size_t hi = large.back();
    large.pop_back();
    cutoff_[lo] = scaled[lo];
    alias_[lo] = hi;
    scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
    (scaled[hi] < 1.0 ? small : large).push_back(hi);
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) {
    cutoff_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    cutoff_[i] = 1.0;
    alias_[i] = i;
  }
}

double log_factorial(std::int64_t k) {
  constexpr std::size_t kTableSize = 256;
  static const auto table = [] {
    std::array<double, kTableSize> t{};
    for (std::size_t i = 1; i < kTableSize; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < 0) throw InvalidArgument("log_factorial: negative argument");
  if (static_cast<std::size_t>(k) < kTableSize) return table[static_cast<std::size_t>(k)];
  const double x = static_cast<double>(k) + 1.0;
  const double x2 = x * x;
  const double series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2);
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

std::int64_t sample_binomial(Xoshiro256& rng, std::int64_t n, double p) {
  if (n < 0) throw InvalidArgument("sample_binomial: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sample_binomial: p must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p <= kInversionLimit) return binomial_inversion(rng, n, p);
  return binomial_btrs(rng, n, p);
}

ConditionalBinomialSampler::ConditionalBinomialSampler(const Pmf& pmf) : conditional_(pmf.size()) {
  const std::size_t k = pmf.size();
  NeumaierSum suffix;
  for (std::size_t i = k; i-- > 0;) {
    suffix += pmf[i];
    const double mass = suffix.value();
    if (!std::isnormal(mass)) {
      throw NumericError("ConditionalBinomialSampler: remaining mass underflows at cell " +
                         std::to_string(i));
    }
    conditional_[i] = std::min(1.0, pmf[i] / mass);
  }
  conditional_[k - 1] = 1.0;
}

CountVector ConditionalBinomialSampler::sample(std::int64_t n, Xoshiro256& rng) const {
  require_sample_size(n, "sample_counts_multinomial");
  CountVector out{std::vector<std::int64_t>(conditional_.size(), 0), n};
  std::int64_t remaining = n;
  const std::size_t last = conditional_.size() - 1;
  for (std::size_t i = 0; i < last && remaining > 0; ++i) {
    const std::int64_t c = sample_binomial(rng, remaining, conditional_[i]);
    out.counts[i] = c;
    remaining -= c;
  }
  out.counts[last] += remaining;
  return out;
}

CountVector CategoricalSampler::sample(std::int64_t n, Xoshiro256& rng) const {
  require_sample_size(n, "sample_counts_categorical");
  CountVector out{std::vector<std::int64_t>(table_.size(), 0), n};
  for (std::int64_t j = 0; j < n; ++j) ++out.counts[table_.sample(rng)];
  return out;
}

CountVector sample_counts_categorical(const Pmf& pmf, std::int64_t n, std::uint64_t seed) {
  require_sample_size(n, "sample_counts_categorical");
  Xoshiro256 rng(seed);
  return CategoricalSampler(pmf).sample(n, rng);
}

CountVector sample_counts_multinomial(const Pmf& pmf, std::int64_t n, std::uint64_t seed) {
  require_sample_size(n, "sample_counts_multinomial");
  Xoshiro256 rng(seed);
  return ConditionalBinomialSampler(pmf).sample(n, rng);
}

std::string_view sampler_name(SamplerKind kind) {
  return kind == SamplerKind::Categorical ? "categorical" : "multinomial";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "categorical") return SamplerKind::Categorical;
  if (name == "multinomial") return SamplerKind::Multinomial;
  throw InvalidArgument("unknown sampler '" + std::string(name) + "' (categorical | multinomial)");
}

}  // namespace growent
