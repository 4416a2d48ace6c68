#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "growent/alphabet.hpp"
#include "growent/random.hpp"

namespace growent {

// Sample sizes above this are rejected so n^2 stays inside int64 range.
inline constexpr std::int64_t kMaxSampleSize = std::int64_t{1} << 62;

/// Multinomial counts: the sufficient statistic of n i.i.d. draws.
struct CountVector {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  std::size_t size() const { return counts.size(); }
};

/// Checks sum(counts) == total > 0 and all counts >= 0.
void validate(const CountVector& counts);

/// Walker/Vose alias table: O(K) construction, O(1) per draw.
class AliasTable {
 public:
  explicit AliasTable(const Pmf& pmf);

  std::size_t sample(Xoshiro256& rng) const {
    const auto column = static_cast<std::size_t>(rng.below(cutoff_.size()));
    return rng.uniform() < cutoff_[column] ? column : alias_[column];
  }

  std::size_t size() const { return cutoff_.size(); }

 private:
  std::vector<double> cutoff_;
  std::vector<std::size_t> alias_;
};

/// Binomial(n, p) variate. Sequential-search inversion when
/// n * min(p, 1-p) <= 30, Hormann's BTRS transformed rejection above.
std::int64_t sample_binomial(Xoshiro256& rng, std::int64_t n, double p);

/// log(k!) via a table for small k and the Stirling series above.
double log_factorial(std::int64_t k);

/// Multinomial counts cell by cell: count_i ~ Binomial(remaining n,
/// p_i / remaining mass). O(K) per replicate regardless of n.
class ConditionalBinomialSampler {
 public:
  explicit ConditionalBinomialSampler(const Pmf& pmf);

  CountVector sample(std::int64_t n, Xoshiro256& rng) const;

  std::size_t size() const { return conditional_.size(); }

 private:
  // p_i / sum_{j >= i} p_j, precomputed from compensated suffix sums.
  std::vector<double> conditional_;
};

/// n i.i.d. categorical draws through an alias table, tallied.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Pmf& pmf) : table_(pmf) {}

  CountVector sample(std::int64_t n, Xoshiro256& rng) const;

  std::size_t size() const { return table_.size(); }

 private:
  AliasTable table_;
};

CountVector sample_counts_categorical(const Pmf& pmf, std::int64_t n, std::uint64_t seed);
CountVector sample_counts_multinomial(const Pmf& pmf, std::int64_t n, std::uint64_t seed);

enum class SamplerKind { Categorical, Multinomial };

std::string_view sampler_name(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

}  // namespace growent
