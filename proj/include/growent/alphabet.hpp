#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace growent {

enum class FamilyKind { Harmonic, ExpGeometric, LogHarmonic, Uniform, Custom };

// Largest K for which every e^{-i} weight is a normal double.
inline constexpr std::size_t kMaxExpGeometricSize = 708;

// Tolerance on the input sum accepted by validate_pmf.
inline constexpr double kPmfInputTolerance = 1e-9;

/// Which distribution to build and over how many symbols.
///
///   Harmonic      p(i) ∝ 1/i,          i = 1..K
///   ExpGeometric  p(i) ∝ e^{-i},       i = 1..K
///   LogHarmonic   p(i) ∝ 1/(i ln i),   i = 2..K+1 (stored at positions 1..K)
///   Uniform       p(i) = 1/K
///   Custom        caller-supplied probabilities
struct FamilySpec {
  FamilyKind kind = FamilyKind::Uniform;
  std::size_t size = 0;
  std::vector<double> custom_probs;
};

/// Strictly positive probability vector over K symbols. Immutable.
class Pmf {
 public:
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Sum of the raw family weights (C_n), absent for custom input.
  std::optional<double> normalizer() const { return normalizer_; }

 private:
  Pmf(std::vector<double> probs, std::optional<double> normalizer)
      : probs_(std::move(probs)), normalizer_(normalizer) {}

  friend Pmf build_family(const FamilySpec& spec);
  friend Pmf validate_pmf(std::span<const double> probs);

  std::vector<double> probs_;
  std::optional<double> normalizer_;
};

Pmf build_family(const FamilySpec& spec);

/// Accepts probabilities that are all > 0 and sum to 1 within
/// kPmfInputTolerance, then renormalizes.
Pmf validate_pmf(std::span<const double> probs);

std::string_view family_name(FamilyKind kind);
FamilyKind parse_family_kind(std::string_view name);

/// Parses "harmonic:1000", "expgeometric:50", "logharmonic:100",
/// "uniform:8" or "custom:<path>". The path form loads probabilities with
/// load_probabilities().
FamilySpec parse_family(std::string_view text);

/// One probability per line (blank lines and '#' comments ignored), or a
/// JSON array when the file extension is .json or the first non-space
/// character is '['.
std::vector<double> load_probabilities(const std::filesystem::path& path);

}  // namespace growent
