#include "growent/alphabet.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "growent/error.hpp"
#include "growent/numeric.hpp"

namespace growent {
namespace {

double compensated_total(std::span<const double> p) {
  NeumaierSum s;
  for (double v : p) s += v;
  return s.value();
}

TEST(BuildFamily, HarmonicTwoSymbols) {
  const auto pmf = build_family({FamilyKind::Harmonic, 2, {}});
  ASSERT_EQ(pmf.size(), 2u);
  EXPECT_NEAR(pmf[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(pmf[1], 1.0 / 3.0, 1e-15);
  ASSERT_TRUE(pmf.normalizer());
  EXPECT_DOUBLE_EQ(*pmf.normalizer(), 1.5);
}

TEST(BuildFamily, UniformFour) {
  const auto pmf = build_family({FamilyKind::Uniform, 4, {}});
  for (double p : pmf.probs()) EXPECT_EQ(p, 0.25);
}

TEST(BuildFamily, ExpGeometricSingleAtom) {
  const auto pmf = build_family({FamilyKind::ExpGeometric, 1, {}});
  ASSERT_EQ(pmf.size(), 1u);
  EXPECT_EQ(pmf[0], 1.0);
  EXPECT_DOUBLE_EQ(*pmf.normalizer(), std::exp(-1.0));
}

TEST(BuildFamily, LogHarmonicStartsAtTwo) {
  const auto pmf = build_family({FamilyKind::LogHarmonic, 3, {}});
  const double w2 = 1.0 / (2.0 * std::log(2.0));
  const double w3 = 1.0 / (3.0 * std::log(3.0));
  const double w4 = 1.0 / (4.0 * std::log(4.0));
  const double c = w2 + w3 + w4;
  EXPECT_NEAR(*pmf.normalizer(), c, 1e-15);
  EXPECT_NEAR(pmf[0], w2 / c, 1e-15);
  EXPECT_NEAR(pmf[2], w4 / c, 1e-15);
}

TEST(BuildFamily, RejectsBadSizes) {
  EXPECT_THROW(build_family({FamilyKind::Harmonic, 0, {}}), InvalidArgument);
  EXPECT_THROW(build_family({FamilyKind::LogHarmonic, 1, {}}), InvalidArgument);
  EXPECT_NO_THROW(build_family({FamilyKind::ExpGeometric, kMaxExpGeometricSize, {}}));
  EXPECT_THROW(build_family({FamilyKind::ExpGeometric, kMaxExpGeometricSize + 1, {}}), InvalidArgument);
  EXPECT_THROW(build_family({FamilyKind::Custom, 2, {0.7, 0.7}}), InvalidArgument);
}

TEST(BuildFamily, InvariantsAcrossFamiliesAndSizes) {
  for (auto kind : {FamilyKind::Harmonic, FamilyKind::ExpGeometric, FamilyKind::LogHarmonic,
                    FamilyKind::Uniform}) {
    for (std::size_t k : {2u, 10u, 1000u, 1000000u}) {
      if (kind == FamilyKind::ExpGeometric && k > kMaxExpGeometricSize) {
        EXPECT_THROW(build_family({kind, k, {}}), InvalidArgument);
        k = kMaxExpGeometricSize;
      }
      const auto pmf = build_family({kind, k, {}});
      SCOPED_TRACE(std::string(family_name(kind)) + ":" + std::to_string(k));
      ASSERT_EQ(pmf.size(), k);
      for (double p : pmf.probs()) ASSERT_GT(p, 0.0);
      EXPECT_NEAR(compensated_total(pmf.probs()), 1.0, 1e-12);
    }
  }
}

TEST(BuildFamily, HarmonicDecreasingAndExpRatio) {
  const auto h = build_family({FamilyKind::Harmonic, 1000, {}});
  for (std::size_t i = 1; i < h.size(); ++i) ASSERT_LT(h[i], h[i - 1]);
  const auto e = build_family({FamilyKind::ExpGeometric, 500, {}});
  for (std::size_t i = 1; i < e.size(); ++i) {
    ASSERT_NEAR(e[i] / e[i - 1], std::exp(-1.0), 1e-12);
  }
}

TEST(BuildFamily, HarmonicNormalizerGrowsLikeLogK) {
  for (std::size_t k : {1000u, 10000u, 100000u, 1000000u}) {
    const auto pmf = build_family({FamilyKind::Harmonic, k, {}});
    const double ratio = *pmf.normalizer() / std::log(static_cast<double>(k));
    EXPECT_GT(ratio, 0.9);
    EXPECT_LT(ratio, 1.6);
  }
}

TEST(ValidatePmf, AcceptsAndRenormalizes) {
  const std::vector<double> ok{0.5, 0.5};
  EXPECT_EQ(validate_pmf(ok).size(), 2u);
  const std::vector<double> nearly{0.5 + 4e-10, 0.5};
  const auto pmf = validate_pmf(nearly);
  EXPECT_NEAR(pmf[0] + pmf[1], 1.0, 1e-15);
  EXPECT_FALSE(pmf.normalizer());
}

TEST(ValidatePmf, Rejects) {
  EXPECT_THROW(validate_pmf(std::vector<double>{0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(validate_pmf(std::vector<double>{1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(validate_pmf(std::vector<double>{1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(validate_pmf(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(validate_pmf(std::vector<double>{NAN, 1.0}), InvalidArgument);
}

TEST(ParseFamily, Strings) {
  const auto spec = parse_family("harmonic:1000");
  EXPECT_EQ(spec.kind, FamilyKind::Harmonic);
  EXPECT_EQ(spec.size, 1000u);
  EXPECT_EQ(parse_family("ExpGeometric:5").kind, FamilyKind::ExpGeometric);
  EXPECT_EQ(parse_family("logharmonic:7").size, 7u);
  EXPECT_THROW(parse_family("harmonic"), InvalidArgument);
  EXPECT_THROW(parse_family("harmonic:0"), InvalidArgument);
  EXPECT_THROW(parse_family("harmonic:12x"), InvalidArgument);
  EXPECT_THROW(parse_family("zipf:10"), InvalidArgument);
}

class ProbabilityFiles : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "growent_alphabet_test";
  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path write(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }
};

TEST_F(ProbabilityFiles, TextAndJson) {
  const auto txt = write("p.txt", "# comment\n0.25\n\n0.75  # tail\n");
  EXPECT_EQ(load_probabilities(txt), (std::vector<double>{0.25, 0.75}));
  const auto js = write("p.json", "[0.5, 0.25, 0.25]");
  EXPECT_EQ(load_probabilities(js), (std::vector<double>{0.5, 0.25, 0.25}));
  const auto spec = parse_family("custom:" + js.string());
  const auto pmf = build_family(spec);
  EXPECT_EQ(pmf.size(), 3u);
  EXPECT_EQ(pmf[0], 0.5);
}

TEST_F(ProbabilityFiles, Malformed) {
  EXPECT_THROW(load_probabilities(write("bad.txt", "0.5\nabc\n")), InvalidArgument);
  EXPECT_THROW(load_probabilities(write("bad.json", "{\"a\": 1}")), InvalidArgument);
  EXPECT_THROW(load_probabilities(dir_ / "missing.txt"), InvalidArgument);
}

}  // namespace
}  // namespace growent
