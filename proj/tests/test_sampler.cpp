#include <doctest.h>

#include <cmath>

#include "rpi/errors.hpp"
#include "rpi/sampler.hpp"

using namespace rpi;

namespace {

// Ω = 1 at Δ_opt = √2 gives δ = 2, so one cell has unit standard deviation.
const Regiond kRegion(1.0, 1.0);
const Resolutiond kOpt(std::sqrt(2.0));

bool identical(const std::vector<FieldConfiguration>& a, const std::vector<FieldConfiguration>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].E != b[i].E || a[i].H != b[i].H) return false;
  return true;
}

}  // namespace

TEST_CASE("one cell at the optimum has unit spread") {
  const FieldConfiguration classical(1);
  const auto samples = sample_outputs(classical, kRegion, kOpt, 100000, 42);
  const auto st = empirical_stats(samples, classical);
  CHECK(st.n == 100000);
  CHECK(st.per_component_sd_E == doctest::Approx(1.0).epsilon(0.02));
  CHECK(st.per_component_sd_H == doctest::Approx(1.0).epsilon(0.02));
  CHECK(st.norm_deviation_E == doctest::Approx(1.0).epsilon(0.02));
  CHECK(st.norm_deviation_H == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cell spread scales with sqrt(K) and the mean is unbiased") {
  Eigen::Matrix3Xd e(3, 4), h(3, 4);
  e.setRandom();
  h.setRandom();
  const FieldConfiguration classical(e, h);
  const std::size_t n = 40000;
  const auto samples = sample_outputs(classical, kRegion, kOpt, n, 7);
  const auto st = empirical_stats(samples, classical);
  CHECK(st.per_component_sd_E == doctest::Approx(2.0).epsilon(0.02));
  const double se = 2.0 / std::sqrt(double(n));
  CHECK((st.empirical_mean.E - e).cwiseAbs().maxCoeff() < 4 * se);
  CHECK((st.empirical_mean.H - h).cwiseAbs().maxCoeff() < 4 * se);
  // the region average of K cells carries spread δ/2
  double avg2 = 0.0;
  for (const auto& s : samples) avg2 += ((s.E - e).rowwise().mean()).squaredNorm() / 3.0;
  CHECK(std::sqrt(avg2 / double(n)) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("deterministic for a seed, independent of worker count") {
  const FieldConfiguration classical(2);
  const auto a = sample_outputs(classical, kRegion, kOpt, 3 * kSamplerBlock + 17, 99, 1);
  const auto b = sample_outputs(classical, kRegion, kOpt, 3 * kSamplerBlock + 17, 99, 1);
  const auto c = sample_outputs(classical, kRegion, kOpt, 3 * kSamplerBlock + 17, 99, 4);
  CHECK(identical(a, b));
  CHECK(identical(a, c));
  const auto d = sample_outputs(classical, kRegion, kOpt, 3 * kSamplerBlock + 17, 100, 1);
  CHECK_FALSE(identical(a, d));
  // a prefix of a longer run matches the shorter run
  const auto shorter = sample_outputs(classical, kRegion, kOpt, 100, 99);
  CHECK(identical(shorter, std::vector<FieldConfiguration>(a.begin(), a.begin() + 100)));
}

TEST_CASE("different seeds agree statistically") {
  const FieldConfiguration classical(1);
  const auto s1 = empirical_stats(sample_outputs(classical, kRegion, kOpt, 50000, 1), classical);
  const auto s2 = empirical_stats(sample_outputs(classical, kRegion, kOpt, 50000, 2), classical);
  CHECK(std::abs(s1.per_component_sd_E - s2.per_component_sd_E) < 0.03);
}

TEST_CASE("independent E and H resolutions") {
  const FieldConfiguration classical(1);
  const auto st = empirical_stats(sample_outputs(classical, kRegion, Resolutiond(std::sqrt(2.0), 10.0), 40000, 3),
                                  classical);
  const double dh = std::sqrt(100.0 + 4.0 / 100.0);
  CHECK(st.per_component_sd_H == doctest::Approx(dh / 2).epsilon(0.02));
  CHECK(st.per_component_sd_E == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("edge cases") {
  const FieldConfiguration classical(1);
  CHECK_THROWS_AS(empirical_stats(std::vector<FieldConfiguration>{}, classical), ConstraintError);
  CHECK_THROWS_AS(sample_outputs(classical, kRegion, kOpt, 0, 1), ConstraintError);
  CHECK_THROWS_AS(FieldConfiguration(0), ConstraintError);
  const std::vector<FieldConfiguration> same(5, classical);
  const auto st = empirical_stats(same, classical);
  CHECK(st.norm_deviation_E == 0.0);
  CHECK(st.per_component_sd_E == 0.0);
  const auto one = empirical_stats(std::vector<FieldConfiguration>{classical}, classical);
  CHECK(one.per_component_sd_E == 0.0);
  CHECK_THROWS_AS(empirical_stats(same, FieldConfiguration(2)), ConstraintError);
}
