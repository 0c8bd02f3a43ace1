#include "rpi/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace rpi {

FieldConfiguration::FieldConfiguration(Eigen::Index cells)
    : E(Eigen::Matrix3Xd::Zero(3, cells)), H(Eigen::Matrix3Xd::Zero(3, cells)) {
  if (cells < 1) throw ConstraintError("field configuration needs at least one cell");
}

FieldConfiguration::FieldConfiguration(Eigen::Matrix3Xd e, Eigen::Matrix3Xd h) : E(std::move(e)), H(std::move(h)) {
  if (E.cols() < 1 || E.cols() != H.cols()) throw ConstraintError("E and H need the same non-zero cell count");
  if (!E.allFinite() || !H.allFinite()) throw ConstraintError("field configuration must be finite");
}

std::vector<FieldConfiguration> sample_outputs(const FieldConfiguration& classical, const Regiond& region,
                                               const Resolutiond& res, std::size_t n, std::uint64_t seed,
                                               unsigned threads) {
  if (n < 1) throw ConstraintError("sample count must be at least 1");
  const Eigen::Index cells = classical.cells();
  if (cells < 1) throw ConstraintError("classical configuration has no cells");

  const auto report = output_uncertainty(region, res);
  const double spread = std::sqrt(double(cells)) / 2.0;
  const double sd_E = spread * report.delta_E_out;
  const double sd_H = spread * report.delta_H_out;

  std::vector<FieldConfiguration> out(n);
  const std::size_t blocks = (n + kSamplerBlock - 1) / kSamplerBlock;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> gauss;
      const std::size_t end = std::min(n, (b + 1) * kSamplerBlock);
      for (std::size_t i = b * kSamplerBlock; i < end; ++i) {
        FieldConfiguration s = classical;
        for (Eigen::Index c = 0; c < cells; ++c)
          for (int r = 0; r < 3; ++r) s.E(r, c) += sd_E * gauss(rng);
        for (Eigen::Index c = 0; c < cells; ++c)
          for (int r = 0; r < 3; ++r) s.H(r, c) += sd_H * gauss(rng);
        out[i] = std::move(s);
      }
    }
  };
  const unsigned workers = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(blocks));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }
  return out;
}

SampleStats empirical_stats(std::span<const FieldConfiguration> samples, const FieldConfiguration& classical) {
  if (samples.empty()) throw ConstraintError("empirical statistics need at least one sample");
  const Eigen::Index cells = classical.cells();
  SampleStats st;
  st.n = samples.size();
  st.empirical_mean = FieldConfiguration(cells);
  const double components = 3.0 * double(cells);
  for (const auto& s : samples) {
    if (s.cells() != cells) throw ConstraintError("sample cell count differs from the classical configuration");
    st.empirical_mean.E += s.E;
    st.empirical_mean.H += s.H;
    st.norm_deviation_E += (s.E - classical.E).squaredNorm() / components;
    st.norm_deviation_H += (s.H - classical.H).squaredNorm() / components;
  }
  const double n = double(st.n);
  st.empirical_mean.E /= n;
  st.empirical_mean.H /= n;
  st.norm_deviation_E /= n;
  st.norm_deviation_H /= n;
  if (st.n > 1) {
    double ve = 0.0, vh = 0.0;
    for (const auto& s : samples) {
      ve += (s.E - st.empirical_mean.E).squaredNorm();
      vh += (s.H - st.empirical_mean.H).squaredNorm();
    }
    st.per_component_sd_E = std::sqrt(ve / (components * (n - 1.0)));
    st.per_component_sd_H = std::sqrt(vh / (components * (n - 1.0)));
  }
  return st;
}

}  // namespace rpi
