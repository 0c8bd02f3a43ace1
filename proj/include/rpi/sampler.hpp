#ifndef RPI_SAMPLER_HPP
#define RPI_SAMPLER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "rpi/rpi_core.hpp"

namespace rpi {

/// E and H on K coarse spacetime cells of equal four-volume Ω/K.
struct FieldConfiguration {
  Eigen::Matrix3Xd E;
  Eigen::Matrix3Xd H;

  FieldConfiguration() = default;
  explicit FieldConfiguration(Eigen::Index cells);
  FieldConfiguration(Eigen::Matrix3Xd e, Eigen::Matrix3Xd h);

  Eigen::Index cells() const { return E.cols(); }
};

struct SampleStats {
  std::size_t n = 0;
  FieldConfiguration empirical_mean;
  // Square average deviation (1/Ω)∫(F − F_class)² per field component,
  // averaged over samples.
  double norm_deviation_E = 0.0;
  double norm_deviation_H = 0.0;
  // Pooled per-component standard deviation about the empirical mean.
  double per_component_sd_E = 0.0;
  double per_component_sd_H = 0.0;
};

/// Samples per independently seeded stream. Stream b draws from
/// seed_seq{seed, b}, so output does not depend on the worker count.
inline constexpr std::size_t kSamplerBlock = 4096;

/// Draws n outputs around `classical`. Each cell component is Gaussian with
/// standard deviation sqrt(K)·δ/2, δ taken from output_uncertainty.
std::vector<FieldConfiguration> sample_outputs(const FieldConfiguration& classical, const Regiond& region,
                                               const Resolutiond& res, std::size_t n, std::uint64_t seed,
                                               unsigned threads = 1);

SampleStats empirical_stats(std::span<const FieldConfiguration> samples, const FieldConfiguration& classical);

}  // namespace rpi

#endif  // RPI_SAMPLER_HPP
