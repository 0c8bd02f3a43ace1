#ifndef RPI_ENGINE_HPP
#define RPI_ENGINE_HPP

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "rpi/rpi_core.hpp"

// Finite-dimensional model of the measurement-weighted field path integral.
//
// The free field in a periodic box of size l is a set of independent
// transverse oscillator modes. Each mode amplitude q(t) is time sliced on
// N_t links of length ε = τ/N_t with pinned endpoints q_0 = q_N = 0, leaving
// N_t − 1 interior degrees of freedom. On every link the mode carries an
// electric readout E_j = −(q_{j+1} − q_j)/ε and a midpoint magnetic
// amplitude H_j = ω (q_j + q_{j+1})/2; the action is
//
//   S = Σ_j v (E_j² − H_j²)/2 + Σ_i J_i q_i,
//
// with v the four-volume of the link cell. A resolution Δ adds the weight
// W = Σ_j v (E_j − e_j)² / (Ω Δ²) around the readout e, and the amplitude
// is the Gaussian integral of exp(iS − W) over the interior amplitudes.
namespace rpi::engine {

inline constexpr int kMaxModes = 64;
inline constexpr int kMaxTimeSteps = 512;
inline constexpr double kConditionLimit = 1e12;

struct LatticeSpec {
  int time_steps = 2;
  double duration = 1.0;
  double length = 1.0;
  std::vector<double> mode_frequencies;
  std::vector<double> mode_volume_weights;  // sums to the four-volume

  double four_volume() const;
};

/// One distinct |k| shell of the periodic box.
struct BoxShell {
  int norm_squared;   // |n|² of the integer wave vector
  int lattice_count;  // number of integer vectors on the shell
  double frequency;   // 2π|n|/l
};

/// The first `count` non-zero shells in order of increasing frequency.
std::vector<BoxShell> box_shells(double length, int count);

struct ModeBlock {
  double frequency = 0.0;
  double volume_weight = 0.0;
  Eigen::MatrixXd action;       // S = ½ qᵀ·action·q + sourceᵀq
  Eigen::VectorXd source;
  Eigen::MatrixXd readout_map;  // E = readout_map · q
  Eigen::VectorXd cell_volumes;
};

struct GaussianModel {
  LatticeSpec lattice;
  std::vector<ModeBlock> blocks;

  Eigen::Index readout_size() const;
  Eigen::Index dof_size() const;
};

/// Box modes with degeneracy-proportional volume weights. The optional
/// source holds one constant driving amplitude per mode.
GaussianModel build_mode_model(const Regiond& region, int mode_count, int time_steps,
                               const std::optional<std::vector<double>>& classical_source = std::nullopt);

/// Modes with explicit frequencies and volume weights (weights must sum to
/// the region four-volume).
GaussianModel build_mode_model(const Regiond& region, std::span<const double> frequencies,
                               std::span<const double> volume_weights, int time_steps,
                               const std::optional<std::vector<double>>& classical_source = std::nullopt);

struct WeightSpec {
  double delta;
  double four_volume;
  Eigen::VectorXd target;  // readout at which the amplitude is evaluated; empty means zero

  WeightSpec(double delta, double four_volume, Eigen::VectorXd target = {});
};

/// Closed-form exponent of one mode for a given weight: the integral is
/// ∫ exp(−½ qᵀ A q + bᵀq + c) dq with b, c depending on the readout.
struct CombinedForm {
  Eigen::MatrixXcd quadratic_form;      // A = 2 Dᵀ B D − i K
  Eigen::VectorXd weight_diagonal;      // B
  std::complex<double> log_normalization;  // (n/2)·log 2π − ½·log det A
};

CombinedForm combine(const ModeBlock& block, const WeightSpec& weight, std::size_t mode_index = 0);

std::complex<double> log_restricted_amplitude(const GaussianModel& model, const WeightSpec& weight,
                                              const Eigen::VectorXd& readout);
std::complex<double> restricted_amplitude(const GaussianModel& model, const WeightSpec& weight,
                                          const Eigen::VectorXd& readout);
inline std::complex<double> restricted_amplitude(const GaussianModel& model, const WeightSpec& weight) {
  return restricted_amplitude(model, weight, weight.target);
}

/// Readout law P(e) = |U(e)|², exactly Gaussian. The covariance is block
/// diagonal over modes and stored per block.
struct OutputDistribution {
  Eigen::VectorXd mean;
  std::vector<Eigen::MatrixXd> covariance_blocks;
  Eigen::VectorXd cell_volumes;
  double four_volume = 0.0;
  bool is_gaussian = true;

  Eigen::MatrixXd covariance() const;

  /// Square spread δ² per readout cell, 4·v·Var/Ω, averaged over cells;
  /// equals Δ² + 4/(Ω²Δ²) for an ideal local field.
  double aggregated_variance() const;
};

OutputDistribution output_distribution(const GaussianModel& model, const WeightSpec& weight);

/// Readout of the stationary action path: −D·K⁻¹·J per mode.
Eigen::VectorXd classical_readout(const GaussianModel& model);

struct SweepPoint {
  double delta;
  double variance;
};

/// Aggregated variance for each resolution, evaluated on up to `threads`
/// workers. Results are in input order.
std::vector<SweepPoint> variance_sweep(const GaussianModel& model, std::span<const double> deltas,
                                       unsigned threads = 1);

/// `points` resolutions log-spaced over `decades` centred on sqrt(2/Ω).
std::vector<double> log_sweep(double four_volume, double decades, int points_per_decade = 5);

struct VarianceFit {
  double C;
  double quantum_exponent;
  double residual;  // RMS of log residuals
  int points_used;
};

/// Fits variance − Δ² = C / (Ω² Δ^p) on the points where the excess is
/// resolvable. Needs ≥ 8 points spanning ≥ 4 decades.
VarianceFit fit_variance_law(std::span<const SweepPoint> sweep, double four_volume);

}  // namespace rpi::engine

#endif  // RPI_ENGINE_HPP
