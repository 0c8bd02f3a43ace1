#include "rpi/engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <thread>

#include "rpi/complex_symmetric_ldlt.hpp"

namespace rpi::engine {

double LatticeSpec::four_volume() const {
  double s = 0.0;
  for (double w : mode_volume_weights) s += w;
  return s;
}

Eigen::Index GaussianModel::readout_size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.readout_map.rows();
  return n;
}

Eigen::Index GaussianModel::dof_size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.readout_map.cols();
  return n;
}

std::vector<BoxShell> box_shells(double length, int count) {
  if (count < 1) return {};
  std::vector<BoxShell> shells;
  for (int radius = 2;; radius *= 2) {
    std::map<int, int> counts;
    const int r2 = radius * radius;
    for (int x = -radius; x <= radius; ++x)
      for (int y = -radius; y <= radius; ++y)
        for (int z = -radius; z <= radius; ++z) {
          const int s = x * x + y * y + z * z;
          if (s > 0 && s <= r2) ++counts[s];
        }
    if (static_cast<int>(counts.size()) < count) continue;
    for (const auto& [s, n] : counts) {
      if (static_cast<int>(shells.size()) == count) break;
      shells.push_back({s, n, 2.0 * std::numbers::pi * std::sqrt(double(s)) / length});
    }
    return shells;
  }
}

namespace {

void check_lattice(int mode_count, int time_steps) {
  if (mode_count < 1 || mode_count > kMaxModes)
    throw ConstraintError("mode count must lie in [1, " + std::to_string(kMaxModes) + "]");
  if (time_steps < 2 || time_steps > kMaxTimeSteps)
    throw ConstraintError("time steps must lie in [2, " + std::to_string(kMaxTimeSteps) + "]");
}

ModeBlock make_block(double frequency, double weight, double duration, int steps, double source) {
  const int links = steps;
  const int dof = steps - 1;
  const double eps = duration / steps;
  const double v = weight / steps;

  ModeBlock b;
  b.frequency = frequency;
  b.volume_weight = weight;
  b.readout_map = Eigen::MatrixXd::Zero(links, dof);
  Eigen::MatrixXd midpoint = Eigen::MatrixXd::Zero(links, dof);
  for (int j = 0; j < links; ++j) {
    // link j joins slices j and j+1; slices 0 and N are pinned
    if (j >= 1) {
      b.readout_map(j, j - 1) = 1.0 / eps;
      midpoint(j, j - 1) = 0.5 * frequency;
    }
    if (j + 1 <= dof) {
      b.readout_map(j, j) = -1.0 / eps;
      midpoint(j, j) = 0.5 * frequency;
    }
  }
  b.action = v * (b.readout_map.transpose() * b.readout_map - midpoint.transpose() * midpoint);
  b.source = Eigen::VectorXd::Constant(dof, v * source);
  b.cell_volumes = Eigen::VectorXd::Constant(links, v);
  return b;
}

}  // namespace

GaussianModel build_mode_model(const Regiond& region, std::span<const double> frequencies,
                               std::span<const double> volume_weights, int time_steps,
                               const std::optional<std::vector<double>>& classical_source) {
  const int modes = static_cast<int>(frequencies.size());
  check_lattice(modes, time_steps);
  if (volume_weights.size() != frequencies.size())
    throw ConstraintError("one volume weight per mode frequency required");
  if (classical_source && classical_source->size() != frequencies.size())
    throw ConstraintError("one classical source amplitude per mode required");

  GaussianModel model;
  model.lattice.time_steps = time_steps;
  model.lattice.duration = region.tau();
  model.lattice.length = region.l();
  double total = 0.0;
  for (int k = 0; k < modes; ++k) {
    if (!(frequencies[k] >= 0.0) || !std::isfinite(frequencies[k]))
      throw ConstraintError("mode frequencies must be finite and non-negative");
    if (!(volume_weights[k] > 0.0)) throw ConstraintError("mode volume weights must be positive");
    total += volume_weights[k];
  }
  if (std::abs(total - region.four_volume()) > 1e-12 * region.four_volume())
    throw ConstraintError("mode volume weights must sum to the region four-volume");

  for (int k = 0; k < modes; ++k) {
    model.lattice.mode_frequencies.push_back(frequencies[k]);
    model.lattice.mode_volume_weights.push_back(volume_weights[k]);
    const double s = classical_source ? (*classical_source)[k] : 0.0;
    model.blocks.push_back(make_block(frequencies[k], volume_weights[k], region.tau(), time_steps, s));
  }
  return model;
}

GaussianModel build_mode_model(const Regiond& region, int mode_count, int time_steps,
                               const std::optional<std::vector<double>>& classical_source) {
  check_lattice(mode_count, time_steps);
  const auto shells = box_shells(region.l(), mode_count);
  double lattice_total = 0.0;
  for (const auto& s : shells) lattice_total += s.lattice_count;
  std::vector<double> freqs, weights;
  for (const auto& s : shells) {
    freqs.push_back(s.frequency);
    weights.push_back(region.four_volume() * s.lattice_count / lattice_total);
  }
  // renormalise so the weights sum to Ω exactly in floating point
  double sum = 0.0;
  for (double w : weights) sum += w;
  weights.back() += region.four_volume() - sum;
  return build_mode_model(region, freqs, weights, time_steps, classical_source);
}

WeightSpec::WeightSpec(double delta_, double four_volume_, Eigen::VectorXd target_)
    : delta(delta_), four_volume(four_volume_), target(std::move(target_)) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConstraintError("weight resolution must be positive and finite");
  if (!(four_volume > 0.0) || !std::isfinite(four_volume)) throw ConstraintError("four-volume must be positive");
  if (!target.allFinite()) throw ConstraintError("weight target must be finite");
}

namespace {

CombinedForm combine_into(const ModeBlock& block, const WeightSpec& weight, std::size_t mode_index,
                          ComplexSymmetricLdlt<Eigen::MatrixXcd>& ldlt) {
  CombinedForm f;
  f.weight_diagonal = block.cell_volumes / (weight.four_volume * weight.delta * weight.delta);
  const Eigen::MatrixXd damping =
      2.0 * block.readout_map.transpose() * f.weight_diagonal.asDiagonal() * block.readout_map;

  Eigen::LLT<Eigen::MatrixXd> damping_llt(damping);
  if (damping_llt.info() != Eigen::Success)
    throw NumericalError("weight leaves an undamped direction in mode " + std::to_string(mode_index) +
                         " (frequency " + std::to_string(block.frequency) + "); integral diverges");

  f.quadratic_form = damping.cast<std::complex<double>>() - std::complex<double>(0.0, 1.0) * block.action;
  ldlt.compute(f.quadratic_form);
  if (ldlt.pivot_ratio() > kConditionLimit)
    throw NumericalError("combined form of mode " + std::to_string(mode_index) + " is ill-conditioned");
  const double n = double(block.readout_map.cols());
  f.log_normalization = 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * ldlt.log_determinant();
  return f;
}

struct BlockSolution {
  CombinedForm form;
  ComplexSymmetricLdlt<Eigen::MatrixXcd> ldlt;
};

BlockSolution solve_block(const ModeBlock& block, const WeightSpec& weight, std::size_t k) {
  BlockSolution s;
  s.form = combine_into(block, weight, k, s.ldlt);
  return s;
}

}  // namespace

CombinedForm combine(const ModeBlock& block, const WeightSpec& weight, std::size_t mode_index) {
  ComplexSymmetricLdlt<Eigen::MatrixXcd> ldlt;
  return combine_into(block, weight, mode_index, ldlt);
}

namespace {

Eigen::VectorXd readout_or_zero(const Eigen::VectorXd& readout, Eigen::Index size) {
  if (readout.size() == 0) return Eigen::VectorXd::Zero(size);
  if (readout.size() != size)
    throw ConstraintError("readout has " + std::to_string(readout.size()) + " components, model expects " +
                          std::to_string(size));
  return readout;
}

}  // namespace

std::complex<double> log_restricted_amplitude(const GaussianModel& model, const WeightSpec& weight,
                                              const Eigen::VectorXd& readout) {
  const Eigen::VectorXd e = readout_or_zero(readout, model.readout_size());
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> total = 0.0;
  Eigen::Index offset = 0;
  for (std::size_t k = 0; k < model.blocks.size(); ++k) {
    const auto& block = model.blocks[k];
    const Eigen::Index m = block.readout_map.rows();
    const auto sol = solve_block(block, weight, k);
    const Eigen::VectorXd ek = e.segment(offset, m);
    const Eigen::VectorXd be = sol.form.weight_diagonal.cwiseProduct(ek);
    const Eigen::VectorXcd lin = (2.0 * block.readout_map.transpose() * be).cast<std::complex<double>>() +
                                 i * block.source.cast<std::complex<double>>();
    const Eigen::VectorXcd x = sol.ldlt.solve(lin);
    total += sol.form.log_normalization + 0.5 * (lin.transpose() * x).value() - ek.dot(be);
    offset += m;
  }
  return total;
}

std::complex<double> restricted_amplitude(const GaussianModel& model, const WeightSpec& weight,
                                          const Eigen::VectorXd& readout) {
  return std::exp(log_restricted_amplitude(model, weight, readout));
}

Eigen::MatrixXd OutputDistribution::covariance() const {
  const Eigen::Index n = mean.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index offset = 0;
  for (const auto& b : covariance_blocks) {
    c.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return c;
}

double OutputDistribution::aggregated_variance() const {
  double s = 0.0;
  Eigen::Index offset = 0;
  for (const auto& b : covariance_blocks) {
    s += cell_volumes.segment(offset, b.rows()).dot(b.diagonal());
    offset += b.rows();
  }
  return 4.0 * s / (four_volume * double(cell_volumes.size()));
}

OutputDistribution output_distribution(const GaussianModel& model, const WeightSpec& weight) {
  OutputDistribution out;
  out.four_volume = weight.four_volume;
  out.mean.resize(model.readout_size());
  out.cell_volumes.resize(model.readout_size());
  Eigen::Index offset = 0;
  for (std::size_t k = 0; k < model.blocks.size(); ++k) {
    const auto& block = model.blocks[k];
    const Eigen::Index m = block.readout_map.rows();
    // validates convergence of the amplitude for this weight
    const auto sol = solve_block(block, weight, k);
    const auto& w = sol.form.weight_diagonal;

    // With s = (q + q')/2 and r = q − q' in |U(e)|², the r integral leaves
    // s ~ N(−K⁻¹J, K⁻¹ M K⁻¹), M = DᵀBD, and e | s ~ N(D s, (4B)⁻¹). This
    // avoids the cancellation in 4B − 8 Re(B D A⁻¹ Dᵀ B) at fine resolution.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block.action);
    if (!(lu.rcond() >= 1.0 / kConditionLimit))
      throw NumericalError("action of mode " + std::to_string(k) + " is singular: frequency resonates with the lattice");
    const Eigen::MatrixXd x = lu.solve(block.readout_map.transpose());
    const Eigen::MatrixXd damping = block.readout_map.transpose() * w.asDiagonal() * block.readout_map;
    Eigen::MatrixXd cov = x.transpose() * damping * x;
    cov.diagonal() += (4.0 * w).cwiseInverse();
    cov = 0.5 * (cov + cov.transpose()).eval();
    if (!cov.allFinite())
      throw NumericalError("readout covariance of mode " + std::to_string(k) + " overflows");

    out.mean.segment(offset, m) = -block.readout_map * lu.solve(block.source);
    out.cell_volumes.segment(offset, m) = block.cell_volumes;
    out.covariance_blocks.push_back(std::move(cov));
    offset += m;
  }
  return out;
}

Eigen::VectorXd classical_readout(const GaussianModel& model) {
  Eigen::VectorXd out(model.readout_size());
  Eigen::Index offset = 0;
  for (const auto& block : model.blocks) {
    const Eigen::Index m = block.readout_map.rows();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block.action);
    if (!lu.isInvertible()) throw NumericalError("action is singular: mode frequency resonates with the lattice");
    const Eigen::VectorXd q = lu.solve(-block.source);
    out.segment(offset, m) = block.readout_map * q;
    offset += m;
  }
  return out;
}

std::vector<SweepPoint> variance_sweep(const GaussianModel& model, std::span<const double> deltas,
                                       unsigned threads) {
  const double omega = model.lattice.four_volume();
  std::vector<SweepPoint> out(deltas.size());
  std::vector<std::exception_ptr> errors(deltas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < deltas.size(); i = next++) {
      try {
        out[i] = {deltas[i], output_distribution(model, WeightSpec(deltas[i], omega)).aggregated_variance()};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(1, deltas.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> log_sweep(double four_volume, double decades, int points_per_decade) {
  if (!(decades > 0.0) || points_per_decade < 1) throw ConstraintError("sweep needs positive decades");
  const double centre = std::sqrt(2.0 / four_volume);
  const int count = static_cast<int>(std::lround(decades * points_per_decade)) + 1;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double exponent = -0.5 * decades + decades * double(i) / double(count - 1);
    out.push_back(centre * std::pow(10.0, exponent));
  }
  return out;
}

VarianceFit fit_variance_law(std::span<const SweepPoint> sweep, double four_volume) {
  if (sweep.empty()) throw ConstraintError("empty sweep");
  double lo = sweep.front().delta, hi = lo;
  for (const auto& p : sweep) {
    lo = std::min(lo, p.delta);
    hi = std::max(hi, p.delta);
  }
  if (hi == lo) throw NumericalError("degenerate sweep: all resolutions equal");
  if (sweep.size() < 8) throw ConstraintError("variance fit needs at least 8 sweep points");
  if (hi / lo < 1e4 * (1.0 - 1e-9)) throw ConstraintError("variance fit needs a sweep spanning 4 decades");

  // Excess below 1e-3 of the total is dominated by cancellation.
  std::vector<double> xs, ys;
  for (const auto& p : sweep) {
    const double excess = p.variance - p.delta * p.delta;
    if (excess > 1e-3 * p.variance) {
      xs.push_back(std::log(p.delta));
      ys.push_back(std::log(excess * four_volume * four_volume));
    }
  }
  if (xs.size() < 2) throw NumericalError("sweep does not resolve the quantum term");

  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw NumericalError("degenerate sweep: resolvable points share one resolution");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  return {std::exp(intercept), -slope, std::sqrt(ss / n), static_cast<int>(xs.size())};
}

}  // namespace rpi::engine
