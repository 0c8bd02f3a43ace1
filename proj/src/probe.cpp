#include "rpi/probe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpi/errors.hpp"

namespace rpi {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConstraintError(std::string(name) + " must be positive");
}

// |Ω² − ω²| in natural units, rejecting resonance.
double frequency_gap(double motion_frequency, double omega, const UnitSystem& s) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConstraintError("omega must be non-negative");
  if (!(motion_frequency >= 0.0) || !std::isfinite(motion_frequency))
    throw ConstraintError("motion frequency must be non-negative");
  const double big = to_natural(Quantity::Frequency, motion_frequency, s);
  const double small = to_natural(Quantity::Frequency, omega, s);
  const double gap = std::abs(big * big - small * small);
  const double scale = std::max(big * big, small * small);
  if (gap == 0.0 || gap < kDegenerateFrequencyTolerance * scale)
    throw ConstraintError("degenerate frequencies: motion frequency equals probe eigenfrequency");
  return gap;
}

}  // namespace

double optimal_position_error(double m, double tau, double motion_frequency, double omega,
                              const UnitSystem& system) {
  require_positive(m, "mass m");
  require_positive(tau, "duration tau");
  const double gap = frequency_gap(motion_frequency, omega, system);
  const double m_n = to_natural(Quantity::Mass, m, system);
  const double tau_n = to_natural(Quantity::Time, tau, system);
  return from_natural(Quantity::Length, std::sqrt(1.0 / (m_n * tau_n * gap)), system);
}

double optimal_force_error(double m, double tau, double motion_frequency, double omega,
                           const UnitSystem& system) {
  require_positive(m, "mass m");
  require_positive(tau, "duration tau");
  const double gap = frequency_gap(motion_frequency, omega, system);
  const double m_n = to_natural(Quantity::Mass, m, system);
  const double tau_n = to_natural(Quantity::Time, tau, system);
  return from_natural(Quantity::Force, std::sqrt(m_n * gap / tau_n), system);
}

double mechanical_field_error(double delta_x, double tau, double Q, const UnitSystem& system) {
  require_positive(delta_x, "position error delta_x");
  require_positive(tau, "duration tau");
  require_positive(Q, "charge Q");
  const double dx_n = to_natural(Quantity::Length, delta_x, system);
  const double tau_n = to_natural(Quantity::Time, tau, system);
  const double q_n = to_natural(Quantity::Charge, Q, system);
  return from_natural(Quantity::Field, 1.0 / (dx_n * tau_n * q_n), system);
}

ProbeBudget probe_budget(const ProbeBody& probe, double tau, const UnitSystem& system) {
  ProbeBudget b{};
  b.delta_x = optimal_position_error(probe.m, tau, probe.motion_frequency, probe.omega, system);
  b.delta_F = optimal_force_error(probe.m, tau, probe.motion_frequency, probe.omega, system);
  b.delta_E_mech = mechanical_field_error(b.delta_x, tau, probe.Q, system);
  return b;
}

}  // namespace rpi
