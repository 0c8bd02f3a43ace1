#ifndef RPI_PROBE_HPP
#define RPI_PROBE_HPP

#include "rpi/units.hpp"

namespace rpi {

/// Charged oscillator used as a mechanical field meter. omega = 0 is a free
/// charge. All members are in the units of the system they are used with.
struct ProbeBody {
  double Q = 1.0;
  double m = 1.0;
  double omega = 0.0;
  double motion_frequency = 1.0;
  double delta_x = 1.0;
};

/// Relative guard on |Ω² − ω²| below which the probe formulas are singular.
inline constexpr double kDegenerateFrequencyTolerance = 1e-9;

/// Δx = sqrt(ħ / (m τ |Ω² − ω²|)).
double optimal_position_error(double m, double tau, double motion_frequency, double omega,
                              const UnitSystem& system = natural_units());

/// δF = sqrt(m ħ |Ω² − ω²| / τ).
double optimal_force_error(double m, double tau, double motion_frequency, double omega,
                           const UnitSystem& system = natural_units());

/// Bohr–Rosenfeld field error ħc / (Δx · cτ · Q).
double mechanical_field_error(double delta_x, double tau, double Q,
                              const UnitSystem& system = natural_units());

struct ProbeBudget {
  double delta_x;
  double delta_F;
  double delta_E_mech;
};

/// All three quantities for a probe, using the optimal Δx (the probe's own
/// delta_x is ignored).
ProbeBudget probe_budget(const ProbeBody& probe, double tau, const UnitSystem& system = natural_units());

}  // namespace rpi

#endif  // RPI_PROBE_HPP
