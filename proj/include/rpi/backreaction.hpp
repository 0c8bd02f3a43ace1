#ifndef RPI_BACKREACTION_HPP
#define RPI_BACKREACTION_HPP

#include <cstdint>
#include <optional>
#include <string_view>

#include "rpi/units.hpp"

namespace rpi {

// Functions below take and return values in the units of `system`.

/// Coulomb estimate Q/l² of the probe's own field inside the region.
double proper_field(double Q, double l, const UnitSystem& system = natural_units());

/// Undisturbing-measurement budget ħc/(Δx·cτ·Q) + Q/l². Requires Δx ≤ l.
double total_uncertainty(double delta_x, double tau, double Q, double l,
                         const UnitSystem& system = natural_units());

/// Charge balancing the mechanical and proper-field terms.
double optimal_charge(double l, double tau, double delta_x, const UnitSystem& system = natural_units());

/// 2·sqrt(ħc/(Δx·cτ·l²)), the budget at the optimal charge.
double optimal_uncertainty(double l, double tau, double delta_x, const UnitSystem& system = natural_units());

/// RPI minimum for one causal cell of size lambda: 2·sqrt(ħ/(τ·λ³)).
double elementary_uncertainty(double lambda, double tau, const UnitSystem& system = natural_units());

struct ChargeRule {
  double delta_x_used;
  double Q_opt;
  bool quantized;
};

/// Largest admissible Δx given that the optimal charge cannot drop below e:
/// l/Δx = max(1, α·cτ/l).
ChargeRule quantized_charge_rule(double l, double tau, const UnitSystem& system = natural_units());

enum class LimitRegime { Generic, ChargeQuantized, Acausal };

std::string_view to_string(LimitRegime r);

struct LimitBreakdown {
  LimitRegime regime;
  double rho;           // l / (cτ)
  double delta_E_abs;
  double Q_opt;         // per causal cell in the acausal regime
  double delta_x_used;
  double E_meas;        // proper field at the optimum
  double lambda;        // causal cell size
  std::uint64_t subregion_count;
  bool charge_clamped;  // Q_opt was raised to e
};

/// Piecewise absolute limit on undisturbing field measurement in a region
/// of size l and duration tau.
LimitBreakdown absolute_limit(double l, double tau, const UnitSystem& system = natural_units());

LimitRegime limit_regime(double l, double tau, const UnitSystem& system = natural_units());

struct MeasurementPlan {
  double l;
  double tau;
  std::optional<double> delta_x;  // defaults to the charge rule; may only be lowered
  bool enforce_charge_quantization = true;
  UnitSystem system = natural_units();
};

/// Budget for a concrete plan. With the default Δx this reproduces
/// absolute_limit.
LimitBreakdown evaluate_plan(const MeasurementPlan& plan);

}  // namespace rpi

#endif  // RPI_BACKREACTION_HPP
