#include "rpi/backreaction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpi/errors.hpp"

namespace rpi {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConstraintError(std::string(name) + " must be positive");
}

// Natural-unit kernels. Lengths and times are lengths, charges are
// dimensionless, fields are length⁻².

double total_n(double dx, double tau, double q, double l) { return 1.0 / (dx * tau * q) + q / (l * l); }

double optimal_charge_n(double l, double tau, double dx) { return std::sqrt(l * l / (dx * tau)); }

double optimal_uncertainty_n(double l, double tau, double dx) { return 2.0 / std::sqrt(dx * tau * l * l); }

void require_dx_within(double dx, double l) {
  // Relative slack so that Δx = l computed through unit conversion passes.
  if (dx > l * (1.0 + 1e-12))
    throw ConstraintError("position error delta_x exceeds the region size l");
}

std::uint64_t cell_count(double l, double lambda) {
  const double ratio = l / lambda;
  const double per_side = std::ceil(ratio * (1.0 - 1e-12));
  if (per_side > 2.0e6) throw ConstraintError("acausal decomposition exceeds 2e6 cells per side");
  const auto n = static_cast<std::uint64_t>(per_side < 1.0 ? 1.0 : per_side);
  return n * n * n;
}

struct NaturalInputs {
  double l;
  double tau;
  double e;
  double alpha;
};

NaturalInputs natural(double l, double tau, const UnitSystem& s) {
  require_positive(l, "region length l");
  require_positive(tau, "duration tau");
  return {to_natural(Quantity::Length, l, s), to_natural(Quantity::Time, tau, s),
          to_natural(Quantity::Charge, s.e, s), s.alpha};
}

LimitRegime regime_of(double rho, double alpha) {
  if (rho >= 1.0) return LimitRegime::Acausal;
  if (rho < alpha) return LimitRegime::ChargeQuantized;
  return LimitRegime::Generic;
}

// Δx allowed by the charge rule (causal case) or by the causal cell size.
double default_delta_x(const NaturalInputs& in, LimitRegime regime) {
  if (regime == LimitRegime::Acausal) return in.tau;
  return in.l / std::max(1.0, in.alpha * in.tau / in.l);
}

LimitBreakdown to_units(LimitBreakdown b, const UnitSystem& s) {
  b.delta_E_abs = from_natural(Quantity::Field, b.delta_E_abs, s);
  b.E_meas = from_natural(Quantity::Field, b.E_meas, s);
  b.Q_opt = from_natural(Quantity::Charge, b.Q_opt, s);
  b.delta_x_used = from_natural(Quantity::Length, b.delta_x_used, s);
  b.lambda = from_natural(Quantity::Length, b.lambda, s);
  return b;
}

}  // namespace

std::string_view to_string(LimitRegime r) {
  switch (r) {
    case LimitRegime::Generic:
      return "Generic";
    case LimitRegime::ChargeQuantized:
      return "ChargeQuantized";
    case LimitRegime::Acausal:
      return "Acausal";
  }
  return "?";
}

double proper_field(double Q, double l, const UnitSystem& system) {
  require_positive(Q, "charge Q");
  require_positive(l, "region length l");
  const double q = to_natural(Quantity::Charge, Q, system);
  const double ln = to_natural(Quantity::Length, l, system);
  return from_natural(Quantity::Field, q / (ln * ln), system);
}

double total_uncertainty(double delta_x, double tau, double Q, double l, const UnitSystem& system) {
  require_positive(delta_x, "position error delta_x");
  require_positive(Q, "charge Q");
  const auto in = natural(l, tau, system);
  const double dx = to_natural(Quantity::Length, delta_x, system);
  require_dx_within(dx, in.l);
  const double q = to_natural(Quantity::Charge, Q, system);
  return from_natural(Quantity::Field, total_n(dx, in.tau, q, in.l), system);
}

double optimal_charge(double l, double tau, double delta_x, const UnitSystem& system) {
  require_positive(delta_x, "position error delta_x");
  const auto in = natural(l, tau, system);
  const double dx = to_natural(Quantity::Length, delta_x, system);
  require_dx_within(dx, in.l);
  return from_natural(Quantity::Charge, optimal_charge_n(in.l, in.tau, dx), system);
}

double optimal_uncertainty(double l, double tau, double delta_x, const UnitSystem& system) {
  require_positive(delta_x, "position error delta_x");
  const auto in = natural(l, tau, system);
  const double dx = to_natural(Quantity::Length, delta_x, system);
  require_dx_within(dx, in.l);
  return from_natural(Quantity::Field, optimal_uncertainty_n(in.l, in.tau, dx), system);
}

double elementary_uncertainty(double lambda, double tau, const UnitSystem& system) {
  const auto in = natural(lambda, tau, system);
  return from_natural(Quantity::Field, 2.0 / std::sqrt(in.tau * in.l * in.l * in.l), system);
}

ChargeRule quantized_charge_rule(double l, double tau, const UnitSystem& system) {
  const auto in = natural(l, tau, system);
  const double ratio = std::max(1.0, in.alpha * in.tau / in.l);
  const double dx = in.l / ratio;
  ChargeRule r{};
  r.delta_x_used = from_natural(Quantity::Length, dx, system);
  r.Q_opt = from_natural(Quantity::Charge, optimal_charge_n(in.l, in.tau, dx), system);
  r.quantized = in.l / in.tau < in.alpha;
  return r;
}

LimitRegime limit_regime(double l, double tau, const UnitSystem& system) {
  const auto in = natural(l, tau, system);
  return regime_of(in.l / in.tau, in.alpha);
}

LimitBreakdown absolute_limit(double l, double tau, const UnitSystem& system) {
  const auto in = natural(l, tau, system);
  LimitBreakdown b{};
  b.rho = in.l / in.tau;
  b.regime = regime_of(b.rho, in.alpha);
  b.delta_x_used = default_delta_x(in, b.regime);
  switch (b.regime) {
    case LimitRegime::Acausal: {
      // Independent measurements in causal cells of size cτ.
      b.lambda = in.tau;
      b.Q_opt = optimal_charge_n(b.lambda, in.tau, b.delta_x_used);
      if (b.Q_opt < in.e) {
        b.Q_opt = in.e;
        b.charge_clamped = true;
      }
      b.delta_E_abs = b.charge_clamped ? total_n(b.delta_x_used, in.tau, b.Q_opt, b.lambda)
                                       : 2.0 / (in.tau * in.tau);
      break;
    }
    case LimitRegime::Generic:
      b.lambda = in.l;
      b.Q_opt = optimal_charge_n(in.l, in.tau, b.delta_x_used);
      b.delta_E_abs = 2.0 / std::sqrt(in.tau * in.l * in.l * in.l);
      break;
    case LimitRegime::ChargeQuantized:
      b.lambda = in.l;
      b.Q_opt = in.e;
      b.delta_E_abs = 2.0 * in.e / (in.l * in.l);
      break;
  }
  b.E_meas = b.Q_opt / (b.lambda * b.lambda);
  b.subregion_count = cell_count(in.l, b.lambda);
  return to_units(b, system);
}

LimitBreakdown evaluate_plan(const MeasurementPlan& plan) {
  const auto in = natural(plan.l, plan.tau, plan.system);
  LimitBreakdown b{};
  b.rho = in.l / in.tau;
  b.regime = regime_of(b.rho, in.alpha);
  b.lambda = b.regime == LimitRegime::Acausal ? in.tau : in.l;
  double dx = default_delta_x(in, b.regime);
  if (plan.delta_x) {
    require_positive(*plan.delta_x, "position error delta_x");
    const double requested = to_natural(Quantity::Length, *plan.delta_x, plan.system);
    if (requested > dx * (1.0 + 1e-12))
      throw ConstraintError("delta_x may only be lowered below the charge-rule default");
    dx = requested;
  }
  b.delta_x_used = dx;
  b.Q_opt = optimal_charge_n(b.lambda, in.tau, dx);
  if (plan.enforce_charge_quantization && b.Q_opt < in.e * (1.0 - 1e-12)) {
    b.Q_opt = in.e;
    b.charge_clamped = true;
  }
  b.delta_E_abs = total_n(dx, in.tau, b.Q_opt, b.lambda);
  b.E_meas = b.Q_opt / (b.lambda * b.lambda);
  b.subregion_count = cell_count(in.l, b.lambda);
  return to_units(b, plan.system);
}

}  // namespace rpi
