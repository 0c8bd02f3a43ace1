#ifndef RPI_RPI_CORE_HPP
#define RPI_RPI_CORE_HPP

#include <cmath>
#include <string>
#include <string_view>

#include "rpi/errors.hpp"
#include "rpi/units.hpp"

namespace rpi {

/// Spacetime measurement box of spatial size l and duration tau, both in
/// natural units (time measured as c·t).
template <typename Scalar>
class Region {
 public:
  Region(Scalar l, Scalar tau) : l_(l), tau_(tau) {
    if (!(l > Scalar(0)) || !std::isfinite(l)) throw ConstraintError("region length l must be positive");
    if (!(tau > Scalar(0)) || !std::isfinite(tau)) throw ConstraintError("region duration tau must be positive");
  }

  /// Region given in the units of `system`.
  static Region from_units(Scalar l, Scalar tau, const UnitSystem& system) {
    return Region(Scalar(to_natural(Quantity::Length, l, system)),
                  Scalar(to_natural(Quantity::Time, tau, system)));
  }

  Scalar l() const { return l_; }
  Scalar tau() const { return tau_; }
  Scalar four_volume() const { return tau_ * l_ * l_ * l_; }
  Scalar causal_ratio() const { return l_ / tau_; }

 private:
  Scalar l_;
  Scalar tau_;
};

using Regiond = Region<double>;

/// Device resolutions Δ of the weight functional for the E and H channels.
template <typename Scalar>
class Resolution {
 public:
  explicit Resolution(Scalar delta) : Resolution(delta, delta) {}
  Resolution(Scalar delta_E, Scalar delta_H) : delta_E_(delta_E), delta_H_(delta_H) {
    check(delta_E, "delta_E");
    check(delta_H, "delta_H");
  }

  Scalar delta_E() const { return delta_E_; }
  Scalar delta_H() const { return delta_H_; }

 private:
  static void check(Scalar v, std::string_view name) {
    if (!(v > Scalar(0)) || !std::isfinite(v))
      throw ConstraintError(std::string(name) + " must be positive and finite (zero-width weight functional)");
  }

  Scalar delta_E_;
  Scalar delta_H_;
};

using Resolutiond = Resolution<double>;

enum class Regime { Classical, Quantum, Borderline };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Classical:
      return "Classical";
    case Regime::Quantum:
      return "Quantum";
    case Regime::Borderline:
      return "Borderline";
  }
  return "?";
}

template <typename Scalar>
struct UncertaintyReport {
  Scalar delta_E_out;
  Scalar delta_H_out;
  Regime regime;    // E channel
  Regime regime_H;  // H channel
  Scalar delta_opt;
  Scalar delta_min;
};

inline constexpr double kDefaultRegimeThreshold = 10.0;

/// Output spread of one field channel: δ² = Δ² + 4/(Ω²Δ²).
template <typename Scalar>
Scalar output_spread(Scalar four_volume, Scalar delta_in) {
  const Scalar q = Scalar(2) / (four_volume * delta_in);
  return std::sqrt(delta_in * delta_in + q * q);
}

/// Resolution minimizing the output spread, sqrt(2/Ω).
template <typename Scalar>
Scalar optimal_delta(const Region<Scalar>& region) {
  return std::sqrt(Scalar(2) / region.four_volume());
}

/// 2/sqrt(Ω), natural units.
template <typename Scalar>
Scalar minimal_spread(const Region<Scalar>& region) {
  return Scalar(2) / std::sqrt(region.four_volume());
}

template <typename Scalar>
Regime classify_regime(const Region<Scalar>& region, Scalar delta_in,
                       Scalar threshold = Scalar(kDefaultRegimeThreshold)) {
  if (!(threshold > Scalar(1))) throw ConstraintError("regime threshold must exceed 1");
  const Scalar ratio = delta_in / optimal_delta(region);
  if (ratio >= threshold) return Regime::Classical;
  if (ratio <= Scalar(1) / threshold) return Regime::Quantum;
  return Regime::Borderline;
}

template <typename Scalar>
Regime classify_regime(const Region<Scalar>& region, const Resolution<Scalar>& res,
                       Scalar threshold = Scalar(kDefaultRegimeThreshold)) {
  return classify_regime(region, res.delta_E(), threshold);
}

template <typename Scalar>
UncertaintyReport<Scalar> output_uncertainty(const Region<Scalar>& region, const Resolution<Scalar>& res,
                                             Scalar threshold = Scalar(kDefaultRegimeThreshold)) {
  const Scalar omega = region.four_volume();
  return {output_spread(omega, res.delta_E()),
          output_spread(omega, res.delta_H()),
          classify_regime(region, res.delta_E(), threshold),
          classify_regime(region, res.delta_H(), threshold),
          optimal_delta(region),
          minimal_spread(region)};
}

template <typename Scalar>
Resolution<Scalar> optimal_resolution(const Region<Scalar>& region) {
  return Resolution<Scalar>(optimal_delta(region));
}

/// Absolute RPI limit 2·sqrt(ħ/(τ l³)) for a region given in `system`
/// units, returned as a field amplitude in the same system.
template <typename Scalar>
Scalar minimal_uncertainty(Scalar l, Scalar tau, const UnitSystem& system) {
  const auto region = Region<Scalar>::from_units(l, tau, system);
  return Scalar(field_from_natural(double(minimal_spread(region)), system));
}

}  // namespace rpi

#endif  // RPI_RPI_CORE_HPP
