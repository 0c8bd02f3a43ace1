#ifndef RPI_UNITS_HPP
#define RPI_UNITS_HPP

#include <string_view>

namespace rpi {

enum class UnitKind { Natural, GaussianCGS };
enum class AlphaMode { PaperExact, Codata };

/// Constant set of a unit system. Charges follow the Gaussian (esu)
/// convention, so e² = α·ħ·c with no 4πε₀.
struct UnitSystem {
  UnitKind kind = UnitKind::Natural;
  AlphaMode alpha_mode = AlphaMode::PaperExact;
  double hbar = 1.0;
  double c = 1.0;
  double e = 0.0;
  double alpha = 0.0;
};

namespace constants {
inline constexpr double kPaperAlpha = 1.0 / 137.0;
inline constexpr double kCodataAlpha = 1.0 / 137.035999084;
inline constexpr double kHbarCgs = 1.054571817e-27;  // erg s
inline constexpr double kSpeedOfLightCgs = 2.99792458e10;  // cm / s
}  // namespace constants

UnitSystem make_units(UnitKind kind, AlphaMode mode = AlphaMode::PaperExact);
inline UnitSystem natural_units(AlphaMode mode = AlphaMode::PaperExact) {
  return make_units(UnitKind::Natural, mode);
}

/// Physical dimension of a value crossing the API boundary.
///
/// Natural units here keep a length unit (cm for CGS inputs) and set
/// ħ = c = 1: time is measured as c·t, a field amplitude as E/sqrt(ħc)
/// (length⁻²), a charge as Q/sqrt(ħc) (dimensionless), a mass as mc/ħ.
enum class Quantity { Length, Time, Frequency, Mass, Charge, Field, Force, Action };

double to_natural(Quantity q, double value, const UnitSystem& system);
double from_natural(Quantity q, double value, const UnitSystem& system);

inline double field_to_natural(double value, const UnitSystem& system) {
  return to_natural(Quantity::Field, value, system);
}
inline double field_from_natural(double value, const UnitSystem& system) {
  return from_natural(Quantity::Field, value, system);
}

std::string_view to_string(UnitKind kind);
std::string_view to_string(AlphaMode mode);

}  // namespace rpi

#endif  // RPI_UNITS_HPP
