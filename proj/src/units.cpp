#include "rpi/units.hpp"

#include <cmath>

namespace rpi {

UnitSystem make_units(UnitKind kind, AlphaMode mode) {
  UnitSystem s;
  s.kind = kind;
  s.alpha_mode = mode;
  s.alpha = mode == AlphaMode::PaperExact ? constants::kPaperAlpha : constants::kCodataAlpha;
  if (kind == UnitKind::GaussianCGS) {
    s.hbar = constants::kHbarCgs;
    s.c = constants::kSpeedOfLightCgs;
  }
  s.e = std::sqrt(s.alpha * s.hbar * s.c);
  return s;
}

namespace {

// Multiplier taking a value in `system` units to natural units.
double natural_scale(Quantity q, const UnitSystem& s) {
  const double hbar_c = s.hbar * s.c;
  switch (q) {
    case Quantity::Length:
      return 1.0;
    case Quantity::Time:
      return s.c;
    case Quantity::Frequency:
      return 1.0 / s.c;
    case Quantity::Mass:
      return s.c / s.hbar;
    case Quantity::Charge:
    case Quantity::Field:
      return 1.0 / std::sqrt(hbar_c);
    case Quantity::Force:
      return 1.0 / hbar_c;
    case Quantity::Action:
      return 1.0 / s.hbar;
  }
  return 1.0;
}

}  // namespace

double to_natural(Quantity q, double value, const UnitSystem& system) {
  if (system.kind == UnitKind::Natural) return value;
  return value * natural_scale(q, system);
}

double from_natural(Quantity q, double value, const UnitSystem& system) {
  if (system.kind == UnitKind::Natural) return value;
  return value / natural_scale(q, system);
}

std::string_view to_string(UnitKind kind) {
  return kind == UnitKind::Natural ? "natural" : "cgs";
}

std::string_view to_string(AlphaMode mode) {
  return mode == AlphaMode::PaperExact ? "paper" : "codata";
}

}  // namespace rpi
