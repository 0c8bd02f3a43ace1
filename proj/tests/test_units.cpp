#include <doctest.h>

#include <cmath>
#include <random>

#include "rpi/units.hpp"

using namespace rpi;

TEST_CASE("natural constants with alpha = 1/137") {
  const auto s = make_units(UnitKind::Natural, AlphaMode::PaperExact);
  CHECK(s.hbar == 1.0);
  CHECK(s.c == 1.0);
  CHECK(s.alpha == doctest::Approx(1.0 / 137.0).epsilon(1e-15));
  CHECK(s.e == doctest::Approx(0.0854357657716761).epsilon(1e-12));
  CHECK(s.e * s.e / (s.hbar * s.c) == doctest::Approx(s.alpha).epsilon(1e-14));
}

TEST_CASE("CGS codata elementary charge") {
  const auto s = make_units(UnitKind::GaussianCGS, AlphaMode::Codata);
  // sqrt(α ħ c) with ħ = 1.054571817e-27 erg s, c = 2.99792458e10 cm/s
  CHECK(s.e == doctest::Approx(4.803204712408132e-10).epsilon(1e-12));
}

TEST_CASE("alpha hbar c = e^2 in every system") {
  for (auto kind : {UnitKind::Natural, UnitKind::GaussianCGS})
    for (auto mode : {AlphaMode::PaperExact, AlphaMode::Codata}) {
      const auto s = make_units(kind, mode);
      CHECK(std::abs(s.alpha * s.hbar * s.c - s.e * s.e) <= 1e-12 * s.e * s.e);
    }
}

TEST_CASE("field conversion") {
  const auto nat = natural_units();
  CHECK(field_to_natural(3.5, nat) == 3.5);
  CHECK(field_from_natural(field_to_natural(1.0, nat), nat) == 1.0);

  // 2 sqrt(ħ/(τ l³)) in CGS for τ = 1 s, l = 1 cm, evaluated in natural
  // units (τ → cτ) and converted back.
  const auto cgs = make_units(UnitKind::GaussianCGS);
  const double natural_value = 2.0 / std::sqrt(to_natural(Quantity::Time, 1.0, cgs));
  CHECK(field_from_natural(natural_value, cgs) == doctest::Approx(6.494834307355346e-14).epsilon(1e-12));
}

TEST_CASE("conversion round trips over 40 decades") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exponent(-20.0, 20.0);
  const auto cgs = make_units(UnitKind::GaussianCGS, AlphaMode::Codata);
  const Quantity kinds[] = {Quantity::Length, Quantity::Time,   Quantity::Frequency, Quantity::Mass,
                            Quantity::Charge, Quantity::Field, Quantity::Force,     Quantity::Action};
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, exponent(rng));
    for (auto q : kinds) {
      const double back = from_natural(q, to_natural(q, x, cgs), cgs);
      REQUIRE(std::abs(back - x) <= 1e-12 * x);
    }
  }
}

TEST_CASE("2/sqrt(137) rounds to about 1/6") {
  const auto s = natural_units();
  const double exact = 2.0 * s.e;
  CHECK(std::abs(exact - 1.0 / 6.0) / (1.0 / 6.0) < 0.03);
}
