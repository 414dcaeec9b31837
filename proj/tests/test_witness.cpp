#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qcompat/witness.hpp"

using namespace qcompat;

namespace {

const double kPi = std::numbers::pi;

std::vector<CurvePoint> curve_of(std::initializer_list<double> values, double step = 0.1) {
  std::vector<CurvePoint> c;
  double t = 0.0;
  for (double v : values) {
    c.push_back({t, v});
    t += step;
  }
  return c;
}

}  // namespace

TEST_CASE("rising segments merge consecutive steps") {
  const auto c = curve_of({1.0, 0.9, 0.95, 1.0, 1.0, 0.8, 0.801, 0.9});
  const auto segs = rising_segments(c, 2e-3);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].first == doctest::Approx(0.1));
  CHECK(segs[0].second == doctest::Approx(0.3));
  CHECK(segs[1].first == doctest::Approx(0.6));
  CHECK(segs[1].second == doctest::Approx(0.7));
  CHECK(rising_segments(c, 0.0).size() == 2);
  CHECK(rising_segments(curve_of({0.0, 0.1, 0.2}), 0.5).empty());
}

TEST_CASE("measure from a curve") {
  // rising steps 0.1 -> 0.3 and 0.3 -> 0.4; trapezoid areas 0.02 and 0.035
  const auto c = curve_of({0.5, 0.1, 0.3, 0.4, 0.2});
  const auto rep = indivisibility_from_curve(c);
  CHECK(rep.n_raw == doctest::Approx(0.055));
  CHECK(rep.n_normalized == doctest::Approx(0.055 / 1.055));
  IndivisibilityOptions inc;
  inc.integrate_derivative = true;
  CHECK(indivisibility_from_curve(c, inc).n_raw == doctest::Approx(0.3));

  const auto flat = indivisibility_from_curve(curve_of({0.5, 0.4, 0.4, 0.1}));
  CHECK(flat.n_raw == 0.0);
  CHECK(flat.n_normalized == 0.0);
  CHECK_THROWS_AS(indivisibility_from_curve(curve_of({0.1, 0.2})), DomainError);
}

TEST_CASE("normalization is monotone and below one") {
  double prev = -1.0;
  for (double top : {0.0, 0.01, 0.1, 1.0, 10.0}) {
    const auto rep = indivisibility_from_curve(curve_of({0.0, top, top}));
    CHECK(rep.n_normalized < 1.0);
    CHECK(rep.n_normalized >= prev);
    CHECK(std::abs(rep.n_normalized - rep.n_raw / (1.0 + rep.n_raw)) < 1e-15);
    prev = rep.n_normalized;
  }
}

TEST_CASE("trace-distance curve of depolarizing maps") {
  const ComplexMatrix p0{{1, 0}, {0, 0}}, p1{{0, 0}, {0, 1}};
  const auto grid = time_grid(0.0, 1.0, 0.05);
  const auto d2 = DynamicalMap::depolarizing_oscillating(0.5, 5 * kPi);
  for (const auto& pt : blp_curve(d2, p0, p1, grid))
    CHECK(pt.value == doctest::Approx(std::exp(-0.5 * pt.t) * std::pow(std::cos(5 * kPi * pt.t), 2)));
  const auto mono = blp_curve(DynamicalMap::eternal(), p0, p1, grid);
  for (std::size_t i = 1; i < mono.size(); ++i) CHECK(mono[i].value <= mono[i - 1].value + 1e-14);
  CHECK_THROWS_AS(blp_curve(d2, ComplexMatrix::identity(3), p1, grid), DimensionError);
}

TEST_CASE("teleportation bound for depolarizing and damping maps") {
  const auto id = teleport_fidelity(DynamicalMap::identity(), 0.3);
  CHECK(id.n_value == doctest::Approx(3.0));
  CHECK(id.f_max == doctest::Approx(1.0));

  const auto d2 = DynamicalMap::depolarizing_oscillating(0.5, 5 * kPi);
  for (double t : {0.0, 0.04, 0.1, 0.17, 0.33}) {
    const double w = std::exp(-0.5 * t) * std::pow(std::cos(5 * kPi * t), 2);
    const auto r = teleport_fidelity(d2, t);
    CHECK(std::abs(r.n_value - 3 * w) < 1e-12);
    CHECK(r.f_max == doctest::Approx(3 * w > 1 ? 0.5 * (1 + w) : 2.0 / 3.0));
  }

  // singlet correlations diag(-1, -1, -1) become diag(-sqrt(1-w), -sqrt(1-w), -(1-w))
  const auto ad = DynamicalMap::amplitude_damping(0.5, 5 * kPi);
  for (double t : {0.02, 0.08, 0.5}) {
    const double w = 1 - std::exp(-0.5 * t) * std::pow(std::cos(5 * kPi * t), 2);
    CHECK(teleport_fidelity(ad, t).n_value == doctest::Approx(2 * std::sqrt(1 - w) + (1 - w)).epsilon(1e-12));
  }
}

TEST_CASE("CP-divisible depolarizing map has zero measure") {
  const auto rep = cp_indivisibility_measure(DynamicalMap::depolarizing(0.5), DynamicalMap::identity(),
                                             time_grid(0.0, 1.0, 0.05), NoiseClass::completely_depolarizing);
  CHECK(rep.n_raw == 0.0);
  CHECK(rep.rising_segments.empty());
  CHECK(rep.curve.size() == 21);
  CHECK(rep.reference == DynamicalMap::identity().label());
}

TEST_CASE("oscillating map is flagged on a fine grid and rejected on a coarse one") {
  const auto d2 = DynamicalMap::depolarizing_oscillating(0.5, 5 * kPi);
  const auto rep = cp_indivisibility_measure(d2, DynamicalMap::identity(), time_grid(0.0, 0.5, 0.01),
                                             NoiseClass::completely_depolarizing);
  CHECK(rep.n_raw > 0.0);
  CHECK(rep.rising_segments.size() >= 2);
  CHECK_THROWS_AS(cp_indivisibility_measure(d2, DynamicalMap::identity(), time_grid(0.0, 1.0, 0.05),
                                            NoiseClass::generic),
                  DomainError);
}
