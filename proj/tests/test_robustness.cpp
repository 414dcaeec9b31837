#include <cmath>
#include <random>

#include "doctest.h"
#include "qcompat/robustness.hpp"

using namespace qcompat;

namespace {

RobustnessOptions refined() {
  RobustnessOptions o;
  o.refine = true;
  return o;
}

Povm sigma_z() { return Povm::computational_basis(2); }

Povm sigma_x() {
  const double s = 1.0 / std::sqrt(2.0);
  const complex plus[] = {s, s};
  return Povm::projective(plus);
}

}  // namespace

TEST_CASE("identity self-robustness") {
  // CD noise: (id + r cd)/(1+r) is depolarizing with w = 1/(1+r); clonable iff w <= 2/3
  const Channel id = Channel::identity(2);
  const auto cd = robustness(id, id, NoiseClass::completely_depolarizing, refined());
  CHECK(cd.r_star == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_FALSE(cd.indeterminate);
  CHECK(cd.method == SearchMethod::grid_plus_bisection);
  const auto grid = robustness(id, id, NoiseClass::completely_depolarizing);
  CHECK(grid.r_star == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(grid.method == SearchMethod::grid);
  const auto gen = robustness(id, id, NoiseClass::generic, refined());
  CHECK(gen.r_star == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("a pair containing a completely depolarizing channel is compatible") {
  const ComplexMatrix eta = ComplexMatrix::diagonal({0.3, 0.7});
  const Channel cd = Channel::completely_depolarizing(eta, 2);
  const auto r = robustness(Channel::identity(2), cd, NoiseClass::generic);
  CHECK(r.r_star == 0.0);
  CHECK(r.q_at_r_star >= -1e-6);
  CHECK(r.search_trace.size() == 1);
}

TEST_CASE("feasibility value grows with r") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 3; ++n) {
    const Channel a = random_channel(rng, 2, 2), b = random_channel(rng, 2, 2);
    for (auto noise : {NoiseClass::generic, NoiseClass::completely_depolarizing}) {
      double prev = -1e9;
      for (double r : {0.0, 0.1, 0.3, 0.6, 1.0}) {
        const auto f = feasibility_q(a, b, r, noise);
        REQUIRE(f.status == SdpStatus::optimal);
        CHECK(f.q >= prev - 1e-6);
        prev = f.q;
      }
    }
  }
}

TEST_CASE("upward closure above r_star") {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 3; ++n) {
    const Channel a = random_channel(rng, 2, 2), b = random_channel(rng, 2, 2);
    const auto res = robustness(a, b, NoiseClass::completely_depolarizing);
    for (double off : {0.05, 0.5})
      CHECK(feasibility_q(a, b, res.r_star + off, NoiseClass::completely_depolarizing).q >= -1e-6);
    if (res.r_star > 0.0)
      CHECK(feasibility_q(a, b, res.r_star - 0.005, NoiseClass::completely_depolarizing).q < 0.0);
  }
}

TEST_CASE("pair symmetry and noise-class dominance") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 3; ++n) {
    const Channel a = random_channel(rng, 2, 2), b = random_channel(rng, 2, 2);
    const double ab = robustness(a, b, NoiseClass::generic).r_star;
    const double ba = robustness(b, a, NoiseClass::generic).r_star;
    CHECK(std::abs(ab - ba) <= 0.005 + 1e-12);
    const double cd = robustness(a, b, NoiseClass::completely_depolarizing).r_star;
    CHECK(ab <= cd + 0.005);
    CHECK(cd <= 1.0 + 1e-6);
  }
}

TEST_CASE("linear scan agrees with bisection") {
  const Channel a = depolarizing_choi(0.9), b = amplitude_damping_choi(0.2);
  RobustnessOptions lin;
  lin.scan = GridScan::linear;
  const auto x = robustness(a, b, NoiseClass::completely_depolarizing);
  const auto y = robustness(a, b, NoiseClass::completely_depolarizing, lin);
  CHECK(x.r_star == y.r_star);
  CHECK(y.search_trace.size() >= x.search_trace.size());
}

TEST_CASE("depolarizing self-pair threshold") {
  // (w rho + ...) with CD noise reaches the clonable w = 2/3 at r = 3w/2 - 1
  for (double w : {0.5, 0.8, 0.95}) {
    const Channel d = depolarizing_choi(w);
    const double expect = std::max(0.0, 1.5 * w - 1.0);
    CHECK(robustness(d, d, NoiseClass::completely_depolarizing, refined()).r_star ==
          doctest::Approx(expect).epsilon(2e-4).scale(1.0));
  }
}

TEST_CASE("mutually unbiased qubit measurements") {
  const double generic = measurement_robustness(sigma_z(), sigma_x(), NoiseClass::generic, refined()).r_star;
  CHECK(std::abs(generic - (3.0 - 2.0 * std::sqrt(2.0))) < 1e-4);
  const double trivial =
      measurement_robustness(sigma_z(), sigma_x(), NoiseClass::completely_depolarizing, refined()).r_star;
  CHECK(std::abs(trivial - (std::sqrt(2.0) - 1.0)) < 1e-4);
  // commuting measurements are jointly measurable
  CHECK(measurement_robustness(sigma_z(), sigma_z()).r_star == 0.0);
}

TEST_CASE("argument checks") {
  std::mt19937_64 rng(24);
  const Channel a = random_channel(rng, 2, 2), c = random_channel(rng, 3, 2);
  CHECK_THROWS_AS(feasibility_q(a, c, 0.1, NoiseClass::generic), DimensionError);
  CHECK_THROWS_AS(feasibility_q(a, a, -0.1, NoiseClass::generic), DomainError);
  RobustnessOptions bad;
  bad.dr = 0.0;
  CHECK_THROWS_AS(robustness(a, a, NoiseClass::generic, bad), DomainError);
  CHECK_THROWS_AS(measurement_feasibility_q(sigma_z(), Povm::trivial(3), 0.1), DimensionError);
  CHECK_THROWS_AS(time_grid(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(time_grid(0.5, 0.1, 0.01), DomainError);
}

TEST_CASE("time grid") {
  const auto g = time_grid(0.0, 1.0, 0.01);
  CHECK(g.size() == 101);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK(time_grid(0.2, 0.2, 0.1).size() == 1);
}

TEST_CASE("sweeps are ordered and independent of the worker count") {
  const auto d1 = DynamicalMap::depolarizing(0.5);
  const auto grid = time_grid(0.0, 0.2, 0.05);
  SweepOptions one;
  SweepOptions three = one;
  three.workers = 3;
  const auto a = sweep(d1, d1, grid, one);
  const auto b = sweep(d1, d1, grid, three);
  REQUIRE(a.size() == grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == grid[i]);
    CHECK(a[i].r_generic == b[i].r_generic);
    CHECK(a[i].r_cd == b[i].r_cd);
    CHECK(a[i].trace_distance == doctest::Approx(std::exp(-0.5 * grid[i])));
  }
  SweepOptions cd_only;
  cd_only.generic = false;
  const auto c = sweep(d1, d1, grid, cd_only);
  CHECK(std::isnan(c[0].r_generic));
  CHECK(c[0].r_cd == a[0].r_cd);

  double best = 0.0;
  for (const auto& rec : a) best = std::max(best, rec.r_cd);
  CHECK(dynamical_map_robustness(d1, d1, grid, NoiseClass::completely_depolarizing) == best);
}

TEST_CASE("feasibility problem dump") {
  const auto p = feasibility_problem(Channel::identity(2), Channel::identity(2), 0.5,
                                     NoiseClass::completely_depolarizing);
  CHECK(p.sense() == Sense::maximize);
  CHECK(p.blocks().size() == 3);
  CHECK_FALSE(p.to_json().empty());
}
