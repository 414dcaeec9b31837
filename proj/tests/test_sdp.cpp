#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qcompat/sdp.hpp"

using namespace qcompat;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  ComplexMatrix m(d, d);
  for (auto& z : m.entries()) z = {g(rng), g(rng)};
  return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d) {
  const ComplexMatrix a = random_matrix(rng, d);
  return (a + a.adjoint()) * 0.5;
}

// columns orthonormalized by classical Gram-Schmidt
ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t d) {
  ComplexMatrix u = random_matrix(rng, d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      complex dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += std::conj(u(i, j)) * u(i, k);
      for (std::size_t i = 0; i < d; ++i) u(i, k) -= dot * u(i, j);
    }
    double n = 0.0;
    for (std::size_t i = 0; i < d; ++i) n += std::norm(u(i, k));
    for (std::size_t i = 0; i < d; ++i) u(i, k) /= std::sqrt(n);
  }
  return u;
}

ComplexMatrix conjugate(const ComplexMatrix& u, std::initializer_list<double> diag) {
  return u * ComplexMatrix::diagonal(diag) * u.adjoint();
}

SdpProblem eigen_lp(const ComplexMatrix& c) {
  SdpProblem p;
  const auto x = p.add_block("X", c.rows());
  p.add_objective(x, c);
  p.add_equality({{x, ComplexMatrix::identity(c.rows())}}, {}, 1.0, "trace");
  return p;
}

}  // namespace

TEST_CASE("svec preserves the trace inner product") {
  std::mt19937_64 rng(1);
  for (std::size_t d : {1, 2, 3, 5}) {
    const auto a = random_hermitian(rng, d), b = random_hermitian(rng, d);
    const auto va = svec(a), vb = svec(b);
    REQUIRE(va.size() == d * d);
    double dot = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) dot += va[k] * vb[k];
    CHECK(dot == doctest::Approx((a * b).trace().real()).epsilon(1e-12));
    CHECK(max_abs_diff(smat(va.data(), d), a) < 1e-14);
  }
}

TEST_CASE("real embedding doubles the spectrum") {
  std::mt19937_64 rng(2);
  const auto u = random_unitary(rng, 3);
  const auto h = conjugate(u, {2.0, -1.0, 0.5});
  const auto eig = jacobi_eigen(real_embed(h));
  std::vector<double> v = eig.values;
  std::sort(v.begin(), v.end());
  const double expect[] = {-1, -1, 0.5, 0.5, 2, 2};
  for (std::size_t k = 0; k < 6; ++k) CHECK(v[k] == doctest::Approx(expect[k]).epsilon(1e-10));
}

TEST_CASE("eigenvalue LP finds the planted minimum eigenvalue") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 10; ++n) {
    const std::size_t d = 2 + n % 3;
    const auto u = random_unitary(rng, d);
    ComplexMatrix c(d, d);
    if (d == 2) c = conjugate(u, {0.3, -0.7});
    if (d == 3) c = conjugate(u, {1.1, -0.2, 0.4});
    if (d == 4) c = conjugate(u, {-1.5, 0.0, 2.0, -1.2});
    const double lmin = d == 2 ? -0.7 : d == 3 ? -0.2 : -1.5;
    const auto sol = solve(eigen_lp(c));
    REQUIRE(sol.status == SdpStatus::optimal);
    CHECK(std::abs(sol.objective_value - lmin) < 1e-7);
    CHECK(min_eigenvalue(sol.block_values[0]) > -1e-7);
    CHECK(std::abs(sol.block_values[0].trace().real() - 1.0) < 1e-8);
  }
}

TEST_CASE("free scalar with a matrix equality") {
  // max s subject to X + s 1 = C, X >= 0  ->  s = lambda_min(C)
  std::mt19937_64 rng(4);
  const auto c = conjugate(random_unitary(rng, 3), {0.9, 0.25, 1.7});
  SdpProblem p;
  p.set_sense(Sense::maximize);
  const auto x = p.add_block("X", 3);
  const auto s = p.add_scalar("s");
  p.add_scalar_objective(s, 1.0);
  p.add_matrix_equality({{x, [](const ComplexMatrix& m) { return m; }}}, {{s, ComplexMatrix::identity(3)}}, c, "eq");
  CHECK(p.rows().size() == 9);
  const auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::optimal);
  CHECK(sol.scalar_values[0] == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(sol.objective_value == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("planted primal-dual pair is recovered") {
  // X0 and S0 share eigenvectors with complementary support; C = A*(y) + S0
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int n = 0; n < 5; ++n) {
    const auto u = random_unitary(rng, 4);
    const auto x0 = conjugate(u, {0.7, 0.3, 0, 0});
    const auto s0 = conjugate(u, {0, 0, 1.0, 0.4});
    SdpProblem p;
    const auto x = p.add_block("X", 4);
    ComplexMatrix c = s0;
    for (int k = 0; k < 6; ++k) {
      const auto a = random_hermitian(rng, 4);
      const double y = g(rng);
      c += a * y;
      p.add_equality({{x, a}}, {}, (a * x0).trace().real());
    }
    p.add_objective(x, c);
    const auto sol = solve(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    CHECK(std::abs(sol.objective_value - (c * x0).trace().real()) < 1e-6);
    CHECK(max_abs_diff(sol.block_values[0], x0) < 1e-5);
  }
}

TEST_CASE("infeasible problems are reported") {
  SdpProblem neg;
  const auto x = neg.add_block("X", 2);
  neg.add_objective(x, ComplexMatrix::identity(2));
  neg.add_equality({{x, ComplexMatrix::identity(2)}}, {}, -1.0);
  CHECK(solve(neg).status == SdpStatus::infeasible);

  SdpProblem clash;
  const auto y = clash.add_block("Y", 2);
  clash.add_equality({{y, ComplexMatrix::identity(2)}}, {}, 1.0);
  clash.add_equality({{y, ComplexMatrix::identity(2)}}, {}, 2.0);
  const auto sol = solve(clash);
  CHECK(sol.status == SdpStatus::infeasible);
  CHECK(sol.iterations == 0);
}

TEST_CASE("iteration cap") {
  std::mt19937_64 rng(6);
  SdpSettings s;
  s.max_iterations = 1;
  CHECK(solve(eigen_lp(random_hermitian(rng, 3)), s).status == SdpStatus::max_iterations);
}

TEST_CASE("replay is bit-identical") {
  std::mt19937_64 rng(7);
  const auto c = random_hermitian(rng, 4);
  const auto p = eigen_lp(c);
  const auto a = solve(p), b = solve(eigen_lp(c));
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.block_values[0] == b.block_values[0]);
  CHECK(p.to_json() == eigen_lp(c).to_json());
}

TEST_CASE("malformed problems throw before iterating") {
  SdpProblem p;
  const auto x = p.add_block("X", 2);
  CHECK_THROWS_AS(p.add_objective(x, ComplexMatrix::identity(3)), DimensionError);
  CHECK_THROWS_AS(p.add_objective(x, ComplexMatrix{{0, 1}, {0, 0}}), DomainError);
  CHECK_THROWS_AS(p.add_objective(5, ComplexMatrix::identity(2)), DimensionError);
  CHECK_THROWS_AS(p.add_entry_equality(x, 2, 0, 1.0), DimensionError);
  CHECK_THROWS_AS(p.add_block("Z", 0), DimensionError);
  SdpSettings bad;
  bad.relaxation = 2.5;
  CHECK_THROWS_AS(solve(eigen_lp(ComplexMatrix::identity(2)), bad), DomainError);
  SdpProblem big;
  big.add_block("B", 40);
  CHECK_THROWS_AS(solve(big), DimensionError);
}

TEST_CASE("JSON dump names its rows") {
  SdpProblem p;
  const auto x = p.add_block("X", 2);
  p.add_entry_equality(x, 0, 1, complex(0.25, -0.5), "off");
  const std::string j = p.to_json();
  CHECK(j.find("qcompat-sdp-1") != std::string::npos);
  CHECK(j.find("\"off.re\"") != std::string::npos);
  CHECK(j.find("\"off.im\"") != std::string::npos);
}
