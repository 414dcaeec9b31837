#include <cmath>
#include <random>

#include "doctest.h"
#include "qcompat/linalg.hpp"

using namespace qcompat;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  ComplexMatrix m(r, c);
  for (auto& z : m.entries()) z = {g(rng), g(rng)};
  return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d) {
  const ComplexMatrix a = random_matrix(rng, d, d);
  return (a + a.adjoint()) * 0.5;
}

// index-loop Kronecker product
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Gauss-Jordan inverse with partial pivoting
ComplexMatrix inverse(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a(c, k), a(p, k));
      std::swap(inv(c, k), inv(p, k));
    }
    const complex piv = a(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      a(c, k) /= piv;
      inv(c, k) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const complex f = a(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

// trace norm through the unitary polar factor, Newton iteration U <- (U + U^-dagger)/2
double trace_norm_polar(const ComplexMatrix& m) {
  ComplexMatrix u = m;
  for (int it = 0; it < 100; ++it) {
    const ComplexMatrix next = (u + inverse(u).adjoint()) * 0.5;
    const double step = max_abs_diff(next, u);
    u = next;
    if (step < 1e-15) break;
  }
  return (u.adjoint() * m).trace().real();
}

}  // namespace

TEST_CASE("kron matches the index loop") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 10; ++n) {
    const auto a = random_matrix(rng, 1 + n % 3, 2 + n % 2);
    const auto b = random_matrix(rng, 2, 1 + n % 4);
    CHECK(max_abs_diff(kron(a, b), kron_oracle(a, b)) == 0.0);
  }
}

TEST_CASE("partial trace against explicit sums") {
  std::mt19937_64 rng(12);
  const SubsystemShape shape{2, 3, 2};
  const ComplexMatrix m = random_matrix(rng, 12, 12);
  auto at = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t a2, std::size_t b2, std::size_t c2) {
    return m(a * 6 + b * 2 + c, a2 * 6 + b2 * 2 + c2);
  };

  ComplexMatrix keep02(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t c2 = 0; c2 < 2; ++c2)
          for (std::size_t b = 0; b < 3; ++b) keep02(a * 2 + c, a2 * 2 + c2) += at(a, b, c, a2, b, c2);
  CHECK(max_abs_diff(partial_trace(m, shape, {0, 2}), keep02) < 1e-13);

  ComplexMatrix keep1(3, 3);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t b2 = 0; b2 < 3; ++b2)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t c = 0; c < 2; ++c) keep1(b, b2) += at(a, b, c, a, b2, c);
  CHECK(max_abs_diff(partial_trace(m, shape, {1}), keep1) < 1e-13);

  CHECK(max_abs_diff(partial_trace(m, shape, {0, 1, 2}), m) == 0.0);
  const ComplexMatrix all = partial_trace(m, shape, {});
  CHECK(all.rows() == 1);
  CHECK(std::abs(all(0, 0) - m.trace()) < 1e-12);
}

TEST_CASE("partial trace of a product state") {
  std::mt19937_64 rng(13);
  const auto a = random_hermitian(rng, 2);
  const auto b = random_hermitian(rng, 3);
  const auto ab = kron(a, b);
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, {0}), a * b.trace()) < 1e-12);
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, {1}), b * a.trace()) < 1e-12);
}

TEST_CASE("shape errors") {
  const ComplexMatrix a(2, 3), b(2, 3);
  CHECK_THROWS_AS(a * b, DimensionError);
  CHECK_THROWS_AS(max_abs_diff(a, ComplexMatrix(3, 2)), DimensionError);
  CHECK_THROWS_AS(partial_trace(ComplexMatrix(4, 4), {2, 3}, {0}), DimensionError);
  CHECK_THROWS_AS(partial_trace(ComplexMatrix(4, 4), {2, 2}, {2}), DimensionError);
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(ComplexMatrix(2, 2) += ComplexMatrix(2, 3), DimensionError);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(14);
  for (std::size_t d : {1, 2, 3, 4, 6, 8}) {
    const auto h = random_hermitian(rng, d);
    const auto eig = hermitian_eig(h);
    REQUIRE(eig.values.size() == d);
    for (std::size_t k = 1; k < d; ++k) CHECK(eig.values[k - 1] >= eig.values[k]);
    ComplexMatrix rebuilt(d, d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          rebuilt(i, j) += eig.values[k] * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    CHECK(max_abs_diff(rebuilt, h) < 1e-10);
    CHECK(max_abs_diff(eig.vectors.adjoint() * eig.vectors, ComplexMatrix::identity(d)) < 1e-10);
    double sum = 0.0;
    for (double v : eig.values) sum += v;
    CHECK(sum == doctest::Approx(h.trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("eigendecomposition with degenerate spectrum") {
  // 1 + |+><+| (x) 1 has eigenvalues 2, 2, 1, 1
  const double s = 1.0 / std::sqrt(2.0);
  const complex plus[] = {s, s};
  const ComplexMatrix h = ComplexMatrix::identity(4) + kron(ComplexMatrix::outer(plus), ComplexMatrix::identity(2));
  const auto eig = hermitian_eig(h);
  CHECK(eig.values[0] == doctest::Approx(2.0));
  CHECK(eig.values[1] == doctest::Approx(2.0));
  CHECK(eig.values[2] == doctest::Approx(1.0));
  CHECK(eig.values[3] == doctest::Approx(1.0));
  CHECK(max_abs_diff(eig.vectors.adjoint() * eig.vectors, ComplexMatrix::identity(4)) < 1e-10);
  CHECK(min_eigenvalue(h) == doctest::Approx(1.0));
}

TEST_CASE("eigenvalues of a 2x2 Hermitian match the closed form") {
  std::mt19937_64 rng(15);
  for (int n = 0; n < 20; ++n) {
    const auto h = random_hermitian(rng, 2);
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
    CHECK(min_eigenvalue(h) == doctest::Approx(0.5 * (a + d) - rad).epsilon(1e-12));
  }
}

TEST_CASE("trace norm agrees with the polar decomposition") {
  std::mt19937_64 rng(16);
  for (std::size_t d : {2, 3, 4}) {
    for (int n = 0; n < 5; ++n) {
      const auto m = random_matrix(rng, d, d);
      CHECK(trace_norm(m) == doctest::Approx(trace_norm_polar(m)).epsilon(1e-9));
    }
  }
  CHECK(trace_norm(pauli::z()) == doctest::Approx(2.0));
}

TEST_CASE("trace distance properties") {
  const ComplexMatrix p0{{1, 0}, {0, 0}}, p1{{0, 0}, {0, 1}};
  CHECK(trace_distance(p0, p1) == doctest::Approx(1.0));
  CHECK(trace_distance(p0, p0) == doctest::Approx(0.0));
  std::mt19937_64 rng(17);
  for (int n = 0; n < 10; ++n) {
    auto a = random_matrix(rng, 3, 3);
    auto b = random_matrix(rng, 3, 3);
    ComplexMatrix ra = a * a.adjoint(), rb = b * b.adjoint();
    ra *= 1.0 / ra.trace().real();
    rb *= 1.0 / rb.trace().real();
    const double dab = trace_distance(ra, rb);
    CHECK(dab >= 0.0);
    CHECK(dab <= 1.0 + 1e-12);
    CHECK(dab == doctest::Approx(trace_distance(rb, ra)).epsilon(1e-12));
  }
}

TEST_CASE("Pauli algebra") {
  const complex i{0, 1};
  CHECK(max_abs_diff(pauli::x() * pauli::y(), i * pauli::z()) == 0.0);
  CHECK(max_abs_diff(pauli::z() * pauli::z(), ComplexMatrix::identity(2)) == 0.0);
  CHECK(pauli::y().hermitian());
  CHECK_FALSE(ComplexMatrix({{0, 1}, {0, 0}}).hermitian());
}

TEST_CASE("hermitian_function gives the matrix square root") {
  std::mt19937_64 rng(18);
  const auto a = random_matrix(rng, 3, 3);
  const ComplexMatrix p = a * a.adjoint();
  const auto root = hermitian_function(p, [](double x) { return std::sqrt(std::max(x, 0.0)); });
  CHECK(max_abs_diff(root * root, p) < 1e-10);
}
