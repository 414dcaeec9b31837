#pragma once

// Dense complex matrix kernel for small (<= 8x8) quantum operators.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcompat {

using complex = std::complex<double>;

/// Raised when operand shapes do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed JSON input.
class ParseError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A file could not be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigResidualTol = 1e-10;
inline constexpr double kPsdFloor = -1e-10;

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() : ComplexMatrix(1, 1) {}
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix diagonal(std::initializer_list<double> diag);
  /// |v><v| for a column vector given as amplitudes.
  static ComplexMatrix outer(std::span<const complex> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const complex> entries() const { return data_; }
  std::span<complex> entries() { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  complex trace() const;
  double frobenius_norm() const;
  /// max_ij |M_ij - conj(M_ji)| <= tol
  bool hermitian(double tol = kHermitianTol) const;
  /// (M + M^dagger)/2; used to scrub round-off before eigensolves.
  ComplexMatrix hermitian_part() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
  friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= complex(s); }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= complex(s); }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<complex> data_;
};

/// max |a_ij - b_ij|; throws DimensionError on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Dense row-major real matrix, used for symmetric embeddings.
class RealMatrix {
 public:
  RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static RealMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> entries() { return data_; }
  std::span<const double> entries() const { return data_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Factorization H1 (x) H2 (x) ... of a square matrix's index space.
class SubsystemShape {
 public:
  explicit SubsystemShape(std::vector<std::size_t> dims);
  SubsystemShape(std::initializer_list<std::size_t> dims)
      : SubsystemShape(std::vector<std::size_t>(dims)) {}

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  std::size_t total() const { return total_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            std::span<const std::size_t> keep);
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            std::initializer_list<std::size_t> keep);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column k pairs with values[k]
};

struct RealEigenDecomposition {
  std::vector<double> values;  // in Jacobi output order (unsorted)
  RealMatrix vectors;          // columns
  int sweeps = 0;
};

/// Cyclic Jacobi on a real symmetric matrix. If `warm` is given it must be
/// orthogonal; the iteration starts from warm^T A warm and the returned
/// vectors are expressed in the original basis.
RealEigenDecomposition jacobi_eigen(const RealMatrix& a, const RealMatrix* warm = nullptr);

/// Hermitian eigendecomposition through the real symmetric embedding.
EigenDecomposition hermitian_eig(const ComplexMatrix& h);

/// V f(Lambda) V^dagger for Hermitian h.
template <class F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f);

double min_eigenvalue(const ComplexMatrix& h);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// (1/2) ||rho - sigma||_1 for density matrices.
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

// ---------------------------------------------------------------------------

template <class F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f) {
  const EigenDecomposition eig = hermitian_eig(h);
  const std::size_t n = h.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const complex vik = eig.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eig.vectors(j, k));
    }
  }
  return out;
}

}  // namespace qcompat
