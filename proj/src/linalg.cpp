#include "qcompat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcompat {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  if (data_.size() != rows * cols) throw DimensionError("entry count does not match rows*cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

ComplexMatrix ComplexMatrix::outer(std::span<const complex> v) {
  ComplexMatrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

complex ComplexMatrix::trace() const {
  if (!square()) throw DimensionError("trace of a non-square matrix");
  complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::hermitian(double tol) const {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  if (!square()) throw DimensionError("hermitian part of a non-square matrix");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
  ComplexMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const complex aik = a(i, k);
      if (aik == complex(0.0)) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
  return d;
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SubsystemShape::SubsystemShape(std::vector<std::size_t> dims) : dims_(std::move(dims)), total_(1) {
  if (dims_.empty()) throw DimensionError("subsystem shape needs at least one factor");
  for (std::size_t d : dims_) {
    if (d == 0) throw DimensionError("subsystem dimensions must be positive");
    total_ *= d;
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t br = b.rows(), bc = b.cols();
  ComplexMatrix out(a.rows() * br, a.cols() * bc);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const complex aij = a(i, j);
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out(i * br + k, j * bc + l) = aij * b(k, l);
    }
  return out;
}

namespace {

// Flat offsets of every multi-index over the chosen subsystems, with the
// other subsystems' digits held at zero.
std::vector<std::size_t> offsets_over(const std::vector<std::size_t>& dims,
                                      const std::vector<std::size_t>& strides,
                                      const std::vector<std::size_t>& which) {
  std::vector<std::size_t> out{0};
  for (std::size_t s : which) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[s]);
    for (std::size_t base : out)
      for (std::size_t i = 0; i < dims[s]; ++i) next.push_back(base + i * strides[s]);
    out = std::move(next);
  }
  return out;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            std::span<const std::size_t> keep) {
  if (!m.square() || m.rows() != shape.total())
    throw DimensionError("partial_trace: subsystem shape does not match matrix dimension");
  const auto& dims = shape.dims();
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw DimensionError("partial_trace: repeated subsystem index");
  if (!kept.empty() && kept.back() >= dims.size())
    throw DimensionError("partial_trace: subsystem index out of range");

  std::vector<std::size_t> strides(dims.size());
  std::size_t stride = 1;
  for (std::size_t s = dims.size(); s-- > 0;) {
    strides[s] = stride;
    stride *= dims[s];
  }
  std::vector<std::size_t> traced;
  for (std::size_t s = 0; s < dims.size(); ++s)
    if (!std::binary_search(kept.begin(), kept.end(), s)) traced.push_back(s);

  const auto kidx = offsets_over(dims, strides, kept);
  const auto tidx = offsets_over(dims, strides, traced);
  ComplexMatrix out(kidx.size(), kidx.size());
  for (std::size_t a = 0; a < kidx.size(); ++a)
    for (std::size_t b = 0; b < kidx.size(); ++b) {
      complex s = 0.0;
      for (std::size_t c : tidx) s += m(kidx[a] + c, kidx[b] + c);
      out(a, b) = s;
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            std::initializer_list<std::size_t> keep) {
  return partial_trace(m, shape, std::span<const std::size_t>(keep.begin(), keep.size()));
}

RealEigenDecomposition jacobi_eigen(const RealMatrix& input, const RealMatrix* warm) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw DimensionError("jacobi_eigen: matrix is not square");

  RealEigenDecomposition out{std::vector<double>(n), RealMatrix::identity(n), 0};
  RealMatrix a = input;
  if (warm != nullptr) {
    if (warm->rows() != n || warm->cols() != n) throw DimensionError("jacobi_eigen: warm start shape");
    // a <- W^T A W
    RealMatrix tmp(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = input(i, k);
        for (std::size_t j = 0; j < n; ++j) tmp(i, j) += aik * (*warm)(k, j);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += (*warm)(k, i) * tmp(k, j);
        a(i, j) = s;
      }
    out.vectors = *warm;
  }

  double scale = 0.0;
  for (double v : a.entries()) scale += v * v;
  scale = std::sqrt(scale);
  const double skip_below = 1e-17 * scale;
  RealMatrix& v = out.vectors;

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip_below || apq == 0.0) continue;
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    out.sweeps = sweep + 1;
    if (!rotated) break;
  }
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  return out;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
  if (!h.square()) throw DimensionError("hermitian_eig: matrix is not square");
  double mag = 1.0;
  for (const auto& z : h.entries()) mag = std::max(mag, std::abs(z));
  if (!h.hermitian(kHermitianTol * mag)) throw DomainError("hermitian_eig: matrix is not Hermitian");

  const std::size_t n = h.rows();
  RealMatrix embed(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const complex hij = 0.5 * (h(i, j) + std::conj(h(j, i)));
      embed(i, j) = hij.real();
      embed(i + n, j + n) = hij.real();
      embed(i, j + n) = -hij.imag();
      embed(i + n, j) = hij.imag();
    }
  const RealEigenDecomposition real = jacobi_eigen(embed);

  std::vector<std::size_t> order(2 * n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return real.values[a] > real.values[b]; });

  // Each complex eigenvector appears twice in the embedding, as [u; v] and
  // [-v; u]. Collapse pairs by complex Gram-Schmidt over the sorted list.
  std::vector<std::vector<complex>> accepted;
  std::vector<bool> used(2 * n, false);
  for (double threshold : {0.5, 1e-8}) {
    for (std::size_t idx : order) {
      if (accepted.size() == n) break;
      if (used[idx]) continue;
      std::vector<complex> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = complex(real.vectors(i, idx), real.vectors(i + n, idx));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& a : accepted) {
          complex dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += std::conj(a[i]) * c[i];
          for (std::size_t i = 0; i < n; ++i) c[i] -= dot * a[i];
        }
      double norm = 0.0;
      for (const auto& z : c) norm += std::norm(z);
      if (norm < threshold) continue;
      norm = std::sqrt(norm);
      for (auto& z : c) z /= norm;
      used[idx] = true;
      accepted.push_back(std::move(c));
    }
  }
  if (accepted.size() != n) throw DomainError("hermitian_eig: failed to separate eigenvector pairs");

  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    complex rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      complex hv = 0.0;
      for (std::size_t j = 0; j < n; ++j) hv += h(i, j) * accepted[k][j];
      rq += std::conj(accepted[k][i]) * hv;
    }
    values[k] = rq.real();
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[perm[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = accepted[perm[k]][i];
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& h) { return hermitian_eig(h).values.back(); }

double trace_norm(const ComplexMatrix& m) {
  if (!m.square()) throw DimensionError("trace_norm: matrix is not square");
  double total = 0.0;
  if (m.hermitian()) {
    for (double l : hermitian_eig(m).values) total += std::abs(l);
    return total;
  }
  const ComplexMatrix gram = (m.adjoint() * m).hermitian_part();
  for (double l : hermitian_eig(gram).values) total += std::sqrt(std::max(l, 0.0));
  return total;
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (!rho.square() || rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionError("trace_distance: states have different dimensions");
  if (!rho.hermitian(1e-10) || !sigma.hermitian(1e-10))
    throw DomainError("trace_distance: states must be Hermitian");
  return 0.5 * trace_norm((rho - sigma).hermitian_part());
}

namespace pauli {
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, complex(0, -1)}, {complex(0, 1), 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

}  // namespace qcompat
