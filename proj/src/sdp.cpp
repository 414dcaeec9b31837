#include "qcompat/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace qcompat {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Hermitian basis element dual to packed coordinate k of a d x d block.
ComplexMatrix basis_element(std::size_t d, std::size_t k) {
  ComplexMatrix e(d, d);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      if (i == j) {
        if (pos++ == k) {
          e(i, i) = 1.0;
          return e;
        }
        continue;
      }
      if (pos++ == k) {
        e(i, j) = e(j, i) = 1.0 / kSqrt2;
        return e;
      }
      if (pos++ == k) {
        e(i, j) = complex(0.0, 1.0 / kSqrt2);
        e(j, i) = complex(0.0, -1.0 / kSqrt2);
        return e;
      }
    }
  throw DimensionError("basis_element: coordinate out of range");
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

std::vector<double> svec(const ComplexMatrix& h) {
  if (!h.square()) throw DimensionError("svec: matrix is not square");
  const std::size_t d = h.rows();
  std::vector<double> out;
  out.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      if (i == j) {
        out.push_back(h(i, i).real());
      } else {
        const complex z = 0.5 * (h(i, j) + std::conj(h(j, i)));
        out.push_back(kSqrt2 * z.real());
        out.push_back(kSqrt2 * z.imag());
      }
    }
  return out;
}

ComplexMatrix smat(const double* packed, std::size_t d) {
  ComplexMatrix h(d, d);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      if (i == j) {
        h(i, i) = packed[pos++];
      } else {
        const complex z(packed[pos] / kSqrt2, packed[pos + 1] / kSqrt2);
        pos += 2;
        h(i, j) = z;
        h(j, i) = std::conj(z);
      }
    }
  return h;
}

RealMatrix real_embed(const ComplexMatrix& h) {
  if (!h.square()) throw DimensionError("real_embed: matrix is not square");
  const std::size_t n = h.rows();
  RealMatrix e(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      e(i, j) = h(i, j).real();
      e(i + n, j + n) = h(i, j).real();
      e(i, j + n) = -h(i, j).imag();
      e(i + n, j) = h(i, j).imag();
    }
  return e;
}

// ---------------------------------------------------------------------------
// Problem construction

std::size_t SdpProblem::add_block(std::string id, std::size_t dim) {
  if (dim == 0) throw DimensionError("SDP block dimension must be positive");
  blocks_.push_back({std::move(id), dim});
  block_obj_.emplace_back(dim * dim, 0.0);
  return blocks_.size() - 1;
}

std::size_t SdpProblem::add_scalar(std::string id) {
  scalars_.push_back(std::move(id));
  scalar_obj_.push_back(0.0);
  return scalars_.size() - 1;
}

void SdpProblem::check_block(std::size_t b) const {
  if (b >= blocks_.size()) throw DimensionError("SDP: unknown block index");
}

void SdpProblem::check_scalar(std::size_t s) const {
  if (s >= scalars_.size()) throw DimensionError("SDP: unknown scalar index");
}

namespace {

void check_coef(const ComplexMatrix& coef, std::size_t dim) {
  if (coef.rows() != dim || coef.cols() != dim) throw DimensionError("SDP: coefficient does not match block dimension");
  double mag = 1.0;
  for (const auto& z : coef.entries()) mag = std::max(mag, std::abs(z));
  if (!coef.hermitian(kHermitianTol * mag)) throw DomainError("SDP: coefficient matrix is not Hermitian");
}

}  // namespace

void SdpProblem::add_objective(std::size_t block, const ComplexMatrix& coef) {
  check_block(block);
  check_coef(coef, blocks_[block].dim);
  const auto packed = svec(coef);
  for (std::size_t k = 0; k < packed.size(); ++k) block_obj_[block][k] += packed[k];
}

void SdpProblem::add_scalar_objective(std::size_t scalar, double coef) {
  check_scalar(scalar);
  scalar_obj_[scalar] += coef;
}

void SdpProblem::add_equality(std::vector<BlockCoef> blocks, std::vector<ScalarCoef> scalars, double rhs,
                              std::string label) {
  Row row;
  for (auto& bc : blocks) {
    check_block(bc.block);
    check_coef(bc.coef, blocks_[bc.block].dim);
    row.blocks.emplace_back(bc.block, svec(bc.coef));
  }
  for (const auto& sc : scalars) {
    check_scalar(sc.scalar);
    row.scalars.emplace_back(sc.scalar, sc.coef);
  }
  row.rhs = rhs;
  row.label = std::move(label);
  rows_.push_back(std::move(row));
}

void SdpProblem::add_entry_equality(std::size_t block, std::size_t i, std::size_t j, complex value,
                                    std::string label) {
  check_block(block);
  const std::size_t d = blocks_[block].dim;
  if (i >= d || j >= d) throw DimensionError("SDP: entry index out of range");
  // Re X_ij = Tr(F X) with F = (E_ji + E_ij)/2; Im X_ij with F = (E_ji - E_ij)/(2i).
  ComplexMatrix re(d, d), im(d, d);
  re(j, i) += 0.5;
  re(i, j) += 0.5;
  im(j, i) += complex(0.0, -0.5);
  im(i, j) += complex(0.0, 0.5);
  add_equality({{block, re}}, {}, value.real(), label + ".re");
  if (i != j) add_equality({{block, im}}, {}, value.imag(), label + ".im");
}

void SdpProblem::add_matrix_equality(const std::vector<MapTerm>& terms, const std::vector<ScalarMatrixTerm>& scalars,
                                     const ComplexMatrix& rhs, const std::string& label) {
  if (!rhs.square()) throw DimensionError("SDP: matrix equality right-hand side is not square");
  check_coef(rhs, rhs.rows());
  const std::size_t dout = rhs.rows();
  const std::size_t nrows = dout * dout;

  // columns[t][k] = svec(L_t(B_k)); row r of the compiled block is entry r of each column.
  std::vector<std::vector<std::vector<double>>> columns;
  for (const auto& term : terms) {
    check_block(term.block);
    const std::size_t d = blocks_[term.block].dim;
    std::vector<std::vector<double>> cols;
    for (std::size_t k = 0; k < d * d; ++k) {
      const ComplexMatrix image = term.map(basis_element(d, k));
      check_coef(image, dout);
      cols.push_back(svec(image));
    }
    columns.push_back(std::move(cols));
  }
  std::vector<std::vector<double>> scalar_cols;
  for (const auto& sc : scalars) {
    check_scalar(sc.scalar);
    check_coef(sc.coef, dout);
    scalar_cols.push_back(svec(sc.coef));
  }

  const auto target = svec(rhs);
  std::size_t r = 0;
  for (std::size_t i = 0; i < dout; ++i)
    for (std::size_t j = i; j < dout; ++j)
      for (int part = 0; part < (i == j ? 1 : 2); ++part, ++r) {
        Row row;
        for (std::size_t t = 0; t < terms.size(); ++t) {
          std::vector<double> coefs(columns[t].size());
          for (std::size_t k = 0; k < coefs.size(); ++k) coefs[k] = columns[t][k][r];
          row.blocks.emplace_back(terms[t].block, std::move(coefs));
        }
        for (std::size_t s = 0; s < scalars.size(); ++s) row.scalars.emplace_back(scalars[s].scalar, scalar_cols[s][r]);
        row.rhs = target[r];
        row.label = label + (part == 0 ? ".re(" : ".im(") + std::to_string(i) + "," + std::to_string(j) + ")";
        rows_.push_back(std::move(row));
      }
  (void)nrows;
}

std::size_t SdpProblem::num_variables() const {
  std::size_t n = scalars_.size();
  for (const auto& b : blocks_) n += b.dim * b.dim;
  return n;
}

std::size_t SdpProblem::embedded_dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += 2 * b.dim;
  return n;
}

std::string SdpProblem::to_json() const {
  using nlohmann::json;
  json j;
  j["format"] = "qcompat-sdp-1";
  j["packing"] =
      "per block: for i<=j row-major, X_ii or (sqrt2*Re X_ij, sqrt2*Im X_ij); "
      "Tr(F X) equals the dot product of packings";
  j["sense"] = sense_ == Sense::minimize ? "minimize" : "maximize";
  j["blocks"] = json::array();
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    j["blocks"].push_back({{"id", blocks_[b].id}, {"dim", blocks_[b].dim}, {"objective", block_obj_[b]}});
  j["scalars"] = json::array();
  for (std::size_t s = 0; s < scalars_.size(); ++s)
    j["scalars"].push_back({{"id", scalars_[s]}, {"objective", scalar_obj_[s]}});
  j["equalities"] = json::array();
  for (const auto& row : rows_) {
    json r;
    r["label"] = row.label;
    r["rhs"] = row.rhs;
    r["blocks"] = json::array();
    for (const auto& [b, coefs] : row.blocks) r["blocks"].push_back({{"block", b}, {"coefficients", coefs}});
    r["scalars"] = json::array();
    for (const auto& [s, c] : row.scalars) r["scalars"].push_back({{"scalar", s}, {"coefficient", c}});
    j["equalities"].push_back(std::move(r));
  }
  return j.dump(1);
}

// ---------------------------------------------------------------------------
// Solver

namespace {

struct BlockWork {
  std::size_t dim;
  std::size_t offset;
  RealMatrix embed;
  RealMatrix vectors;
  bool warm = false;
};

// Projects the packed block at `x` onto the PSD cone in place.
void project_psd(double* x, BlockWork& w, bool allow_warm) {
  const std::size_t d = w.dim;
  RealMatrix& e = w.embed;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      if (i == j) {
        e(i, i) = e(i + d, i + d) = x[pos++];
        e(i, i + d) = e(i + d, i) = 0.0;
        continue;
      }
      const double re = x[pos] / kSqrt2, im = x[pos + 1] / kSqrt2;
      pos += 2;
      e(i, j) = e(j, i) = e(i + d, j + d) = e(j + d, i + d) = re;
      e(i, j + d) = -im;
      e(j + d, i) = -im;
      e(i + d, j) = im;
      e(j, i + d) = im;
    }

  const bool use_warm = allow_warm && w.warm;
  RealEigenDecomposition eig = jacobi_eigen(e, use_warm ? &w.vectors : nullptr);
  w.vectors = std::move(eig.vectors);
  w.warm = true;

  const std::size_t n = 2 * d;
  double lo = eig.values[0], hi = eig.values[0];
  for (double l : eig.values) {
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  if (lo >= 0.0) return;
  if (hi <= 0.0) {
    std::fill(x, x + d * d, 0.0);
    return;
  }
  const RealMatrix& v = w.vectors;
  auto proj = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (eig.values[k] > 0.0) s += eig.values[k] * v(i, k) * v(j, k);
    return s;
  };
  pos = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      if (i == j) {
        x[pos++] = 0.5 * (proj(i, i) + proj(i + d, i + d));
        continue;
      }
      const double re = 0.5 * (proj(i, j) + proj(i + d, j + d));
      const double im = 0.5 * (proj(i + d, j) - proj(i, j + d));
      x[pos++] = kSqrt2 * re;
      x[pos++] = kSqrt2 * im;
    }
}

// Orthonormal basis of the row space with the matching right-hand side, so
// that the affine set is { x : Q x = beta }.
struct AffineSet {
  std::size_t n = 0;
  std::vector<std::vector<double>> q;
  std::vector<double> beta;
  bool consistent = true;

  void project(std::vector<double>& v) const {
    for (std::size_t k = 0; k < q.size(); ++k) {
      const auto& qk = q[k];
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += qk[i] * v[i];
      const double delta = beta[k] - s;
      for (std::size_t i = 0; i < n; ++i) v[i] += delta * qk[i];
    }
  }
};

AffineSet build_affine(const std::vector<std::vector<double>>& a, const std::vector<double>& b, std::size_t n) {
  AffineSet out;
  out.n = n;
  for (std::size_t r = 0; r < a.size(); ++r) {
    std::vector<double> v = a[r];
    double rhs = b[r];
    const double len = norm2(v);
    if (len == 0.0) {
      if (std::abs(rhs) > 1e-9) out.consistent = false;
      continue;
    }
    for (double& x : v) x /= len;
    rhs /= len;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < out.q.size(); ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += out.q[k][i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * out.q[k][i];
        rhs -= c * out.beta[k];
      }
    const double rest = norm2(v);
    if (rest < 1e-9) {
      if (std::abs(rhs) > 1e-8) out.consistent = false;
      continue;
    }
    for (double& x : v) x /= rest;
    out.q.push_back(std::move(v));
    out.beta.push_back(rhs / rest);
  }
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings) {
  if (problem.embedded_dim() > settings.max_embedded_dim)
    throw DimensionError("SDP: embedded dimension " + std::to_string(problem.embedded_dim()) +
                         " exceeds the configured limit");
  if (!(settings.relaxation > 0.0 && settings.relaxation < 2.0))
    throw DomainError("SDP: relaxation must lie in (0, 2)");

  const auto& blocks = problem.blocks();
  std::vector<BlockWork> work;
  std::size_t n = 0;
  for (const auto& b : blocks) {
    work.push_back({b.dim, n, RealMatrix(2 * b.dim, 2 * b.dim), RealMatrix(2 * b.dim, 2 * b.dim)});
    n += b.dim * b.dim;
  }
  const std::size_t scalar_offset = n;
  n += problem.scalars().size();

  // Dense rows.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& row : problem.rows()) {
    std::vector<double> dense(n, 0.0);
    for (const auto& [blk, coefs] : row.blocks)
      for (std::size_t k = 0; k < coefs.size(); ++k) dense[work[blk].offset + k] += coefs[k];
    for (const auto& [s, c] : row.scalars) dense[scalar_offset + s] += c;
    a.push_back(std::move(dense));
    b.push_back(row.rhs);
  }

  const double sign = problem.sense() == Sense::maximize ? -1.0 : 1.0;
  std::vector<double> c(n, 0.0);
  for (std::size_t blk = 0; blk < blocks.size(); ++blk)
    for (std::size_t k = 0; k < problem.block_objective()[blk].size(); ++k)
      c[work[blk].offset + k] = sign * problem.block_objective()[blk][k];
  for (std::size_t s = 0; s < problem.scalars().size(); ++s)
    c[scalar_offset + s] = sign * problem.scalar_objective()[s];

  SdpSolution sol;
  auto unpack = [&](const std::vector<double>& z) {
    sol.block_values.clear();
    for (const auto& w : work) sol.block_values.push_back(smat(z.data() + w.offset, w.dim));
    sol.scalar_values.assign(z.begin() + static_cast<std::ptrdiff_t>(scalar_offset), z.end());
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += c[i] * z[i];
    sol.objective_value = sign * obj;
  };

  const AffineSet affine = build_affine(a, b, n);
  if (!affine.consistent) {
    sol.status = SdpStatus::infeasible;
    unpack(std::vector<double>(n, 0.0));
    sol.primal_residual = std::numeric_limits<double>::infinity();
    return sol;
  }

  // Largest violation of the original, unnormalized rows.
  auto row_residual = [&](const std::vector<double>& w) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      double s = -b[r];
      for (std::size_t i = 0; i < n; ++i) s += a[r][i] * w[i];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  };

  std::vector<double> x(n, 0.0), z(n, 0.0), u(n, 0.0), v(n), z_prev(n);
  double rho = settings.rho;
  const double alpha = settings.relaxation;
  int stall = 0;

  auto project_cone = [&](std::vector<double>& w, int iter) {
    const bool allow_warm = (iter % 1000) != 0;
    for (auto& bw : work) project_psd(w.data() + bw.offset, bw, allow_warm);
  };

  sol.status = SdpStatus::max_iterations;
  int iter = 0;
  double rp = 0.0, rd = 0.0;
  for (; iter < settings.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - u[i] - c[i] / rho;
    affine.project(v);
    x = v;

    z_prev = z;
    for (std::size_t i = 0; i < n; ++i) v[i] = alpha * x[i] + (1.0 - alpha) * z_prev[i] + u[i];
    z = v;
    project_cone(z, iter);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] - z[i];

    double sp = 0.0, sd = 0.0, nx = 0.0, nz = 0.0, nu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dp = x[i] - z[i];
      const double dd = z[i] - z_prev[i];
      sp += dp * dp;
      sd += dd * dd;
      nx += x[i] * x[i];
      nz += z[i] * z[i];
      nu += u[i] * u[i];
    }
    rp = std::sqrt(sp);
    const double displacement = std::sqrt(sd);
    rd = rho * displacement;
    const double scale_p = std::max(std::sqrt(nx), std::sqrt(nz));
    const double scale_d = rho * std::sqrt(nu);
    if (rp <= settings.eps_abs + settings.eps_rel * scale_p && rd <= settings.eps_abs + settings.eps_rel * scale_d &&
        row_residual(z) <= settings.eps_abs) {
      sol.status = SdpStatus::optimal;
      ++iter;
      break;
    }

    if (displacement <= 1e-7 * (1.0 + std::sqrt(nz)) && rp > settings.stall_primal) {
      if (++stall >= settings.stall_window) {
        sol.status = SdpStatus::infeasible;
        ++iter;
        break;
      }
    } else {
      stall = 0;
    }

    if (settings.adaptive_rho && iter % 50 == 49) {
      const double np = rp / std::max(scale_p, 1e-12);
      const double nd = rd / std::max(scale_d, 1e-12);
      if (np > 0.0 && nd > 0.0) {
        const double ratio = std::sqrt(np / nd);
        if (ratio > 5.0 || ratio < 0.2) {
          const double next = std::clamp(rho * ratio, 1e-6, 1e6);
          for (double& ui : u) ui *= rho / next;
          rho = next;
        }
      }
    }
  }

  sol.iterations = iter;
  sol.dual_residual = rd;
  unpack(z);
  sol.primal_residual = std::max(rp, row_residual(z));
  if (sol.status == SdpStatus::optimal && sol.primal_residual > 1e-7) sol.status = SdpStatus::max_iterations;
  return sol;
}

}  // namespace qcompat
