#pragma once

// Small dense semidefinite programs:
//
//   min / max   sum_b Tr(C_b X_b) + sum_k c_k s_k
//   subject to  affine equalities in (X_b, s_k),   X_b Hermitian PSD,  s_k free.
//
// Solved by ADMM (Douglas-Rachford splitting): an exact projection onto the
// affine set through a cached orthonormal basis of the constraint rows,
// alternated with projections onto the PSD cones computed on the real
// symmetric embedding of each block.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qcompat/linalg.hpp"

namespace qcompat {

enum class Sense { minimize, maximize };
enum class SdpStatus { optimal, infeasible, max_iterations };

const char* to_string(SdpStatus s);

/// Linear map taking Hermitian operators to Hermitian operators.
using HermitianMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Packed coordinates of a Hermitian d x d matrix: for each i <= j in
/// row-major order, X_ii or (sqrt2 Re X_ij, sqrt2 Im X_ij). The Euclidean
/// inner product of two packings equals Tr(X Y).
std::vector<double> svec(const ComplexMatrix& h);
ComplexMatrix smat(const double* packed, std::size_t d);

/// H -> [[Re H, -Im H], [Im H, Re H]].
RealMatrix real_embed(const ComplexMatrix& h);

class SdpProblem {
 public:
  struct BlockCoef {
    std::size_t block;
    ComplexMatrix coef;  // Hermitian; contributes Tr(coef X_block)
  };
  struct ScalarCoef {
    std::size_t scalar;
    double coef;
  };
  struct MapTerm {
    std::size_t block;
    HermitianMap map;
  };
  struct ScalarMatrixTerm {
    std::size_t scalar;
    ComplexMatrix coef;  // Hermitian; contributes s_k * coef
  };

  struct Block {
    std::string id;
    std::size_t dim;
  };

  /// One compiled real equality row.
  struct Row {
    std::vector<std::pair<std::size_t, std::vector<double>>> blocks;  // (block, packed coefficients)
    std::vector<std::pair<std::size_t, double>> scalars;
    double rhs = 0.0;
    std::string label;
  };

  std::size_t add_block(std::string id, std::size_t dim);
  std::size_t add_scalar(std::string id);

  void set_sense(Sense s) { sense_ = s; }
  void add_objective(std::size_t block, const ComplexMatrix& coef);
  void add_scalar_objective(std::size_t scalar, double coef);

  /// sum Tr(F_b X_b) + sum a_k s_k = rhs.
  void add_equality(std::vector<BlockCoef> blocks, std::vector<ScalarCoef> scalars, double rhs,
                    std::string label = {});
  /// (X_block)_{ij} = value, compiled to its real and imaginary parts.
  void add_entry_equality(std::size_t block, std::size_t i, std::size_t j, complex value, std::string label = {});
  /// sum_b L_b(X_b) + sum_k s_k M_k = rhs for a Hermitian rhs of size d,
  /// compiled to d(d+1)/2 real-part and d(d-1)/2 imaginary-part rows.
  void add_matrix_equality(const std::vector<MapTerm>& terms, const std::vector<ScalarMatrixTerm>& scalars,
                           const ComplexMatrix& rhs, const std::string& label = {});

  Sense sense() const { return sense_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<std::string>& scalars() const { return scalars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<std::vector<double>>& block_objective() const { return block_obj_; }
  const std::vector<double>& scalar_objective() const { return scalar_obj_; }

  std::size_t num_variables() const;
  /// Sum over blocks of the real-embedding dimension 2 d.
  std::size_t embedded_dim() const;

  /// Self-describing dump of the compiled problem, for cross-checking
  /// against an external solver.
  std::string to_json() const;

 private:
  void check_block(std::size_t b) const;
  void check_scalar(std::size_t s) const;

  Sense sense_ = Sense::minimize;
  std::vector<Block> blocks_;
  std::vector<std::string> scalars_;
  std::vector<std::vector<double>> block_obj_;
  std::vector<double> scalar_obj_;
  std::vector<Row> rows_;
};

struct SdpSettings {
  double relaxation = 1.5;
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  int max_iterations = 100000;
  double rho = 0.1;
  bool adaptive_rho = true;
  /// Infeasible once the iterate stops moving while the primal residual
  /// stays above `stall_primal` for this many consecutive iterations.
  int stall_window = 5000;
  double stall_primal = 1e-4;
  std::size_t max_embedded_dim = 64;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iterations;
  double objective_value = 0.0;
  std::vector<ComplexMatrix> block_values;
  std::vector<double> scalar_values;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Throws DimensionError / DomainError for malformed problems before any
/// iteration happens.
SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {});

}  // namespace qcompat
