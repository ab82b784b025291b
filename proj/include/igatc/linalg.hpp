#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <vector>

namespace igatc {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orthonormal null-space basis of a dense matrix by SVD; singular values below rel_tol * sigma_max count as zero.
struct NullSpace {
  Eigen::MatrixXd basis;
  int rank = 0;
  double sigma_max = 0.0;
};
NullSpace null_space(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

/// Basis of {x : G x = 0}: unit vectors for columns that G does not touch and a dense null-space block on
/// the touched columns.
struct ConstraintBasis {
  SparseMatrix Z;
  int rank = 0;
};
ConstraintBasis constraint_basis(const SparseMatrix& G, double rel_tol = 1e-10);

/// Zero cluster of a nonnegative spectrum under a relative threshold, with the gap to the rest.
struct ZeroCluster {
  int zeros = 0;
  double threshold = 0.0;
  double largest_zero = 0.0;
  double smallest_nonzero = 0.0;
  double gap = 0.0;
  bool ambiguous = false;
};
ZeroCluster count_zeros(const Eigen::VectorXd& eigenvalues, double rel = 1e-8);

/// Ascending eigenvalues of a dense symmetric matrix.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A);

/// Sparse Cholesky of an SPD matrix (supernodal).
class SpdSolver {
 public:
  SpdSolver();
  ~SpdSolver();
  SpdSolver(const SpdSolver&) = delete;
  SpdSolver& operator=(const SpdSolver&) = delete;
  /// Returns false when the matrix is not numerically positive definite.
  bool factor(const SparseMatrix& A);
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sparse LU for general square systems.
class LuSolver {
 public:
  LuSolver();
  ~LuSolver();
  LuSolver(const LuSolver&) = delete;
  LuSolver& operator=(const LuSolver&) = delete;
  bool factor(const SparseMatrix& A);
  /// Smallest over largest pivot magnitude of the last factorization.
  double rcond() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Numerical rank of a sparse matrix by rank-revealing sparse QR, with the columns found dependent
/// (the ones the pivoting moved past the rank).
struct SparseRank {
  int rank = 0;
  std::vector<int> dependent_columns;
};
SparseRank sparse_rank(const SparseMatrix& A, double tol = -1.0);

/// Minimum-residual solution by rank-revealing sparse QR; consistent singular systems are solved exactly.
Eigen::VectorXd least_squares(const SparseMatrix& A, const Eigen::VectorXd& b);

/// Dense counterpart used for small matrices and as a cross-check.
SparseRank dense_rank(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

}  // namespace igatc
