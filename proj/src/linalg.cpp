#include "igatc/linalg.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SPQRSupport>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <limits>

namespace igatc {

NullSpace null_space(const Eigen::MatrixXd& A, double rel_tol) {
  NullSpace ns;
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0 || n == 0) {
    ns.basis = Eigen::MatrixXd::Identity(n, n);
    return ns;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  ns.sigma_max = s.size() ? s(0) : 0.0;
  const double tol = rel_tol * ns.sigma_max;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++ns.rank;
  ns.basis = svd.matrixV().rightCols(n - ns.rank);
  return ns;
}

ConstraintBasis constraint_basis(const SparseMatrix& G, double rel_tol) {
  const int n = static_cast<int>(G.cols());
  std::vector<int> touched;
  std::vector<int> pos(n, -1);
  for (int c = 0; c < G.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(G, c); it; ++it)
      if (it.value() != 0.0) {
        touched.push_back(c);
        break;
      }
  for (size_t i = 0; i < touched.size(); ++i) pos[touched[i]] = static_cast<int>(i);
  Eigen::MatrixXd Gt = Eigen::MatrixXd::Zero(G.rows(), static_cast<int>(touched.size()));
  for (int c = 0; c < G.outerSize(); ++c)
    if (pos[c] >= 0)
      for (SparseMatrix::InnerIterator it(G, c); it; ++it) Gt(it.row(), pos[c]) = it.value();
  const NullSpace ns = null_space(Gt, rel_tol);
  ConstraintBasis cb;
  cb.rank = ns.rank;
  const int free_cols = n - static_cast<int>(touched.size());
  cb.Z.resize(n, free_cols + ns.basis.cols());
  std::vector<Eigen::Triplet<double>> t;
  int col = 0;
  for (int c = 0; c < n; ++c)
    if (pos[c] < 0) t.emplace_back(c, col++, 1.0);
  for (int j = 0; j < ns.basis.cols(); ++j, ++col)
    for (size_t i = 0; i < touched.size(); ++i)
      if (std::abs(ns.basis(i, j)) > 1e-15) t.emplace_back(touched[i], col, ns.basis(i, j));
  cb.Z.setFromTriplets(t.begin(), t.end());
  return cb;
}

ZeroCluster count_zeros(const Eigen::VectorXd& ev, double rel) {
  ZeroCluster z;
  if (ev.size() == 0) return z;
  const double scale = ev.cwiseAbs().maxCoeff();
  z.threshold = rel * scale;
  std::vector<double> a(ev.data(), ev.data() + ev.size());
  for (double& v : a) v = std::abs(v);
  std::sort(a.begin(), a.end());
  for (double v : a)
    if (v <= z.threshold) ++z.zeros;
  z.largest_zero = z.zeros > 0 ? a[z.zeros - 1] : 0.0;
  z.smallest_nonzero = z.zeros < static_cast<int>(a.size()) ? a[z.zeros] : 0.0;
  // compare the clusters on both sides of the threshold
  const double low = std::max(z.largest_zero, std::numeric_limits<double>::epsilon() * scale);
  z.gap = z.zeros < static_cast<int>(a.size()) ? z.smallest_nonzero / low : std::numeric_limits<double>::infinity();
  z.ambiguous = z.gap < 10.0;
  return z;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver did not converge");
  return es.eigenvalues();
}

struct SpdSolver::Impl {
  Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
};

SpdSolver::SpdSolver() : impl_(std::make_unique<Impl>()) {}
SpdSolver::~SpdSolver() = default;

bool SpdSolver::factor(const SparseMatrix& A) {
  impl_->llt.compute(A);
  return impl_->llt.info() == Eigen::Success;
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd x = impl_->llt.solve(b);
  if (impl_->llt.info() != Eigen::Success) throw SolverError("Cholesky solve failed");
  return x;
}

struct LuSolver::Impl {
  struct Lu : Eigen::UmfPackLU<SparseMatrix> {
    double rcond() const { return m_umfpackInfo(UMFPACK_RCOND); }
  } lu;
};

LuSolver::LuSolver() : impl_(std::make_unique<Impl>()) {}
LuSolver::~LuSolver() = default;

bool LuSolver::factor(const SparseMatrix& A) {
  impl_->lu.compute(A);
  return impl_->lu.info() == Eigen::Success;
}

double LuSolver::rcond() const { return impl_->lu.rcond(); }

Eigen::VectorXd LuSolver::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("LU solve failed");
  return x;
}

Eigen::VectorXd least_squares(const SparseMatrix& A, const Eigen::VectorXd& b) {
  Eigen::SPQR<SparseMatrix> qr;
  qr.compute(A);
  if (qr.info() != Eigen::Success) throw SolverError("sparse QR failed");
  Eigen::VectorXd x = qr.solve(b);
  if (qr.info() != Eigen::Success) throw SolverError("sparse QR solve failed");
  return x;
}

SparseRank sparse_rank(const SparseMatrix& A, double tol) {
  SparseRank r;
  if (A.cols() == 0) return r;
  Eigen::SPQR<SparseMatrix> qr;
  if (tol > 0.0) qr.setPivotThreshold(tol);
  qr.compute(A);
  if (qr.info() != Eigen::Success) throw SolverError("sparse QR failed");
  r.rank = static_cast<int>(qr.rank());
  const auto perm = qr.colsPermutation();
  for (int j = r.rank; j < A.cols(); ++j) r.dependent_columns.push_back(static_cast<int>(perm.indices()(j)));
  std::sort(r.dependent_columns.begin(), r.dependent_columns.end());
  return r;
}

SparseRank dense_rank(const Eigen::MatrixXd& A, double rel_tol) {
  SparseRank r;
  if (A.cols() == 0) return r;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(rel_tol);
  r.rank = static_cast<int>(qr.rank());
  for (int j = r.rank; j < A.cols(); ++j) r.dependent_columns.push_back(static_cast<int>(qr.colsPermutation().indices()(j)));
  std::sort(r.dependent_columns.begin(), r.dependent_columns.end());
  return r;
}

}  // namespace igatc
