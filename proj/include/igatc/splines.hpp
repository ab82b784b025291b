#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace igatc {

struct SplineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Open knot vector on [0,1] with a polynomial degree.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);
  /// `max_multiplicity` bounds interior knot repetition (default p+1).
  KnotVector(int degree, std::vector<double> knots, int max_multiplicity);

  /// `elements` equal spans, interior knots repeated so that the splines are C^regularity.
  /// regularity < 0 means maximal (p-1).
  static KnotVector uniform(int degree, int elements, int regularity = -1);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  double operator[](int i) const { return knots_[i]; }
  /// Number of basis functions.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  std::vector<double> breakpoints() const;
  int spans() const { return static_cast<int>(breakpoints().size()) - 1; }
  /// Largest nonempty span length.
  double mesh_size() const;
  /// Index mu with knots[mu] <= x < knots[mu+1]; x == 1 maps to the last nonempty span.
  int find_span(double x) const;

  bool operator==(const KnotVector& o) const = default;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

/// Degree p-1 knot vector obtained by dropping the first and last knot.
/// Keeps the source so the Curry-Schoenberg scaling can be evaluated.
class ReducedKnotVector {
 public:
  explicit ReducedKnotVector(const KnotVector& source);
  const KnotVector& source() const { return source_; }
  const KnotVector& knots() const { return reduced_; }
  int degree() const { return reduced_.degree(); }
  int size() const { return reduced_.size(); }
  /// p / (xi_{j+p+1} - xi_{j+1}) on the source knots, 0 for an empty support.
  double scale(int j) const;

 private:
  KnotVector source_;
  KnotVector reduced_;
};

/// Nonzero basis functions at a point: values(r) belongs to function first + r.
template <typename Scalar>
struct BasisEval {
  int first = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
};

/// Nonzero basis functions and derivatives: ders(d, r) is the d-th derivative of function first + r.
template <typename Scalar>
struct BasisDerivs {
  int first = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ders;
};

template <typename Scalar>
BasisEval<Scalar> eval_basis(const KnotVector& kv, Scalar x) {
  const int p = kv.degree();
  const int mu = kv.find_span(static_cast<double>(x));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> N(p + 1), left(p + 1), right(p + 1);
  N(0) = Scalar(1);
  for (int j = 1; j <= p; ++j) {
    left(j) = x - Scalar(kv[mu + 1 - j]);
    right(j) = Scalar(kv[mu + j]) - x;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      const Scalar tmp = N(r) / (right(r + 1) + left(j - r));
      N(r) = saved + right(r + 1) * tmp;
      saved = left(j - r) * tmp;
    }
    N(j) = saved;
  }
  return {mu - p, N};
}

template <typename Scalar>
BasisDerivs<Scalar> eval_basis_derivs(const KnotVector& kv, Scalar x, int nder) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int p = kv.degree();
  const int mu = kv.find_span(static_cast<double>(x));
  Mat ndu(p + 1, p + 1), a(2, p + 1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> left(p + 1), right(p + 1);
  ndu(0, 0) = Scalar(1);
  for (int j = 1; j <= p; ++j) {
    left(j) = x - Scalar(kv[mu + 1 - j]);
    right(j) = Scalar(kv[mu + j]) - x;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right(r + 1) + left(j - r);
      const Scalar tmp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right(r + 1) * tmp;
      saved = left(j - r) * tmp;
    }
    ndu(j, j) = saved;
  }
  Mat ders = Mat::Zero(nder + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = Scalar(1);
    for (int k = 1; k <= std::min(nder, p); ++k) {
      Scalar d(0);
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  Scalar f(p);
  for (int k = 1; k <= std::min(nder, p); ++k) {
    ders.row(k) *= f;
    f *= Scalar(p - k);
  }
  return {mu - p, ders};
}

/// Scaled degree p-1 splines D_j = p/(xi_{j+p+1}-xi_{j+1}) B_j on the reduced knots,
/// so that B_i' = D_{i-1} - D_i.
template <typename Scalar>
BasisEval<Scalar> eval_curry_schoenberg(const ReducedKnotVector& rk, Scalar x) {
  BasisEval<Scalar> e = eval_basis(rk.knots(), x);
  for (int r = 0; r < e.values.size(); ++r) e.values(r) *= Scalar(rk.scale(e.first + r));
  return e;
}

Eigen::VectorXd greville_abscissae(const KnotVector& kv);

/// Bisect every nonempty span `levels` times.
KnotVector refine_dyadic(const KnotVector& kv, int levels);

/// Dense collocation matrix A(g, i) = B_i(x_g).
Eigen::MatrixXd collocation_matrix(const KnotVector& kv, const Eigen::VectorXd& x);

}  // namespace igatc
