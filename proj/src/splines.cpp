#include "igatc/splines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace igatc {

KnotVector::KnotVector(int degree, std::vector<double> knots) : KnotVector(degree, std::move(knots), degree + 1) {}

KnotVector::KnotVector(int degree, std::vector<double> knots, int max_multiplicity)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw SplineError("negative degree");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * degree_ + 2) throw SplineError("knot vector too short for its degree");
  for (int i = 1; i < m; ++i)
    if (knots_[i] < knots_[i - 1]) throw SplineError("knot vector is not nondecreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != 0.0 || knots_[m - 1 - i] != 1.0) {
      std::ostringstream os;
      os << "knot vector is not open on [0,1] (degree " << degree_ << ")";
      throw SplineError(os.str());
    }
  }
  for (int i = degree_ + 1; i < m - degree_ - 1; ++i) {
    int mult = 1;
    while (i + mult < m && knots_[i + mult] == knots_[i]) ++mult;
    if (knots_[i] > 0.0 && knots_[i] < 1.0 && mult > max_multiplicity)
      throw SplineError("interior knot multiplicity exceeds p+1");
  }
}

KnotVector KnotVector::uniform(int degree, int elements, int regularity) {
  if (elements < 1) throw SplineError("need at least one element");
  if (regularity < 0) regularity = degree - 1;
  if (regularity > degree - 1) throw SplineError("regularity exceeds p-1");
  const int mult = degree - regularity;
  std::vector<double> k(degree + 1, 0.0);
  for (int e = 1; e < elements; ++e)
    for (int r = 0; r < mult; ++r) k.push_back(static_cast<double>(e) / elements);
  k.insert(k.end(), degree + 1, 1.0);
  return KnotVector(degree, std::move(k));
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b(knots_);
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double KnotVector::mesh_size() const {
  const auto b = breakpoints();
  double h = 0.0;
  for (size_t i = 1; i < b.size(); ++i) h = std::max(h, b[i] - b[i - 1]);
  return h;
}

int KnotVector::find_span(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw SplineError("evaluation point outside [0,1]");
  const int n = size();
  if (x >= knots_[n]) {
    int mu = n - 1;
    while (mu > degree_ && knots_[mu] == knots_[mu + 1]) --mu;
    return mu;
  }
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

ReducedKnotVector::ReducedKnotVector(const KnotVector& source) : source_(source) {
  if (source.degree() < 1) throw SplineError("cannot reduce a degree 0 knot vector");
  const auto& k = source.knots();
  reduced_ = KnotVector(source.degree() - 1, std::vector<double>(k.begin() + 1, k.end() - 1), source.degree() + 1);
}

double ReducedKnotVector::scale(int j) const {
  const int p = source_.degree();
  const double w = source_[j + p + 1] - source_[j + 1];
  return w > 0.0 ? p / w : 0.0;
}

Eigen::VectorXd greville_abscissae(const KnotVector& kv) {
  const int n = kv.size(), p = kv.degree();
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    if (p == 0) {
      g(i) = 0.5 * (kv[i] + kv[i + 1]);
      continue;
    }
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += kv[i + j];
    g(i) = s / p;
  }
  return g;
}

KnotVector refine_dyadic(const KnotVector& kv, int levels) {
  std::vector<double> k = kv.knots();
  for (int l = 0; l < levels; ++l) {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < k.size(); ++i) {
      out.push_back(k[i]);
      if (k[i + 1] > k[i]) out.push_back(0.5 * (k[i] + k[i + 1]));
    }
    out.push_back(k.back());
    k = std::move(out);
  }
  return KnotVector(kv.degree(), std::move(k));
}

Eigen::MatrixXd collocation_matrix(const KnotVector& kv, const Eigen::VectorXd& x) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(x.size(), kv.size());
  for (int g = 0; g < x.size(); ++g) {
    const auto e = eval_basis(kv, x(g));
    for (int r = 0; r < e.values.size(); ++r) A(g, e.first + r) = e.values(r);
  }
  return A;
}

}  // namespace igatc
