#include <doctest.h>

#include "igatc/quadrature.hpp"
#include "igatc/splines.hpp"

#include <random>

using namespace igatc;

namespace {

/// Textbook recursion with 0/0 = 0, right-closed at x = 1.
double cox_de_boor(const std::vector<double>& k, int i, int p, double x) {
  if (p == 0) {
    if (x == 1.0) {
      // last nonempty span owns the right end point
      int last = static_cast<int>(k.size()) - 2;
      while (k[last] == k[last + 1]) --last;
      return i == last ? 1.0 : 0.0;
    }
    return (k[i] <= x && x < k[i + 1]) ? 1.0 : 0.0;
  }
  double v = 0.0;
  if (k[i + p] > k[i]) v += (x - k[i]) / (k[i + p] - k[i]) * cox_de_boor(k, i, p - 1, x);
  if (k[i + p + 1] > k[i + 1]) v += (k[i + p + 1] - x) / (k[i + p + 1] - k[i + 1]) * cox_de_boor(k, i + 1, p - 1, x);
  return v;
}

std::vector<KnotVector> sample_knot_vectors() {
  return {KnotVector(1, {0, 0, 1, 1}),
          KnotVector(2, {0, 0, 0, 0.5, 1, 1, 1}),
          KnotVector(3, {0, 0, 0, 0, 0.5, 1, 1, 1, 1}),
          KnotVector(3, {0, 0, 0, 0, 0.25, 0.25, 0.5, 0.75, 0.75, 0.75, 1, 1, 1, 1}),
          KnotVector::uniform(4, 5),
          KnotVector::uniform(3, 3, 1),
          KnotVector::uniform(2, 7, 0)};
}

}  // namespace

TEST_CASE("linear hat at the midpoint") {
  const auto e = eval_basis(KnotVector(1, {0, 0, 1, 1}), 0.5);
  CHECK(e.first == 0);
  CHECK(e.values(0) == doctest::Approx(0.5));
  CHECK(e.values(1) == doctest::Approx(0.5));
}

TEST_CASE("basis values agree with the recursive definition") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& kv : sample_knot_vectors()) {
    std::vector<double> xs{0.0, 1.0, 0.25, 0.5};
    for (int r = 0; r < 30; ++r) xs.push_back(U(rng));
    for (double x : xs) {
      const auto e = eval_basis(kv, x);
      for (int i = 0; i < kv.size(); ++i) {
        const int r = i - e.first;
        const double v = (r >= 0 && r <= kv.degree()) ? e.values(r) : 0.0;
        CHECK(v == doctest::Approx(cox_de_boor(kv.knots(), i, kv.degree(), x)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("quadratic example at x = 0.25") {
  const KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  const auto e = eval_basis(kv, 0.25);
  CHECK(e.first == 0);
  for (int r = 0; r < 3; ++r) CHECK(e.values(r) == doctest::Approx(cox_de_boor(kv.knots(), r, 2, 0.25)).epsilon(1e-14));
  CHECK(e.values(0) == doctest::Approx(0.25));
  CHECK(e.values(1) == doctest::Approx(0.625));
  CHECK(e.values(2) == doctest::Approx(0.125));
}

TEST_CASE("partition of unity and nonnegativity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& kv : sample_knot_vectors())
    for (int r = 0; r < 100; ++r) {
      const auto e = eval_basis(kv, U(rng));
      CHECK(std::abs(e.values.sum() - 1.0) < 1e-12);
      CHECK(e.values.minCoeff() >= 0.0);
    }
}

TEST_CASE("evaluation outside [0,1] is a domain error") {
  const auto kv = KnotVector::uniform(2, 3);
  CHECK_THROWS_AS(eval_basis(kv, 1.5), SplineError);
  CHECK_THROWS_AS(eval_basis(kv, -0.1), SplineError);
}

TEST_CASE("knot vector validation") {
  CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1, 1}), SplineError);
  CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.7, 0.5, 1, 1}), SplineError);
  CHECK_THROWS_AS(KnotVector(1, {0.1, 0.1, 1, 1}), SplineError);
  const auto kv = KnotVector::uniform(3, 4, 1);
  CHECK(kv.size() == 3 + 1 + 2 * 3);
  CHECK(kv.spans() == 4);
  CHECK(kv.mesh_size() == doctest::Approx(0.25));
}

TEST_CASE("reduced knot vector drops the end knots") {
  const KnotVector kv(3, {0, 0, 0, 0, 0.5, 1, 1, 1, 1});
  const ReducedKnotVector r(kv);
  CHECK(r.degree() == 2);
  CHECK(r.knots().knots().size() == kv.knots().size() - 2);
  CHECK(r.size() == kv.size() - 1);
}

TEST_CASE("Curry-Schoenberg basis for a linear source is the constant one") {
  const ReducedKnotVector r(KnotVector(1, {0, 0, 1, 1}));
  for (double x : {0.0, 0.3, 1.0}) {
    const auto e = eval_curry_schoenberg(r, x);
    CHECK(e.first == 0);
    CHECK(e.values(0) == doctest::Approx(1.0));
  }
}

TEST_CASE("derivative identity against centered differences") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.02, 0.98);
  for (const auto& kv : sample_knot_vectors()) {
    const ReducedKnotVector r(kv);
    const double h = kv.mesh_size();
    const double eps = 1e-6;
    for (int t = 0; t < 20; ++t) {
      const double x = U(rng);
      const auto d = eval_curry_schoenberg(r, x);
      auto D = [&](int j) {
        const int q = j - d.first;
        return (q >= 0 && q < d.values.size()) ? d.values(q) : 0.0;
      };
      for (int i = 0; i < kv.size(); ++i) {
        const double fd = (cox_de_boor(kv.knots(), i, kv.degree(), x + eps) -
                           cox_de_boor(kv.knots(), i, kv.degree(), x - eps)) / (2 * eps);
        CHECK(std::abs(D(i - 1) - D(i) - fd) < 1e-6 / h);
      }
    }
  }
}

TEST_CASE("analytic derivatives match the difference identity") {
  for (const auto& kv : sample_knot_vectors()) {
    const ReducedKnotVector r(kv);
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
      const auto b = eval_basis_derivs(kv, x, 1);
      const auto d = eval_curry_schoenberg(r, x);
      auto D = [&](int j) {
        const int q = j - d.first;
        return (q >= 0 && q < d.values.size()) ? d.values(q) : 0.0;
      };
      for (int q = 0; q <= kv.degree(); ++q) {
        const int i = b.first + q;
        CHECK(b.ders(1, q) == doctest::Approx(D(i - 1) - D(i)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("Curry-Schoenberg functions integrate to one") {
  for (const auto& kv : sample_knot_vectors()) {
    const ReducedKnotVector r(kv);
    const auto rule = composite_gauss(kv.breakpoints(), kv.degree() + 1);
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(r.size());
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto e = eval_curry_schoenberg(r, rule.points[q]);
      for (int s = 0; s < e.values.size(); ++s) integral(e.first + s) += rule.weights[q] * e.values(s);
    }
    for (int j = 0; j < r.size(); ++j) {
      if (r.scale(j) == 0.0) CHECK(integral(j) == 0.0);
      else CHECK(integral(j) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero-width supports give identically zero functions") {
  // degree 1 with a double interior knot: the reduced degree 0 function on [0.5,0.5] vanishes
  const KnotVector kv(1, {0, 0, 0.5, 0.5, 1, 1});
  const ReducedKnotVector r(kv);
  CHECK(r.scale(1) == 0.0);
  for (double x : {0.2, 0.5, 0.8}) {
    const auto e = eval_curry_schoenberg(r, x);
    for (int s = 0; s < e.values.size(); ++s)
      if (e.first + s == 1) CHECK(e.values(s) == 0.0);
  }
}

TEST_CASE("Greville abscissae") {
  const auto g2 = greville_abscissae(KnotVector(2, {0, 0, 0, 1, 1, 1}));
  CHECK(g2.size() == 3);
  CHECK(g2(1) == doctest::Approx(0.5));
  const auto g3 = greville_abscissae(KnotVector(3, {0, 0, 0, 0, 0.5, 1, 1, 1, 1}));
  const double expect[] = {0.0, 1.0 / 6, 0.5, 5.0 / 6, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(g3(i) == doctest::Approx(expect[i]));
  const auto g1 = greville_abscissae(KnotVector(1, {0, 0, 0.3, 0.6, 1, 1}));
  CHECK(g1(1) == doctest::Approx(0.3));
  CHECK(g1(2) == doctest::Approx(0.6));
  for (const auto& kv : sample_knot_vectors()) {
    const auto g = greville_abscissae(refine_dyadic(kv, 2));
    CHECK(g(0) == 0.0);
    CHECK(g(g.size() - 1) == doctest::Approx(1.0));
    for (int i = 1; i < g.size(); ++i) CHECK(g(i) >= g(i - 1));
  }
}

TEST_CASE("dyadic refinement") {
  const KnotVector kv(2, {0, 0, 0, 1, 1, 1});
  CHECK(refine_dyadic(kv, 0) == kv);
  CHECK(refine_dyadic(kv, 1) == KnotVector(2, {0, 0, 0, 0.5, 1, 1, 1}));
  const auto k3 = KnotVector::uniform(3, 3);
  CHECK(refine_dyadic(k3, 2).spans() == 4 * k3.spans());
}

TEST_CASE("Gauss rule exactness") {
  for (int n = 1; n <= 8; ++n) {
    const auto g = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) s += g.weights(q) * std::pow(g.points(q), deg);
      CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-14));
    }
  }
}
