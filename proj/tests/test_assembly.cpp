#include <doctest.h>

#include "igatc/experiments.hpp"

#include <cmath>
#include <numbers>

using namespace igatc;

namespace {

/// Gauss-Legendre rule on [a, b] via the Jacobi matrix eigenproblem.
std::vector<std::pair<double, double>> gauss(int n, double a, double b) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<std::pair<double, double>> r;
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i), w = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    r.emplace_back(a + 0.5 * (b - a) * (x + 1.0), 0.5 * (b - a) * w);
  }
  return r;
}

/// Brute-force integral over all patches of a pointwise product of two fields.
template <class F>
double integrate(const ControlMesh& m, int elements, int n, F&& f) {
  double sum = 0.0;
  for (int p = 0; p < m.patches(); ++p)
    for (int ex = 0; ex < elements; ++ex)
      for (int ey = 0; ey < elements; ++ey)
        for (int ez = 0; ez < elements; ++ez) {
          const double h = 1.0 / elements;
          for (auto [x, wx] : gauss(n, ex * h, (ex + 1) * h))
            for (auto [y, wy] : gauss(n, ey * h, (ey + 1) * h))
              for (auto [z, wz] : gauss(n, ez * h, (ez + 1) * h)) {
                const Eigen::Vector3d xi(x, y, z);
                sum += wx * wy * wz * eval_map(m.domain.patches[p], xi).det * f(p, xi);
              }
        }
  return sum;
}

Eigen::VectorXd unit(int n, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("mass and curl-curl matrices are symmetric with the gradients in the kernel") {
  for (const std::string name : {"cube", "cube-5", "quarter-ring", "periodic-cube"}) {
    CAPTURE(name);
    const auto m = make_mesh(name, 2, 2);
    const SparseMatrix M = assemble_mass(m), K = assemble_curlcurl(m);
    CHECK(SparseMatrix(M - SparseMatrix(M.transpose())).norm() == 0.0);
    CHECK(SparseMatrix(K - SparseMatrix(K.transpose())).norm() == 0.0);
    const SparseMatrix KG = K * gradient_incidence(m);
    CHECK(Eigen::MatrixXd(KG).cwiseAbs().maxCoeff() < 1e-10 * Eigen::MatrixXd(K).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("mass matrix is positive definite on the coarse cube") {
  const auto m = make_mesh("cube", 2, 2);
  const DofMap f = free_dofs(m, 1);
  const Eigen::MatrixXd M = Eigen::MatrixXd(restrict_matrix(assemble_mass(m), f, f));
  CHECK(symmetric_eigenvalues(M).minCoeff() > 0.0);
}

TEST_CASE("single entries agree with brute-force quadrature") {
  const int e = 2;
  const auto m = make_mesh("cube-5", 3, e);
  const int nq = 7;
  const SparseMatrix M = assemble_mass(m, {}, nq), K = assemble_curlcurl(m, {}, nq);
  const SparseMatrix C = curl_incidence(m);
  const int n1 = m.count[1];
  for (auto [i, j] : {std::pair{5, 5}, std::pair{17, 40}, std::pair{n1 / 2, n1 / 2 + 3}, std::pair{n1 - 9, n1 - 2}}) {
    CAPTURE(i);
    CAPTURE(j);
    const Eigen::VectorXd ui = unit(n1, i), uj = unit(n1, j);
    const Eigen::VectorXd ci = C * ui, cj = C * uj;
    const double mass = integrate(m, e, nq, [&](int p, const Eigen::Vector3d& xi) {
      return evaluate_form(m, 1, ui, p, xi).dot(evaluate_form(m, 1, uj, p, xi));
    });
    const double stiff = integrate(m, e, nq, [&](int p, const Eigen::Vector3d& xi) {
      return evaluate_form(m, 2, ci, p, xi).dot(evaluate_form(m, 2, cj, p, xi));
    });
    CHECK(M.coeff(i, j) == doctest::Approx(mass).epsilon(1e-10).scale(1.0));
    CHECK(K.coeff(i, j) == doctest::Approx(stiff).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("mass of a constant field and load of a constant current give the volume") {
  const double pi = std::numbers::pi;
  const auto m = make_mesh("cube", 3, 2);
  // gradient of x: x interpolated at the control points of the affine map
  Eigen::VectorXd phi(m.count[0]);
  for (int v = 0; v < m.count[0]; ++v) phi(v) = m.vertex_position[v](0);
  const Eigen::VectorXd u = gradient_incidence(m) * phi;
  CHECK(u.dot(assemble_mass(m) * u) == doctest::Approx(pi * pi * pi).epsilon(1e-12));
  const Eigen::VectorXd f = assemble_load(m, [](const Eigen::Vector3d&) { return Eigen::Vector3d(1, 0, 0); });
  CHECK(f.dot(u) == doctest::Approx(pi * pi * pi).epsilon(1e-12));
  // a magnetisation enters through its curl pairing; a constant one has none against gradients
  const Eigen::VectorXd g = assemble_load(m, {}, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); });
  CHECK(std::abs(g.dot(u)) < 1e-12);
}

TEST_CASE("load of a magnetisation pairs with the curl") {
  // M = (0,0,1), A with curl A = (0,0,1): A = (-y/2, x/2, 0) is linear, so exact in the space
  const auto m = make_mesh("cube", 2, 2);
  Eigen::VectorXd x(m.count[0]), y(m.count[0]);
  for (int v = 0; v < m.count[0]; ++v) {
    x(v) = m.vertex_position[v](0);
    y(v) = m.vertex_position[v](1);
  }
  // edge coefficients of (-y/2, x/2, 0) from 1/2 (x grad y - y grad x), integrated along the control edges
  Eigen::VectorXd a(m.count[1]);
  for (int e = 0; e < m.count[1]; ++e) {
    const auto [t, h] = m.edge_vertices[e];
    a(e) = 0.5 * (x(t) * y(h) - y(t) * x(h));
  }
  const Eigen::VectorXd b = curl_incidence(m) * a;
  const double pi = std::numbers::pi;
  const L2Error err = l2_error_face_field(m, b, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); });
  REQUIRE(err.error2 < 1e-20);
  const Eigen::VectorXd f = assemble_load(m, {}, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); });
  CHECK(f.dot(a) == doctest::Approx(pi * pi * pi).epsilon(1e-12));
}

TEST_CASE("relative error edge cases") {
  const auto m = make_mesh("cube", 2, 1);
  const VectorField B = [](const Eigen::Vector3d& x) { return Eigen::Vector3d(std::sin(x(1)), 0.0, 1.0); };
  CHECK(l2_error_face_field(m, Eigen::VectorXd::Zero(m.count[2]), B).relative() == doctest::Approx(1.0));
  const VectorField zero = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  CHECK_THROWS(l2_error_face_field(m, Eigen::VectorXd::Zero(m.count[2]), zero).relative());
  CHECK(l2_error_face_field(m, Eigen::VectorXd::Zero(m.count[2]), zero).error2 == 0.0);
}

TEST_CASE("restriction helpers") {
  const auto m = make_mesh("cube", 2, 2);
  const DofMap f = free_dofs(m, 1);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(m.count[1], 0.0, 1.0);
  const Eigen::VectorXd r = restrict_vector(v, f);
  const Eigen::VectorXd back = expand_vector(r, f);
  for (int d = 0; d < f.size(); ++d) CHECK(back(f.global[d]) == v(f.global[d]));
  const SparseMatrix K = assemble_curlcurl(m);
  CHECK(SparseMatrix(restrict_cols(K, f) - restrict_matrix(K, all_dofs(m, 1), f)).norm() == 0.0);
}
