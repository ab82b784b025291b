#include <doctest.h>

#include "igatc/experiments.hpp"
#include "igatc/export.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace igatc;

TEST_CASE("analytic cube spectrum") {
  const auto ref = cube_spectrum(std::numbers::pi, 6.5);
  const std::vector<double> expect{2, 2, 2, 3, 3, 5, 5, 5, 5, 5, 5, 6, 6, 6, 6, 6, 6};
  REQUIRE(ref.size() == expect.size());
  for (size_t i = 0; i < ref.size(); ++i) CHECK(ref[i] == doctest::Approx(expect[i]));
  // side 2 scales by (pi/2)^2
  CHECK(cube_spectrum(2.0, 5.0)[0] == doctest::Approx(2.0 * std::pow(std::numbers::pi / 2.0, 2)));
}

TEST_CASE("greedy mode matching") {
  const std::vector<double> ref{2, 2, 3};
  CHECK(unmatched_modes({2.01, 1.99, 3.0}, ref, 0.05).empty());
  CHECK(unmatched_modes({0.0, 2.0, 2.0}, ref, 0.05) == std::vector<int>{0});
  // a third value near 2 has no partner left
  CHECK(unmatched_modes({2.0, 2.0, 2.0}, ref, 0.05) == std::vector<int>{2});
}

TEST_CASE("zero cluster detection") {
  Eigen::VectorXd ev(5);
  ev << -1e-14, 3e-15, 0.5, 1.0, 2.0;
  const ZeroCluster z = count_zeros(ev);
  CHECK(z.zeros == 2);
  CHECK(!z.ambiguous);
  // threshold 2e-8: one value below, its neighbour only 3x above
  ev << 1e-8, 3e-8, 0.5, 1.0, 2.0;
  CHECK(count_zeros(ev).zeros == 1);
  CHECK(count_zeros(ev).ambiguous);
}

TEST_CASE("kernel dimensions on the smallest table configurations") {
  const auto r2 = kernel_row("cube-2", 2, 2);
  CHECK(r2.dim_x0 == 20);
  CHECK(r2.dim_k_standard == 20);
  CHECK(r2.dim_k_enriched == 20);
  const auto r4 = kernel_row("cube-4", 2, 2);
  CHECK(r4.dim_x0 == 50);
  CHECK(r4.dim_k_standard == 51);
  CHECK(r4.dim_k_enriched == 50);
}

TEST_CASE("ungauged eigenproblem counts the discrete kernel; the gauged one has none") {
  const auto m = make_mesh("cube-4", 2, 2, 1);
  EigenOptions opt;
  opt.gauge = GaugeMode::none;
  opt.enriched = false;
  opt.count = 70;
  CHECK(solve_eigen(m, opt).cluster.zeros == 51);
  opt.enriched = true;
  const auto ungauged = solve_eigen(m, opt);
  CHECK(ungauged.cluster.zeros == 50);
  opt.gauge = GaugeMode::tree;
  const auto gauged = solve_eigen(m, opt);
  CHECK(gauged.cluster.zeros == 0);
  // the gauged spectrum is the nonzero part of the ungauged one
  for (int i = 0; i < 10; ++i) CHECK(gauged.eigenvalues(i) == doctest::Approx(ungauged.eigenvalues(50 + i)).epsilon(1e-8));
}

TEST_CASE("spurious mode on the mortar cube without enrichment") {
  const auto m = make_mesh("cube-mortar-conforming:4", 2, 2);
  EigenOptions opt;
  opt.enriched = false;
  const auto a = eigen_run(m, opt, std::numbers::pi);
  CHECK(a.spurious_count == 1);
  opt.enriched = true;
  const auto b = eigen_run(m, opt, std::numbers::pi);
  CHECK(b.spurious_count == 0);
  CHECK(b.report.cluster.zeros == 0);
}

TEST_CASE("eigenvalues do not depend on the spanning tree") {
  const auto m = make_mesh("cube-mortar-shifted:1", 2, 2);
  EigenOptions opt;
  const auto a = solve_eigen(m, opt);
  opt.gauge = GaugeMode::tree_reversed;
  const auto b = solve_eigen(m, opt);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  for (int i = 0; i < a.eigenvalues.size(); ++i)
    CHECK(std::abs(a.eigenvalues(i) - b.eigenvalues(i)) < 1e-8 * std::abs(a.eigenvalues(i)) + 1e-12);
}

TEST_CASE("eigen modes are returned on request") {
  const auto m = make_mesh("cube", 2, 2);
  EigenOptions opt;
  opt.modes = 3;
  const auto r = solve_eigen(m, opt);
  REQUIRE(r.modes.cols() == 3);
  const SparseMatrix K = assemble_curlcurl(m), M = assemble_mass(m);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd u = r.modes.col(k);
    CHECK(u.dot(K * u) / u.dot(M * u) == doctest::Approx(r.mode_values(k)).epsilon(1e-8));
  }
}

TEST_CASE("manufactured problem: exact sources and decreasing error") {
  // curl curl A = J for the closed forms
  const Eigen::Vector3d x(0.3, 1.1, 2.5);
  const double h = 1e-3;
  auto curl = [h](auto&& f, const Eigen::Vector3d& p) {
    Eigen::Matrix3d D;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(j) = h;
      D.col(j) = (f(p + e) - f(p - e)) / (2 * h);
    }
    return Eigen::Vector3d(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
  };
  CHECK((curl(manufactured_potential, x) - manufactured_flux(x)).norm() < 1e-6);
  CHECK((curl(manufactured_flux, x) - manufactured_current(x)).norm() < 1e-6);

  const auto a = convergence_row("source-box-shifted:1", 2, 2);
  const auto b = convergence_row("source-box-shifted:1", 2, 4);
  CHECK(a.residual < 1e-10);
  CHECK(b.error < a.error / 3.0);
}

TEST_CASE("conforming mortar on a single-face interface equals strong gluing") {
  const auto a = convergence_row("source-box-conforming:1", 2, 2);
  const auto b = convergence_row("source-box-glued:1", 2, 2);
  CHECK(a.multipliers > 0);
  CHECK(b.multipliers == 0);
  CHECK(std::abs(a.error - b.error) < 1e-8);
  // four faces couple the edges between faces only weakly; close but not identical
  const auto c = convergence_row("source-box-conforming:4", 2, 2);
  const auto d = convergence_row("source-box-glued:4", 2, 2);
  CHECK(std::abs(c.error - d.error) > 1e-8);
  CHECK(std::abs(c.error - d.error) < 1e-3 * d.error);
}

TEST_CASE("flux does not depend on the spanning tree") {
  const auto m = make_mesh("source-box-shifted:1", 2, 2);
  SourceProblem src;
  src.current = manufactured_current;
  const auto a = solve_magnetostatic(build_saddle(m, src, true, GaugeMode::tree));
  const auto b = solve_magnetostatic(build_saddle(m, src, true, GaugeMode::tree_reversed));
  for (int p = 0; p < m.patches(); ++p)
    for (double s : {0.1, 0.5, 0.83}) {
      const Eigen::Vector3d xi(s, 1.0 - s, 0.5 * s + 0.2);
      CHECK((a.flux(p, xi) - b.flux(p, xi)).norm() < 1e-8);
    }
  // without the compatible load each tree keeps a different share of the interface term
  src.compatible_load = false;
  const auto c = solve_magnetostatic(build_saddle(m, src, true, GaugeMode::tree));
  const auto d = solve_magnetostatic(build_saddle(m, src, true, GaugeMode::tree_reversed));
  CHECK((curl_incidence(m) * (c.edges - d.edges)).lpNorm<Eigen::Infinity>() > 1e-6);
}

TEST_CASE("ungauged source problem is reported as singular") {
  const auto m = make_mesh("cube", 2, 2);
  SourceProblem src;
  src.current = manufactured_current;
  CHECK_THROWS_AS(solve_magnetostatic(build_saddle(m, src, true, GaugeMode::none)), SolverError);
  // the standard multiplier space leaves the gradient of the internal vertex function in the kernel
  const auto box = make_mesh("source-box-shifted:1", 2, 2);
  CHECK_THROWS_AS(solve_magnetostatic(build_saddle(box, src, false, GaugeMode::tree)), SolverError);
  CHECK_NOTHROW(solve_magnetostatic(build_saddle(box, src, true, GaugeMode::tree)));
}

TEST_CASE("inf-sup constant is positive and equal for both multiplier spaces") {
  const auto m = make_mesh("cube-mortar-conforming:4", 2, 2);
  const auto a = infsup_constant(m, false), b = infsup_constant(m, true);
  CHECK(a.beta > 0.1);
  CHECK(b.multipliers == a.multipliers + 1);
  CHECK(b.beta == doctest::Approx(a.beta).epsilon(1e-8));
}

TEST_CASE("slope fit and number formatting") {
  CHECK(fitted_slope({2, 4, 8}, {1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv_number(std::nan("")) == "nan");
}

TEST_CASE("field export writes one point per sample") {
  const auto m = make_mesh("cube", 2, 1);
  std::ostringstream os;
  write_vtk_fields(os, m, {{"B", Eigen::VectorXd::Ones(m.count[2])}}, 2);
  const std::string s = os.str();
  CHECK(s.find("POINTS 27 double") != std::string::npos);
  CHECK(s.find("CELLS 8 72") != std::string::npos);
  CHECK(s.find("VECTORS B double") != std::string::npos);
}
