#include <doctest.h>

#include "igatc/control_mesh.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace igatc;

namespace {

const double pi = std::numbers::pi;

std::vector<std::string> all_builtins() {
  return {"cube", "cube-2", "cube-4", "cube-5", "cube-mortar-conforming:4", "cube-mortar-conforming:5",
          "cube-mortar-shifted:1", "cube-glued:4", "source-box-shifted:1", "source-box-glued", "periodic-cube",
          "periodic-cube-neumann", "quarter-ring", "ring"};
}

}  // namespace

TEST_CASE("identity patch") {
  const KnotVector lin(1, {0, 0, 1, 1});
  Eigen::MatrixX3d P(8, 3);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) P.row(i + 2 * j + 4 * k) << i, j, k;
  const Patch patch = Patch::polynomial({lin, lin, lin}, P);
  const Eigen::Vector3d xi(0.2, 0.7, 0.4);
  const auto m = eval_map(patch, xi);
  CHECK((m.x - xi).norm() < 1e-15);
  CHECK((m.jacobian - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  CHECK(m.det == doctest::Approx(1.0));
}

TEST_CASE("quarter ring midpoint lies on radius 0.75 at 45 degrees") {
  const auto d = builtin_geometry("quarter-ring");
  const auto m = eval_map(d.patches[0], Eigen::Vector3d(0.5, 0.5, 0.0));
  const double r = std::hypot(m.x(0), m.x(1));
  CHECK(r == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::atan2(m.x(1), m.x(0)) == doctest::Approx(pi / 4).epsilon(1e-14));
  // every point of the rational arc is exactly circular
  for (double t : {0.1, 0.33, 0.9}) {
    const auto q = eval_map(d.patches[0], Eigen::Vector3d(1.0, t, 0.0));
    CHECK(std::hypot(q.x(0), q.x(1)) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Jacobian against centered differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (const std::string name : {"quarter-ring", "cube-5", "ring"}) {
    const auto d = builtin_geometry(name);
    for (const auto& patch : d.patches)
      for (int t = 0; t < 20; ++t) {
        const Eigen::Vector3d xi(U(rng), U(rng), U(rng));
        const auto m = eval_map(patch, xi);
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
          Eigen::Vector3d e = Eigen::Vector3d::Zero();
          e(k) = h;
          const Eigen::Vector3d fd = (eval_map(patch, xi + e).x - eval_map(patch, xi - e).x) / (2 * h);
          CHECK((fd - m.jacobian.col(k)).norm() < 1e-6);
        }
      }
  }
}

TEST_CASE("builtin geometries are valid and orientation preserving") {
  for (const auto& name : all_builtins()) {
    CAPTURE(name);
    const auto d = builtin_geometry(name);
    const auto rep = validate_interfaces(d);
    for (const auto& m : rep.messages) MESSAGE(m);
    CHECK(rep.ok);
    for (const auto& p : d.patches) CHECK(min_relative_jacobian(p) > 0.0);
  }
  CHECK_THROWS_AS(builtin_geometry("no-such-thing"), GeometryError);
}

TEST_CASE("builtin patch counts") {
  CHECK(builtin_geometry("cube-2").num_patches() == 2);
  CHECK(builtin_geometry("cube-4").num_patches() == 4);
  CHECK(builtin_geometry("cube-5").num_patches() == 5);
  const auto m = builtin_geometry("cube-mortar-conforming:5");
  CHECK(m.num_patches() == 10);
  CHECK(m.num_subdomains() == 2);
}

TEST_CASE("shifted mortar cube splits interface records at the wrap seam") {
  const auto d = builtin_geometry("cube-mortar-shifted:1");
  // each of the 4 dependent faces overlaps two independent faces
  CHECK(d.interfaces.size() == 8);
  const auto rep = validate_interfaces(d);
  CHECK(rep.ok);
  CHECK(rep.max_interface_deviation < 1e-12);
}

TEST_CASE("corrupted control point fails validation") {
  auto d = builtin_geometry("cube-mortar-conforming:4");
  d.patches[0].points()(0, 2) += 1e-3;
  const auto rep = validate_interfaces(d);
  CHECK_FALSE(rep.ok);
  CHECK(std::max(rep.max_interface_deviation, rep.max_glue_deviation) > 1e-8);
  CHECK_THROWS_AS(check_domain(d), GeometryError);
}

TEST_CASE("matched conforming faces agree pointwise") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& name : all_builtins()) {
    const auto d = builtin_geometry(name);
    for (const auto& g : d.glue) {
      // find the orientation map (swap, flip s, flip t) that matches the corners
      int best = -1;
      auto mapped = [](int o, double s, double t) {
        double a = (o & 1) ? 1 - s : s, b = (o & 2) ? 1 - t : t;
        if (o & 4) std::swap(a, b);
        return std::pair<double, double>{a, b};
      };
      for (int o = 0; o < 8 && best < 0; ++o) {
        bool ok = true;
        for (double s : {0.0, 1.0})
          for (double t : {0.0, 1.0}) {
            const auto [a, b] = mapped(o, s, t);
            ok = ok && (face_point(d.patches[g.a.patch], g.a.side, s, t) - face_point(d.patches[g.b.patch], g.b.side, a, b)).norm() < 1e-12;
          }
        if (ok) best = o;
      }
      REQUIRE(best >= 0);
      for (int r = 0; r < 10; ++r) {
        const double s = U(rng), t = U(rng);
        const auto [a, b] = mapped(best, s, t);
        CHECK((face_point(d.patches[g.a.patch], g.a.side, s, t) - face_point(d.patches[g.b.patch], g.b.side, a, b)).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("geometry JSON round trip") {
  const auto d = builtin_geometry("cube-mortar-shifted:1");
  const auto e = parse_geometry_json(geometry_to_json(d));
  CHECK(e.num_patches() == d.num_patches());
  CHECK(e.interfaces.size() == d.interfaces.size());
  CHECK(e.periodic.size() == d.periodic.size());
  CHECK(e.glue.size() == d.glue.size());
  CHECK(validate_interfaces(e).ok);
  CHECK((e.patches[3].points() - d.patches[3].points()).norm() == 0.0);
  CHECK_THROWS_AS(parse_geometry_json("{\"patches\": 3}"), GeometryError);
  CHECK_THROWS_AS(parse_geometry_json("{"), GeometryError);
}

TEST_CASE("control mesh counts") {
  const auto cube = builtin_geometry("cube");
  const auto m = extract_control_mesh(cube, make_discretization(cube, 2, 2));
  CHECK(m.count[0] == 64);
  CHECK(m.count[1] == 144);
  CHECK(m.count[2] == 3 * 4 * 3 * 3);
  CHECK(m.count[3] == 27);
  for (int d = 0; d < 3; ++d) {
    // edges along direction d: (n-1) n^2
    int along = 0;
    for (const auto& o : m.owner[1]) along += o.comp == d;
    CHECK(along == 3 * 16);
  }

  const auto two = builtin_geometry("cube-2");
  const auto m2 = extract_control_mesh(two, make_discretization(two, 2, 2));
  CHECK(m2.count[0] == 2 * 64 - 16);

  const auto per = builtin_geometry("periodic-cube");
  const auto mp = extract_control_mesh(per, make_discretization(per, 2, 2));
  CHECK(mp.count[0] == 48);
  CHECK(mp.count[1] == 144 - 3 * 4 - 3 * 4);

  // mortar sides keep separate copies of the interface vertices
  const auto mo = builtin_geometry("cube-mortar-conforming:4");
  const auto glued = builtin_geometry("cube-glued:4");
  const auto a = extract_control_mesh(mo, make_discretization(mo, 2, 2));
  const auto b = extract_control_mesh(glued, make_discretization(glued, 2, 2));
  CHECK(a.count[0] - b.count[0] == 7 * 7);
}

TEST_CASE("Euler characteristic of contractible control meshes") {
  for (const std::string name : {"cube", "cube-2", "cube-4", "cube-5", "quarter-ring", "cube-glued:5"}) {
    const auto d = builtin_geometry(name);
    for (int p : {2, 3}) {
      const auto m = extract_control_mesh(d, make_discretization(d, p, 2));
      CHECK(m.count[0] - m.count[1] + m.count[2] - m.count[3] == 1);
    }
  }
  // solid torus (periodic cube, ring): chi = 0
  for (const std::string name : {"periodic-cube", "ring"}) {
    const auto d = builtin_geometry(name);
    const auto m = extract_control_mesh(d, make_discretization(d, 2, 3));
    CHECK(m.count[0] - m.count[1] + m.count[2] - m.count[3] == 0);
  }
}

TEST_CASE("identified vertices coincide geometrically") {
  for (const std::string name : {"cube-5", "ring", "cube-glued:4"}) {
    const auto d = builtin_geometry(name);
    const auto m = extract_control_mesh(d, make_discretization(d, 3, 2));
    for (int p = 0; p < m.patches(); ++p) {
      const auto X = discrete_control_points(d.patches[p], m.disc.knots[p]);
      for (int l = 0; l < X.rows(); ++l)
        CHECK((X.row(l).transpose() - m.vertex_position[m.gid[p][0][l]]).norm() < 1e-10);
    }
  }
}

TEST_CASE("discrete control points reproduce the geometry") {
  const auto d = builtin_geometry("quarter-ring");
  const auto disc = make_discretization(d, 3, 2);
  const auto X = discrete_control_points(d.patches[0], disc.knots[0]);
  // the quadratic arc in a cubic basis is not polynomial in Cartesian coordinates, but the
  // control points of the trilinear cube are exact
  const auto c = builtin_geometry("cube-5");
  const auto dc = make_discretization(c, 2, 3);
  const auto Y = discrete_control_points(c.patches[2], dc.knots[2]);
  const auto g = greville_abscissae(dc.knots[2][0]);
  // a trilinear map interpolated exactly: control points equal F at Greville points
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        const auto x = eval_map(c.patches[2], Eigen::Vector3d(g(i), g(j), g(k))).x;
        CHECK((Y.row(i + 5 * (j + 5 * k)).transpose() - x).norm() < 1e-12);
      }
  CHECK(X.rows() == 125);
}
