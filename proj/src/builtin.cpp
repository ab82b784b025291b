#include "igatc/geometry.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace igatc {

namespace {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Planar quadrilateral, corners at (s,t) = (0,0), (1,0), (0,1), (1,1).
using Quad = std::array<Vec2, 4>;

std::vector<Quad> unit_layout(int n) {
  std::vector<Quad> q;
  auto box = [](double x0, double x1, double y0, double y1) {
    return Quad{Vec2(x0, y0), Vec2(x1, y0), Vec2(x0, y1), Vec2(x1, y1)};
  };
  if (n == 1) {
    q.push_back(box(0, 1, 0, 1));
  } else if (n == 2) {
    q.push_back(box(0, 0.5, 0, 1));
    q.push_back(box(0.5, 1, 0, 1));
  } else if (n == 4) {
    q.push_back(box(0, 0.5, 0, 0.5));
    q.push_back(box(0.5, 1, 0, 0.5));
    q.push_back(box(0, 0.5, 0.5, 1));
    q.push_back(box(0.5, 1, 0.5, 1));
  } else if (n == 5) {
    const double a = 1.0 / 3.0, b = 2.0 / 3.0;
    q.push_back(box(a, b, a, b));
    // outer edge first (t = 0), inner edge at t = 1
    q.push_back({Vec2(0, 0), Vec2(1, 0), Vec2(a, a), Vec2(b, a)});
    q.push_back({Vec2(1, 0), Vec2(1, 1), Vec2(b, a), Vec2(b, b)});
    q.push_back({Vec2(1, 1), Vec2(0, 1), Vec2(b, b), Vec2(a, b)});
    q.push_back({Vec2(0, 1), Vec2(0, 0), Vec2(a, b), Vec2(a, a)});
  } else {
    throw GeometryError("no layout with " + std::to_string(n) + " patches");
  }
  return q;
}

Patch prism(const Quad& q, double z0, double z1) {
  std::array<Vec3, 8> c;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 4; ++i) c[i + 4 * k] = Vec3(q[i](0), q[i](1), k ? z1 : z0);
  return Patch::trilinear(c);
}

std::vector<Eigen::Vector3d> side_points(const Patch& p, Side side) {
  const auto n = p.counts();
  const int d = side_direction(side);
  std::vector<Eigen::Vector3d> out;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        if (idx[d] != (side_upper(side) ? n[d] - 1 : 0)) continue;
        const auto r = p.points().row(p.index(i, j, k));
        out.emplace_back(r.head<3>().transpose() / r(3));
      }
  return out;
}

bool same_point_sets(const std::vector<Vec3>& a, const std::vector<Vec3>& b, const Vec3& shift, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool hit = false;
    for (const auto& y : b) hit = hit || (x + shift - y).norm() < tol;
    if (!hit) return false;
  }
  return true;
}

/// Adds glue records between coincident faces of patches in the same subdomain
/// and tags every other face with classify(center point).
void finish_domain(MultiPatchDomain& d, const std::function<FaceKind(const Vec3&)>& classify,
                   bool glue_across_subdomains = false) {
  const double tol = 1e-9 * d.extent();
  const int np = d.num_patches();
  std::vector<std::array<bool, 6>> used(np);
  for (auto& u : used) u.fill(false);
  for (const auto& t : d.faces) used[t.face.patch][static_cast<int>(t.face.side)] = true;
  for (const auto& r : d.periodic) {
    used[r.a.patch][static_cast<int>(r.a.side)] = true;
    used[r.b.patch][static_cast<int>(r.b.side)] = true;
  }
  for (int a = 0; a < np; ++a)
    for (int sa = 0; sa < 6; ++sa) {
      if (used[a][sa]) continue;
      for (int b = a + 1; b < np && !used[a][sa]; ++b) {
        if (!glue_across_subdomains && d.subdomain[a] != d.subdomain[b]) continue;
        for (int sb = 0; sb < 6; ++sb) {
          if (used[b][sb]) continue;
          const auto pa = side_points(d.patches[a], static_cast<Side>(sa));
          const auto pb = side_points(d.patches[b], static_cast<Side>(sb));
          if (same_point_sets(pa, pb, Vec3::Zero(), tol)) {
            d.glue.push_back({{a, static_cast<Side>(sa)}, {b, static_cast<Side>(sb)}});
            used[a][sa] = used[b][sb] = true;
            break;
          }
        }
      }
    }
  for (int a = 0; a < np; ++a)
    for (int s = 0; s < 6; ++s) {
      if (used[a][s]) continue;
      const Vec3 c = face_point(d.patches[a], static_cast<Side>(s), 0.5, 0.5);
      d.faces.push_back({{a, static_cast<Side>(s)}, classify(c), 0});
    }
}

/// Periodic records in x between faces of `patches` lying on x = x0 and x = x0 + period.
void add_x_periodic(MultiPatchDomain& d, int id, double period) {
  const double tol = 1e-9 * d.extent();
  const Vec3 t(period, 0, 0);
  for (int a = 0; a < d.num_patches(); ++a)
    for (int sa = 0; sa < 6; ++sa)
      for (int b = 0; b < d.num_patches(); ++b) {
        if (d.subdomain[a] != d.subdomain[b]) continue;
        for (int sb = 0; sb < 6; ++sb) {
          const auto pa = side_points(d.patches[a], static_cast<Side>(sa));
          const auto pb = side_points(d.patches[b], static_cast<Side>(sb));
          if (same_point_sets(pa, pb, t, tol)) {
            d.periodic.push_back({id, {a, static_cast<Side>(sa)}, {b, static_cast<Side>(sb)}});
            d.faces.push_back({{a, static_cast<Side>(sa)}, FaceKind::periodic, id});
            d.faces.push_back({{b, static_cast<Side>(sb)}, FaceKind::periodic, id});
          }
        }
      }
}

/// Split box [0,L]^3 (scaled per axis) into `n` prisms along z per subdomain.
struct BoxSpec {
  int layout = 4;
  Vec3 extents = Vec3::Constant(std::numbers::pi);
  bool mortar = true;       // two subdomains with an interface at mid height
  bool strong = false;      // single subdomain glued at mid height
  bool periodic_x = false;
  double shift = 0.0;       // x offset of the lower subdomain
};

MultiPatchDomain mortar_box(const BoxSpec& spec) {
  MultiPatchDomain d;
  const auto lay = unit_layout(spec.layout);
  const double lx = spec.extents(0), ly = spec.extents(1), lz = spec.extents(2);
  const double zm = 0.5 * lz;
  auto scaled = [&](const Quad& q, double dx) {
    Quad r;
    for (int i = 0; i < 4; ++i) r[i] = Vec2(q[i](0) * lx + dx, q[i](1) * ly);
    return r;
  };
  for (const auto& q : lay) {
    d.patches.push_back(prism(scaled(q, 0.0), zm, lz));
    d.subdomain.push_back(0);
  }
  for (const auto& q : lay) {
    d.patches.push_back(prism(scaled(q, spec.shift), 0.0, zm));
    d.subdomain.push_back(spec.strong ? 0 : 1);
  }
  const int n = static_cast<int>(lay.size());
  if (spec.mortar && !spec.strong) {
    for (int i = 0; i < n; ++i) {
      d.faces.push_back({{i, Side::zmin}, FaceKind::interface, 1});
      d.faces.push_back({{n + i, Side::zmax}, FaceKind::interface, 1});
    }
    if (spec.shift == 0.0) {
      for (int i = 0; i < n; ++i) d.interfaces.push_back({1, {i, Side::zmin}, {n + i, Side::zmax}, {}});
    } else {
      if (spec.layout != 4 && spec.layout != 2 && spec.layout != 1)
        throw GeometryError("shifted mortar boxes need an axis aligned layout");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Quad qi = scaled(lay[i], 0.0), qj = scaled(lay[j], spec.shift);
          const double w = qi[1](0) - qi[0](0), wj = qj[1](0) - qj[0](0);
          if (std::abs(w - wj) > 1e-12 || std::abs(qi[0](1) - qj[0](1)) > 1e-12 || std::abs(qi[2](1) - qj[2](1)) > 1e-12)
            continue;
          InterfaceMap m;
          m.offset = {(qi[0](0) - qj[0](0)) / w, 0.0};
          m.wrap = {lx / w, 0.0};
          // keep records with a positive overlap
          double overlap = 0.0;
          for (int k = -1; k <= 1; ++k) {
            const double o = m.offset[0] + k * m.wrap[0];
            overlap += std::max(0.0, std::min(1.0, 1.0 - o) - std::max(0.0, -o));
          }
          if (overlap > 1e-12) d.interfaces.push_back({1, {i, Side::zmin}, {n + j, Side::zmax}, m});
        }
    }
  }
  if (spec.periodic_x) add_x_periodic(d, 1, lx);
  finish_domain(d, [](const Vec3&) { return FaceKind::dirichlet; }, spec.strong);
  return d;
}

/// Unit cube split per layout, top face constrained by the multiplier only.
MultiPatchDomain table_cube(int layout) {
  MultiPatchDomain d;
  for (const auto& q : unit_layout(layout)) {
    d.patches.push_back(prism(q, 0.0, 1.0));
    d.subdomain.push_back(0);
  }
  for (int i = 0; i < d.num_patches(); ++i) {
    d.faces.push_back({{i, Side::zmax}, FaceKind::interface, 1});
    d.interfaces.push_back({1, {i, Side::zmax}, {-1, Side::xmin}, {}});
  }
  finish_domain(d, [](const Vec3&) { return FaceKind::dirichlet; });
  return d;
}

Patch ring_patch(double r0, double r1, double a0, double z0, double z1) {
  // radial degree 1 (dir 0), quarter arc degree 2 (dir 1), linear in z (dir 2)
  const KnotVector lin(1, {0, 0, 1, 1});
  const KnotVector quad(2, {0, 0, 0, 1, 1, 1});
  Eigen::MatrixX4d pts(2 * 3 * 2, 4);
  const double w1 = std::sqrt(0.5);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 2; ++i) {
        const double r = i ? r1 : r0;
        const double z = k ? z1 : z0;
        Vec3 x;
        double w = 1.0;
        const double c = std::cos(a0), s = std::sin(a0);
        if (j == 0) {
          x = Vec3(r * c, r * s, z);
        } else if (j == 1) {
          x = Vec3(r * (c - s), r * (s + c), z);
          w = w1;
        } else {
          x = Vec3(-r * s, r * c, z);
        }
        const int row = i + 2 * (j + 3 * k);
        pts.row(row) << w * x(0), w * x(1), w * x(2), w;
      }
  return Patch({lin, quad, lin}, pts);
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"cube", "cube-2", "cube-4", "cube-5", "cube-mortar-conforming:N", "cube-mortar-shifted:delta",
          "cube-glued:N", "source-box-shifted:delta", "source-box-conforming:N", "source-box-glued:N", "periodic-cube", "periodic-cube-neumann",
          "quarter-ring", "ring"};
}

MultiPatchDomain builtin_geometry(const std::string& full) {
  std::string name = full, arg;
  if (auto c = full.find(':'); c != std::string::npos) {
    name = full.substr(0, c);
    arg = full.substr(c + 1);
  }
  auto num = [&](double def) { return arg.empty() ? def : std::stod(arg); };
  const double pi = std::numbers::pi;

  if (name == "cube") {
    MultiPatchDomain d;
    d.patches.push_back(prism(unit_layout(1)[0], 0, 1));
    d.patches[0].points().leftCols<3>() *= pi;
    d.subdomain = {0};
    finish_domain(d, [](const Vec3&) { return FaceKind::dirichlet; });
    return d;
  }
  if (name == "periodic-cube" || name == "periodic-cube-neumann") {
    MultiPatchDomain d;
    d.patches.push_back(prism(unit_layout(1)[0], 0, 1));
    d.patches[0].points().leftCols<3>() *= pi;
    d.subdomain = {0};
    add_x_periodic(d, 1, pi);
    const FaceKind k = name == "periodic-cube" ? FaceKind::dirichlet : FaceKind::neumann;
    finish_domain(d, [k](const Vec3&) { return k; });
    return d;
  }
  if (name == "cube-2" || name == "cube-4" || name == "cube-5") return table_cube(name.back() - '0');
  if (name == "cube-mortar-conforming") {
    BoxSpec s;
    s.layout = static_cast<int>(num(4));
    return mortar_box(s);
  }
  if (name == "cube-glued") {
    BoxSpec s;
    s.layout = static_cast<int>(num(4));
    s.strong = true;
    return mortar_box(s);
  }
  if (name == "cube-mortar-shifted") {
    BoxSpec s;
    s.periodic_x = true;
    s.shift = num(1.0);
    return mortar_box(s);
  }
  if (name == "source-box-shifted" || name == "source-box-conforming" || name == "source-box-glued") {
    BoxSpec s;
    s.extents = Vec3(2 * pi, pi, 2 * pi);
    s.periodic_x = true;
    if (name == "source-box-shifted") {
      s.shift = num(1.0);
    } else {
      s.layout = static_cast<int>(num(4));
      s.strong = name == "source-box-glued";
    }
    return mortar_box(s);
  }
  if (name == "quarter-ring") {
    MultiPatchDomain d;
    d.patches.push_back(ring_patch(0.5, 1.0, 0.0, 0.0, 0.25));
    d.subdomain = {0};
    finish_domain(d, [](const Vec3&) { return FaceKind::dirichlet; });
    return d;
  }
  if (name == "ring") {
    MultiPatchDomain d;
    for (int q = 0; q < 4; ++q) {
      d.patches.push_back(ring_patch(0.5, 1.0, q * pi / 2, 0.0, 0.25));
      d.subdomain.push_back(0);
    }
    finish_domain(d, [](const Vec3&) { return FaceKind::neumann; });
    return d;
  }
  throw GeometryError("unknown builtin geometry '" + full + "'");
}

}  // namespace igatc
