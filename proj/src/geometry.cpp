#include "igatc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

namespace igatc {

std::string side_name(Side s) {
  static const char* names[] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  return names[static_cast<int>(s)];
}

Side parse_side(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (side_name(static_cast<Side>(i)) == s) return static_cast<Side>(i);
  throw GeometryError("unknown side '" + s + "'");
}

std::array<int, 2> side_tangents(Side s) {
  switch (side_direction(s)) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

Patch::Patch(std::array<KnotVector, 3> knots, Eigen::MatrixX4d points)
    : knots_(std::move(knots)), points_(std::move(points)) {
  const auto n = counts();
  if (points_.rows() != n[0] * n[1] * n[2]) throw GeometryError("control point count does not match knot vectors");
  if ((points_.col(3).array() <= 0.0).any()) throw GeometryError("nonpositive control point weight");
}

Patch Patch::polynomial(std::array<KnotVector, 3> knots, const Eigen::MatrixX3d& points) {
  Eigen::MatrixX4d h(points.rows(), 4);
  h.leftCols<3>() = points;
  h.col(3).setOnes();
  return Patch(std::move(knots), std::move(h));
}

Patch Patch::trilinear(const std::array<Eigen::Vector3d, 8>& corners) {
  const KnotVector lin(1, {0.0, 0.0, 1.0, 1.0});
  Eigen::MatrixX3d p(8, 3);
  for (int i = 0; i < 8; ++i) p.row(i) = corners[i].transpose();
  return polynomial({lin, lin, lin}, p);
}

MapEval eval_map(const Patch& patch, const Eigen::Vector3d& xi) {
  std::array<BasisDerivs<double>, 3> b;
  for (int d = 0; d < 3; ++d) b[d] = eval_basis_derivs(patch.knots(d), xi(d), 1);
  Eigen::Vector4d h = Eigen::Vector4d::Zero();
  Eigen::Matrix<double, 4, 3> dh = Eigen::Matrix<double, 4, 3>::Zero();
  const auto& P = patch.points();
  const int p0 = patch.knots(0).degree(), p1 = patch.knots(1).degree(), p2 = patch.knots(2).degree();
  for (int c = 0; c <= p2; ++c) {
    for (int bb = 0; bb <= p1; ++bb) {
      for (int a = 0; a <= p0; ++a) {
        const Eigen::Vector4d q = P.row(patch.index(b[0].first + a, b[1].first + bb, b[2].first + c)).transpose();
        const double v0 = b[0].ders(0, a), v1 = b[1].ders(0, bb), v2 = b[2].ders(0, c);
        h += v0 * v1 * v2 * q;
        dh.col(0) += b[0].ders(1, a) * v1 * v2 * q;
        dh.col(1) += v0 * b[1].ders(1, bb) * v2 * q;
        dh.col(2) += v0 * v1 * b[2].ders(1, c) * q;
      }
    }
  }
  MapEval m;
  m.x = h.head<3>() / h(3);
  for (int d = 0; d < 3; ++d) m.jacobian.col(d) = (dh.col(d).head<3>() - m.x * dh(3, d)) / h(3);
  m.det = m.jacobian.determinant();
  return m;
}

int MultiPatchDomain::num_subdomains() const {
  int m = 0;
  for (int s : subdomain) m = std::max(m, s + 1);
  return m;
}

const FaceTag* MultiPatchDomain::tag(const FaceRef& f) const {
  for (const auto& t : faces)
    if (t.face == f) return &t;
  return nullptr;
}

Eigen::Vector3d face_point(const Patch& patch, Side side, double s, double t) {
  Eigen::Vector3d xi;
  const auto tg = side_tangents(side);
  xi(side_direction(side)) = side_upper(side) ? 1.0 : 0.0;
  xi(tg[0]) = s;
  xi(tg[1]) = t;
  return eval_map(patch, xi).x;
}

Eigen::Vector3d MultiPatchDomain::periodic_translation(int id) const {
  for (const auto& r : periodic) {
    if (r.id != id) continue;
    return face_point(patches[r.b.patch], r.b.side, 0.5, 0.5) - face_point(patches[r.a.patch], r.a.side, 0.5, 0.5);
  }
  throw GeometryError("no periodic record with id " + std::to_string(id));
}

double MultiPatchDomain::extent() const {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
  Eigen::Vector3d hi = -lo;
  for (const auto& p : patches) {
    for (int i = 0; i < p.points().rows(); ++i) {
      const Eigen::Vector3d x = p.points().row(i).head<3>().transpose() / p.points()(i, 3);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }
  return std::max((hi - lo).maxCoeff(), 1e-300);
}

double min_relative_jacobian(const Patch& patch, int samples_per_span) {
  std::array<std::vector<double>, 3> pts;
  for (int d = 0; d < 3; ++d) {
    const auto b = patch.knots(d).breakpoints();
    for (size_t e = 0; e + 1 < b.size(); ++e)
      for (int q = 0; q < samples_per_span; ++q)
        pts[d].push_back(b[e] + (b[e + 1] - b[e]) * (q + 0.5) / samples_per_span);
  }
  double lo = std::numeric_limits<double>::max(), hi = 0.0;
  for (double z : pts[2])
    for (double y : pts[1])
      for (double x : pts[0]) {
        const double d = eval_map(patch, Eigen::Vector3d(x, y, z)).det;
        lo = std::min(lo, d);
        hi = std::max(hi, std::abs(d));
      }
  return hi > 0.0 ? lo / hi : 0.0;
}

namespace {

std::vector<Eigen::Vector3d> face_control_points(const Patch& p, Side side) {
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

std::vector<Eigen::Vector3d> lattice_shifts(const MultiPatchDomain& dom) {
  std::vector<Eigen::Vector3d> shifts{Eigen::Vector3d::Zero()};
  std::vector<int> seen;
  for (const auto& r : dom.periodic) {
    if (std::find(seen.begin(), seen.end(), r.id) != seen.end()) continue;
    seen.push_back(r.id);
    const Eigen::Vector3d t = dom.periodic_translation(r.id);
    const size_t m = shifts.size();
    for (size_t i = 0; i < m; ++i) {
      shifts.push_back(shifts[i] + t);
      shifts.push_back(shifts[i] - t);
    }
  }
  return shifts;
}

}  // namespace

ValidationReport validate_interfaces(const MultiPatchDomain& dom) {
  ValidationReport rep;
  const double scale = dom.extent();
  auto fail = [&](const std::string& m) {
    rep.ok = false;
    rep.messages.push_back(m);
  };
  if (dom.subdomain.size() != dom.patches.size()) fail("subdomain labels do not match patch count");

  auto check_pair = [&](const FaceRef& a, const FaceRef& b, const Eigen::Vector3d& shift, const std::string& what) {
    const auto pa = face_control_points(dom.patches[a.patch], a.side);
    const auto pb = face_control_points(dom.patches[b.patch], b.side);
    double dev = 0.0;
    if (pa.size() != pb.size()) dev = std::numeric_limits<double>::infinity();
    for (const auto& x : pa) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : pb) best = std::min(best, (x + shift - y).norm());
      dev = std::max(dev, best);
    }
    rep.max_glue_deviation = std::max(rep.max_glue_deviation, dev);
    if (!(dev <= 1e-10 * scale)) {
      std::ostringstream os;
      os << what << " mismatch between patch " << a.patch << " " << side_name(a.side) << " and patch " << b.patch
         << " " << side_name(b.side) << ": deviation " << dev;
      fail(os.str());
    }
  };
  for (const auto& g : dom.glue) {
    if (dom.subdomain[g.a.patch] != dom.subdomain[g.b.patch]) fail("glue record across subdomains");
    check_pair(g.a, g.b, Eigen::Vector3d::Zero(), "conforming glue");
  }
  for (const auto& r : dom.periodic) check_pair(r.a, r.b, dom.periodic_translation(r.id), "periodic pair");

  for (int p = 0; p < dom.num_patches(); ++p) {
    if (min_relative_jacobian(dom.patches[p]) <= 0.0) fail("patch " + std::to_string(p) + " has nonpositive Jacobian");
  }

  const auto shifts = lattice_shifts(dom);
  const int ns = 9;
  std::vector<std::pair<FaceRef, int>> covered;
  for (const auto& rec : dom.interfaces) {
    const FaceTag* t = dom.tag(rec.dependent);
    if (!t || t->kind != FaceKind::interface) fail("dependent face of interface " + std::to_string(rec.id) + " is not tagged interface");
    if (rec.independent.patch < 0) continue;
    const FaceTag* ti = dom.tag(rec.independent);
    if (!ti || ti->kind != FaceKind::interface) fail("independent face of interface " + std::to_string(rec.id) + " is not tagged interface");
    if (dom.subdomain[rec.dependent.patch] == dom.subdomain[rec.independent.patch]) fail("interface record inside one subdomain");
    const Patch& pd = dom.patches[rec.dependent.patch];
    const Patch& pi = dom.patches[rec.independent.patch];
    double dev = 0.0;
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < ns; ++b) {
        const double s[2] = {(a + 0.5) / ns, (b + 0.5) / ns};
        double s2[2];
        bool inside = true;
        for (int k = 0; k < 2; ++k) {
          double v = s[k] + rec.map.offset[k];
          if (rec.map.wrap[k] > 0.0) v -= rec.map.wrap[k] * std::floor(v / rec.map.wrap[k]);
          if (rec.map.flip[k]) v = 1.0 - v;
          s2[k] = v;
          if (v < -1e-12 || v > 1.0 + 1e-12) inside = false;
        }
        if (!inside) continue;
        const Eigen::Vector3d x1 = face_point(pd, rec.dependent.side, s[0], s[1]);
        const Eigen::Vector3d x2 = face_point(pi, rec.independent.side, std::clamp(s2[0], 0.0, 1.0), std::clamp(s2[1], 0.0, 1.0));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& sh : shifts) best = std::min(best, (x1 + sh - x2).norm());
        dev = std::max(dev, best);
      }
    rep.max_interface_deviation = std::max(rep.max_interface_deviation, dev);
    if (!(dev <= 1e-8 * scale)) {
      std::ostringstream os;
      os << "interface " << rec.id << " (patch " << rec.dependent.patch << " -> patch " << rec.independent.patch
         << ") maps onto a different surface: max deviation " << dev;
      fail(os.str());
    }
  }
  for (const auto& t : dom.faces) {
    if (t.kind != FaceKind::interface) continue;
    bool found = false;
    for (const auto& rec : dom.interfaces)
      found = found || rec.dependent == t.face || (rec.independent.patch >= 0 && rec.independent == t.face);
    if (!found) fail("interface face of patch " + std::to_string(t.face.patch) + " has no interface record");
  }
  return rep;
}

void check_domain(const MultiPatchDomain& domain) {
  const auto rep = validate_interfaces(domain);
  if (!rep.ok) {
    std::string m = "invalid domain:";
    for (const auto& s : rep.messages) m += "\n  " + s;
    throw GeometryError(m);
  }
}

MultiPatchDomain resolve_geometry(const std::string& name) {
  if (std::filesystem::exists(name) && std::filesystem::is_regular_file(name)) return load_geometry(name);
  return builtin_geometry(name);
}

}  // namespace igatc
