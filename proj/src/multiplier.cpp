#include "igatc/multiplier.hpp"

#include "igatc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace igatc {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Unique dependent faces in record order.
std::vector<FaceRef> dependent_faces(const MultiPatchDomain& d) {
  std::vector<FaceRef> out;
  for (const auto& r : d.interfaces)
    if (std::find(out.begin(), out.end(), r.dependent) == out.end()) out.push_back(r.dependent);
  return out;
}

/// Local vertex positions (i_a, i_b) of a global vertex on a face.
std::vector<std::array<int, 2>> vertex_on_face(const ControlMesh& mesh, const FaceRef& f, int v) {
  const auto n = mesh.disc.counts(f.patch);
  const auto tg = side_tangents(f.side);
  const int d = side_direction(f.side), at = side_upper(f.side) ? n[d] - 1 : 0;
  std::vector<std::array<int, 2>> out;
  for (int j = 0; j < n[tg[1]]; ++j)
    for (int i = 0; i < n[tg[0]]; ++i) {
      std::array<int, 3> idx{};
      idx[tg[0]] = i;
      idx[tg[1]] = j;
      idx[d] = at;
      if (mesh.gid[f.patch][0][mesh.layout[f.patch][0].index(0, idx[0], idx[1], idx[2])] == v) out.push_back({i, j});
    }
  return out;
}

struct FaceMetric {
  Eigen::Matrix2d g;
  double area = 0.0;
};

FaceMetric face_metric(const MapEval& m, const std::array<int, 2>& tg) {
  const Eigen::Vector3d a = m.jacobian.col(tg[0]), b = m.jacobian.col(tg[1]);
  FaceMetric fm;
  fm.g << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
  fm.area = a.cross(b).norm();
  return fm;
}

/// Tangential reference traces of the edge functions of a patch face: (global edge, sign * value along
/// tangent 0, sign * value along tangent 1).
struct TraceEntry {
  int edge;
  double u0, u1;
};

std::vector<TraceEntry> face_traces(const ControlMesh& mesh, const FaceRef& f, double s, double t) {
  const auto tg = side_tangents(f.side);
  const auto e = eval_form_basis(mesh, f.patch, 1, face_xi(f.side, s, t));
  std::vector<TraceEntry> out;
  for (size_t r = 0; r < e.local.size(); ++r) {
    const double a = e.values(tg[0], r), b = e.values(tg[1], r);
    if (a == 0.0 && b == 0.0) continue;
    const int l = e.local[r];
    const double sg = mesh.sign[f.patch][1][l];
    out.push_back({mesh.gid[f.patch][1][l], sg * a, sg * b});
  }
  return out;
}

/// Enrichment densities J g^{-1} grad(phi_v) on one face for every enrichment vertex touching it.
struct EnrichmentOnFace {
  int row;
  std::vector<std::array<int, 2>> at;
};

std::vector<EnrichmentOnFace> enrichment_on_face(const ControlMesh& mesh, const MultiplierSpace& sp, const FaceRef& f) {
  std::vector<EnrichmentOnFace> out;
  for (size_t z = 0; z < sp.enrichment_vertices.size(); ++z) {
    auto at = vertex_on_face(mesh, f, sp.enrichment_vertices[z]);
    if (!at.empty()) out.push_back({sp.standard_size + static_cast<int>(z), std::move(at)});
  }
  return out;
}

/// Rows and densities of all multipliers living on face f at (s,t).
void face_multipliers(const ControlMesh& mesh, const MultiplierBlock& blk, const std::vector<EnrichmentOnFace>& enr,
                      double s, double t, const FaceMetric& fm, std::vector<int>& rows, Eigen::Matrix2Xd& dens) {
  const Eigen::Matrix2Xd std_part = eval_multiplier_block(blk, s, t);
  rows.clear();
  std::vector<Eigen::Vector2d> cols;
  for (int r = 0; r < std_part.cols(); ++r)
    if (std_part(0, r) != 0.0 || std_part(1, r) != 0.0) {
      rows.push_back(blk.offset + r);
      cols.push_back(std_part.col(r));
    }
  if (!enr.empty()) {
    const auto& kn = mesh.disc.knots[blk.face.patch];
    const auto Ba = eval_basis_derivs(kn[blk.tangent[0]], s, 1), Bb = eval_basis_derivs(kn[blk.tangent[1]], t, 1);
    const Eigen::Matrix2d ginv = fm.g.inverse();
    for (const auto& e : enr) {
      Eigen::Vector2d grad = Eigen::Vector2d::Zero();
      for (const auto& ij : e.at) {
        const int ra = ij[0] - Ba.first, rb = ij[1] - Bb.first;
        if (ra < 0 || ra >= Ba.ders.cols() || rb < 0 || rb >= Bb.ders.cols()) continue;
        grad(0) += Ba.ders(1, ra) * Bb.ders(0, rb);
        grad(1) += Ba.ders(0, ra) * Bb.ders(1, rb);
      }
      if (grad.isZero(0.0)) continue;
      rows.push_back(e.row);
      cols.push_back(fm.area * ginv * grad);
    }
  }
  dens.resize(2, static_cast<int>(cols.size()));
  for (size_t r = 0; r < cols.size(); ++r) dens.col(r) = cols[r];
}

double map_parameter(double s, double offset, bool flip) {
  const double v = s + offset;
  return std::clamp(flip ? 1.0 - v : v, 0.0, 1.0);
}

struct Piece {
  double lo, hi, offset;
};

std::vector<Piece> record_pieces(const InterfaceRecord& rec, int t) {
  const double o = rec.map.offset[t], W = rec.map.wrap[t];
  std::vector<Piece> out;
  int k0 = 0, k1 = 0;
  if (W > 0.0) {
    k0 = static_cast<int>(std::floor((-1.0 - o) / W)) - 1;
    k1 = static_cast<int>(std::ceil((1.0 - o) / W)) + 1;
  }
  for (int k = k0; k <= k1; ++k) {
    const double ok = o + k * W;
    const double lo = std::max(0.0, -ok), hi = std::min(1.0, 1.0 - ok);
    if (hi - lo > 1e-14) out.push_back({lo, hi, ok});
  }
  return out;
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-13) out.push_back(x);
  return out;
}

}  // namespace

std::vector<int> interface_internal_vertices(const ControlMesh& mesh) {
  std::map<int, int> faces_per_vertex;
  for (const auto& f : dependent_faces(mesh.domain)) {
    const auto n = mesh.disc.counts(f.patch);
    std::vector<int> seen;
    for (int l = 0; l < mesh.layout[f.patch][0].size(); ++l) {
      const auto dec = mesh.layout[f.patch][0].decode(l);
      if (!entity_on_side(n, 0, 0, {dec[1], dec[2], dec[3]}, f.side)) continue;
      seen.push_back(mesh.gid[f.patch][0][l]);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (int v : seen) ++faces_per_vertex[v];
  }
  std::vector<int> z;
  for (const auto& [v, c] : faces_per_vertex)
    if (c >= 3 && !(mesh.flags[0][v] & on_dirichlet)) z.push_back(v);
  return z;
}

MultiplierSpace build_multiplier(const ControlMesh& mesh, bool enriched) {
  MultiplierSpace sp;
  sp.enriched = enriched;
  if (mesh.disc.degree < 2) throw AssemblyError("multiplier space needs p >= 2");
  for (const auto& f : dependent_faces(mesh.domain)) {
    MultiplierBlock b;
    b.face = f;
    b.tangent = side_tangents(f.side);
    for (int t = 0; t < 2; ++t) {
      const ReducedKnotVector r1(mesh.disc.knots[f.patch][b.tangent[t]]);
      const ReducedKnotVector r2(r1.knots());
      // component c is of degree p-1 along tangent c
      b.knots[t][t] = r1.knots();
      b.knots[1 - t][t] = r2.knots();
    }
    for (int c = 0; c < 2; ++c)
      for (int t = 0; t < 2; ++t) {
        const KnotVector& kv = b.knots[c][t];
        b.position[c][t].assign(kv.size(), -1);
        for (int i = 0; i < kv.size(); ++i)
          if (kv[i + kv.degree() + 1] > kv[i]) {
            b.position[c][t][i] = static_cast<int>(b.active[c][t].size());
            b.active[c][t].push_back(i);
          }
      }
    b.offset = sp.standard_size;
    b.size = b.comp_size(0) + b.comp_size(1);
    sp.standard_size += b.size;
    sp.blocks.push_back(std::move(b));
  }
  if (enriched) sp.enrichment_vertices = interface_internal_vertices(mesh);
  return sp;
}

Eigen::Matrix2Xd eval_multiplier_block(const MultiplierBlock& b, double s, double t) {
  Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, b.size);
  int off = 0;
  for (int c = 0; c < 2; ++c) {
    const auto e0 = eval_basis(b.knots[c][0], s), e1 = eval_basis(b.knots[c][1], t);
    const int n0 = static_cast<int>(b.active[c][0].size());
    for (int j = 0; j < e1.values.size(); ++j) {
      const int pj = b.position[c][1][e1.first + j];
      if (pj < 0) continue;
      for (int i = 0; i < e0.values.size(); ++i) {
        const int pi = b.position[c][0][e0.first + i];
        if (pi < 0) continue;
        out(c, off + pi + n0 * pj) = e0.values(i) * e1.values(j);
      }
    }
    off += b.comp_size(c);
  }
  return out;
}

std::vector<std::array<double, 2>> interface_cells(const ControlMesh& mesh, const InterfaceRecord& rec, int t) {
  std::vector<std::array<double, 2>> cells;
  const auto tg = side_tangents(rec.dependent.side);
  const auto dep_bp = mesh.disc.knots[rec.dependent.patch][tg[t]].breakpoints();
  std::vector<double> ind_bp;
  if (rec.independent.patch >= 0)
    ind_bp = mesh.disc.knots[rec.independent.patch][side_tangents(rec.independent.side)[t]].breakpoints();
  for (const auto& pc : record_pieces(rec, t)) {
    std::vector<double> pts{pc.lo, pc.hi};
    for (double b : dep_bp)
      if (b > pc.lo && b < pc.hi) pts.push_back(b);
    for (double b : ind_bp) {
      const double s = rec.map.flip[t] ? 1.0 - b - pc.offset : b - pc.offset;
      if (s > pc.lo && s < pc.hi) pts.push_back(s);
    }
    pts = unique_sorted(pts);
    for (size_t i = 0; i + 1 < pts.size(); ++i) cells.push_back({pts[i], pts[i + 1]});
  }
  return cells;
}

std::vector<InterfacePoint> interface_rule(const ControlMesh& mesh, const InterfaceRecord& rec, int t, int nq) {
  const GaussRule g = gauss_legendre(nq);
  std::vector<InterfacePoint> out;
  const auto pieces = record_pieces(rec, t);
  for (const auto& cell : interface_cells(mesh, rec, t)) {
    const double mid = 0.5 * (cell[0] + cell[1]);
    double off = 0.0;
    for (const auto& pc : pieces)
      if (mid >= pc.lo && mid <= pc.hi) off = pc.offset;
    const double h = cell[1] - cell[0];
    for (int q = 0; q < nq; ++q) {
      const double s = cell[0] + h * g.points(q);
      out.push_back({s, h * g.weights(q), map_parameter(s, off, rec.map.flip[t])});
    }
  }
  return out;
}

Coupling assemble_coupling(const ControlMesh& mesh, const MultiplierSpace& sp, int nq) {
  nq = nq > 0 ? nq : default_quadrature(mesh);
  std::vector<Triplet> dep, ind;
  std::vector<int> rows;
  Eigen::Matrix2Xd dens;
  for (const auto& blk : sp.blocks) {
    const FaceRef& f = blk.face;
    const auto enr = enrichment_on_face(mesh, sp, f);
    const auto& kn = mesh.disc.knots[f.patch];
    const auto r0 = composite_gauss(kn[blk.tangent[0]].breakpoints(), nq);
    const auto r1 = composite_gauss(kn[blk.tangent[1]].breakpoints(), nq);
    // dependent side on its own knot grid
    for (size_t j = 0; j < r1.points.size(); ++j)
      for (size_t i = 0; i < r0.points.size(); ++i) {
        const double s = r0.points[i], t = r1.points[j], w = r0.weights[i] * r1.weights[j];
        const MapEval m = eval_map(mesh.domain.patches[f.patch], face_xi(f.side, s, t));
        face_multipliers(mesh, blk, enr, s, t, face_metric(m, blk.tangent), rows, dens);
        for (const auto& tr : face_traces(mesh, f, s, t))
          for (size_t r = 0; r < rows.size(); ++r) {
            const double v = tr.u0 * dens(0, r) + tr.u1 * dens(1, r);
            if (v != 0.0) dep.emplace_back(rows[r], tr.edge, -w * v);
          }
      }
    // independent sides on the merged grids of every record of this face
    for (const auto& rec : mesh.domain.interfaces) {
      if (!(rec.dependent == f) || rec.independent.patch < 0) continue;
      const auto q0 = interface_rule(mesh, rec, 0, nq), q1 = interface_rule(mesh, rec, 1, nq);
      const double sg0 = rec.map.flip[0] ? -1.0 : 1.0, sg1 = rec.map.flip[1] ? -1.0 : 1.0;
      for (const auto& b : q1)
        for (const auto& a : q0) {
          const double w = a.w * b.w;
          const MapEval m = eval_map(mesh.domain.patches[f.patch], face_xi(f.side, a.s, b.s));
          face_multipliers(mesh, blk, enr, a.s, b.s, face_metric(m, blk.tangent), rows, dens);
          for (const auto& tr : face_traces(mesh, rec.independent, a.s2, b.s2))
            for (size_t r = 0; r < rows.size(); ++r) {
              const double v = sg0 * tr.u0 * dens(0, r) + sg1 * tr.u1 * dens(1, r);
              if (v != 0.0) ind.emplace_back(rows[r], tr.edge, w * v);
            }
        }
    }
  }
  Coupling c;
  c.dependent.resize(sp.size(), mesh.count[1]);
  c.independent.resize(sp.size(), mesh.count[1]);
  c.dependent.setFromTriplets(dep.begin(), dep.end());
  c.independent.setFromTriplets(ind.begin(), ind.end());
  return c;
}

SparseMatrix multiplier_gram(const ControlMesh& mesh, const MultiplierSpace& sp, int nq) {
  nq = nq > 0 ? nq : default_quadrature(mesh);
  std::vector<Triplet> trip;
  std::vector<int> rows;
  Eigen::Matrix2Xd dens;
  for (const auto& blk : sp.blocks) {
    const FaceRef& f = blk.face;
    const auto enr = enrichment_on_face(mesh, sp, f);
    const auto& kn = mesh.disc.knots[f.patch];
    const auto r0 = composite_gauss(kn[blk.tangent[0]].breakpoints(), nq);
    const auto r1 = composite_gauss(kn[blk.tangent[1]].breakpoints(), nq);
    for (size_t j = 0; j < r1.points.size(); ++j)
      for (size_t i = 0; i < r0.points.size(); ++i) {
        const double s = r0.points[i], t = r1.points[j], w = r0.weights[i] * r1.weights[j];
        const MapEval m = eval_map(mesh.domain.patches[f.patch], face_xi(f.side, s, t));
        const FaceMetric fm = face_metric(m, blk.tangent);
        face_multipliers(mesh, blk, enr, s, t, fm, rows, dens);
        const Eigen::MatrixXd loc = dens.transpose() * fm.g * dens * (w / fm.area);
        for (size_t b = 0; b < rows.size(); ++b)
          for (size_t a = 0; a < rows.size(); ++a) trip.emplace_back(rows[a], rows[b], loc(a, b));
      }
  }
  SparseMatrix N(sp.size(), sp.size());
  N.setFromTriplets(trip.begin(), trip.end());
  const SparseMatrix Nt = N.transpose();
  return 0.5 * (N + Nt);
}

}  // namespace igatc
