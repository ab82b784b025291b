#include "igatc/control_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace igatc {

double Discretization::mesh_size() const {
  double h = 0.0;
  for (const auto& k : knots)
    for (const auto& kv : k) h = std::max(h, kv.mesh_size());
  return h;
}

Discretization make_discretization(const MultiPatchDomain& domain, int degree, int elements, int regularity) {
  Discretization d;
  d.degree = degree;
  const KnotVector kv = KnotVector::uniform(degree, elements, regularity);
  for (const auto& p : domain.patches) {
    for (int dir = 0; dir < 3; ++dir) {
      const auto& g = p.knots(dir);
      if (g.degree() > degree) throw SplineError("geometry degree exceeds the discrete degree");
      for (double b : g.breakpoints())
        if (std::find(kv.knots().begin(), kv.knots().end(), b) == kv.knots().end())
          throw SplineError("geometry breakpoint is not a knot of the discretization");
    }
    d.knots.push_back({kv, kv, kv});
  }
  return d;
}

std::array<int, 4> FormLayout::decode(int flat) const {
  int c = 0;
  while (flat >= offset[c + 1]) ++c;
  int r = flat - offset[c];
  const int i = r % dims[c][0];
  r /= dims[c][0];
  const int j = r % dims[c][1];
  return {c, i, j, r / dims[c][1]};
}

FormLayout form_layout(const std::array<int, 3>& n, int k) {
  FormLayout l;
  l.ncomp = (k == 1 || k == 2) ? 3 : 1;
  for (int c = 0; c < l.ncomp; ++c)
    for (int d = 0; d < 3; ++d) {
      int r = 0;
      if (k == 1) r = d == c ? 1 : 0;
      if (k == 2) r = d == c ? 0 : 1;
      if (k == 3) r = 1;
      l.dims[c][d] = n[d] - r;
    }
  l.offset[0] = 0;
  for (int c = 0; c < l.ncomp; ++c) l.offset[c + 1] = l.offset[c] + l.dims[c][0] * l.dims[c][1] * l.dims[c][2];
  for (int c = l.ncomp + 1; c < 4; ++c) l.offset[c] = l.offset[l.ncomp];
  return l;
}

bool entity_on_side(const std::array<int, 3>& n, int k, int comp, const std::array<int, 3>& idx, Side side) {
  const int d = side_direction(side);
  const int at = side_upper(side) ? n[d] - 1 : 0;
  switch (k) {
    case 0: return idx[d] == at;
    case 1: return comp != d && idx[d] == at;
    case 2: return comp == d && idx[d] == at;
    default: return false;
  }
}

Eigen::MatrixX3d discrete_control_points(const Patch& patch, const std::array<KnotVector, 3>& knots) {
  std::array<Eigen::VectorXd, 3> g;
  std::array<Eigen::PartialPivLU<Eigen::MatrixXd>, 3> lu;
  std::array<int, 3> n;
  for (int d = 0; d < 3; ++d) {
    g[d] = greville_abscissae(knots[d]);
    lu[d].compute(collocation_matrix(knots[d], g[d]));
    n[d] = knots[d].size();
  }
  const int total = n[0] * n[1] * n[2];
  Eigen::MatrixX4d H(total, 4);
  for (int c = 0; c < n[2]; ++c)
    for (int b = 0; b < n[1]; ++b)
      for (int a = 0; a < n[0]; ++a) {
        const Eigen::Vector3d xi(g[0](a), g[1](b), g[2](c));
        const MapEval m = eval_map(patch, xi);
        // homogeneous sample: weight from the rational basis denominator
        std::array<BasisEval<double>, 3> e;
        for (int d = 0; d < 3; ++d) e[d] = eval_basis(patch.knots(d), xi(d));
        double w = 0.0;
        for (int k = 0; k < e[2].values.size(); ++k)
          for (int j = 0; j < e[1].values.size(); ++j)
            for (int i = 0; i < e[0].values.size(); ++i)
              w += e[0].values(i) * e[1].values(j) * e[2].values(k) *
                   patch.points()(patch.index(e[0].first + i, e[1].first + j, e[2].first + k), 3);
        H.row(a + n[0] * (b + n[1] * c)) << w * m.x(0), w * m.x(1), w * m.x(2), w;
      }
  // apply the inverse collocation matrices direction by direction
  for (int d = 0; d < 3; ++d) {
    const int stride = d == 0 ? 1 : (d == 1 ? n[0] : n[0] * n[1]);
    Eigen::MatrixXd line(n[d], 4);
    for (int base = 0; base < total; ++base) {
      const int id = (base / stride) % n[d];
      if (id != 0) continue;
      for (int t = 0; t < n[d]; ++t) line.row(t) = H.row(base + t * stride);
      line = lu[d].solve(line);
      for (int t = 0; t < n[d]; ++t) H.row(base + t * stride) = line.row(t);
    }
  }
  Eigen::MatrixX3d X(total, 3);
  for (int r = 0; r < total; ++r) X.row(r) = H.row(r).head<3>() / H(r, 3);
  return X;
}

namespace {

struct PointIndex {
  double cell;
  double tol;
  std::unordered_map<long long, std::vector<std::pair<Eigen::Vector3d, int>>> buckets;

  static long long key(int sub, long long a, long long b, long long c) {
    return ((static_cast<long long>(sub) * 1000003LL + a) * 1000003LL + b) * 1000003LL + c;
  }

  int find(int sub, const Eigen::Vector3d& x) const {
    const long long a = std::llround(x(0) / cell), b = std::llround(x(1) / cell), c = std::llround(x(2) / cell);
    for (long long i = a - 1; i <= a + 1; ++i)
      for (long long j = b - 1; j <= b + 1; ++j)
        for (long long k = c - 1; k <= c + 1; ++k) {
          auto it = buckets.find(key(sub, i, j, k));
          if (it == buckets.end()) continue;
          for (const auto& [y, id] : it->second)
            if ((x - y).norm() <= tol) return id;
        }
    return -1;
  }

  void insert(int sub, const Eigen::Vector3d& x, int id) {
    buckets[key(sub, std::llround(x(0) / cell), std::llround(x(1) / cell), std::llround(x(2) / cell))].push_back({x, id});
  }
};

std::array<int, 3> plus(std::array<int, 3> a, int d) {
  ++a[d];
  return a;
}

/// Local boundary map: entity (k, comp, idx) -> signed (k-1)-entities (comp, idx).
std::vector<std::pair<std::array<int, 4>, int>> local_boundary(int k, int comp, const std::array<int, 3>& i) {
  std::vector<std::pair<std::array<int, 4>, int>> out;
  auto item = [](int c, const std::array<int, 3>& x) { return std::array<int, 4>{c, x[0], x[1], x[2]}; };
  if (k == 1) {
    out.push_back({item(0, i), -1});
    out.push_back({item(0, plus(i, comp)), +1});
  } else if (k == 2) {
    const int a = (comp + 1) % 3, b = (comp + 2) % 3;
    out.push_back({item(b, plus(i, a)), +1});
    out.push_back({item(b, i), -1});
    out.push_back({item(a, plus(i, b)), -1});
    out.push_back({item(a, i), +1});
  } else if (k == 3) {
    for (int l = 0; l < 3; ++l) {
      out.push_back({item(l, plus(i, l)), +1});
      out.push_back({item(l, i), -1});
    }
  }
  return out;
}

std::array<int, 4> face_cycle(const FormLayout& v, int comp, const std::array<int, 3>& i) {
  const int a = (comp + 1) % 3, b = (comp + 2) % 3;
  const auto ia = plus(i, a), iab = plus(ia, b), ib = plus(i, b);
  return {v.index(0, i[0], i[1], i[2]), v.index(0, ia[0], ia[1], ia[2]), v.index(0, iab[0], iab[1], iab[2]),
          v.index(0, ib[0], ib[1], ib[2])};
}

}  // namespace

ControlMesh extract_control_mesh(const MultiPatchDomain& domain, const Discretization& disc) {
  ControlMesh m;
  m.domain = domain;
  m.disc = disc;
  const int np = domain.num_patches();
  if (static_cast<int>(disc.knots.size()) != np) throw GeometryError("discretization does not match patch count");
  m.gid.resize(np);
  m.sign.resize(np);
  m.layout.resize(np);
  for (int p = 0; p < np; ++p)
    m.reduced.push_back({ReducedKnotVector(disc.knots[p][0]), ReducedKnotVector(disc.knots[p][1]),
                         ReducedKnotVector(disc.knots[p][2])});
  const double scale = domain.extent();
  PointIndex index{1e-7 * scale, 1e-9 * scale, {}};

  // periodic translations applied to vertices on the image faces
  struct Image {
    int patch;
    Side side;
    Eigen::Vector3d t;
  };
  std::vector<Image> images;
  for (const auto& r : domain.periodic) images.push_back({r.b.patch, r.b.side, domain.periodic_translation(r.id)});

  // vertices
  for (int p = 0; p < np; ++p) {
    const auto n = disc.counts(p);
    for (int k = 0; k < 4; ++k) m.layout[p][k] = form_layout(n, k);
    const Eigen::MatrixX3d X = discrete_control_points(domain.patches[p], disc.knots[p]);
    const int sub = domain.subdomain[p];
    auto& g = m.gid[p][0];
    g.assign(m.layout[p][0].size(), -1);
    m.sign[p][0].assign(g.size(), 1);
    for (int c = 0; c < n[2]; ++c)
      for (int b = 0; b < n[1]; ++b)
        for (int a = 0; a < n[0]; ++a) {
          const std::array<int, 3> idx{a, b, c};
          const int loc = m.layout[p][0].index(0, a, b, c);
          Eigen::Vector3d x = X.row(loc).transpose();
          for (const auto& im : images)
            if (im.patch == p && entity_on_side(n, 0, 0, idx, im.side)) x -= im.t;
          int id = index.find(sub, x);
          if (id < 0) {
            id = m.count[0]++;
            index.insert(sub, x, id);
            m.owner[0].push_back({p, 0, idx});
            m.subdomain[0].push_back(sub);
            m.vertex_position.push_back(X.row(loc).transpose());
          }
          g[loc] = id;
        }
  }

  // edges, faces: identified by their vertex sets
  std::map<std::array<int, 2>, int> edge_key;
  std::map<std::array<int, 4>, int> face_key;
  for (int p = 0; p < np; ++p) {
    const int sub = domain.subdomain[p];
    const auto& V = m.layout[p][0];
    const auto& gv = m.gid[p][0];
    for (int k = 1; k <= 3; ++k) {
      const auto& L = m.layout[p][k];
      auto& g = m.gid[p][k];
      auto& s = m.sign[p][k];
      g.assign(L.size(), -1);
      s.assign(L.size(), 1);
      for (int loc = 0; loc < L.size(); ++loc) {
        const auto dec = L.decode(loc);
        const std::array<int, 3> idx{dec[1], dec[2], dec[3]};
        const int comp = dec[0];
        if (k == 1) {
          const auto hd = plus(idx, comp);
          const int t = gv[V.index(0, idx[0], idx[1], idx[2])], h = gv[V.index(0, hd[0], hd[1], hd[2])];
          if (t == h) throw GeometryError("degenerate control edge in patch " + std::to_string(p));
          const std::array<int, 2> key{std::min(t, h), std::max(t, h)};
          auto it = edge_key.find(key);
          if (it == edge_key.end()) {
            const int id = m.count[1]++;
            edge_key.emplace(key, id);
            m.owner[1].push_back({p, comp, idx});
            m.subdomain[1].push_back(sub);
            m.edge_vertices.push_back({t, h});
            g[loc] = id;
          } else {
            g[loc] = it->second;
            const auto& ev = m.edge_vertices[it->second];
            if (ev[0] == t && ev[1] == h) s[loc] = 1;
            else s[loc] = -1;
          }
        } else if (k == 2) {
          std::array<int, 4> cyc = face_cycle(V, comp, idx);
          for (auto& c : cyc) c = gv[c];
          std::array<int, 4> key = cyc;
          std::sort(key.begin(), key.end());
          auto it = face_key.find(key);
          if (it == face_key.end()) {
            const int id = m.count[2]++;
            face_key.emplace(key, id);
            m.owner[2].push_back({p, comp, idx});
            m.subdomain[2].push_back(sub);
            g[loc] = id;
          } else {
            g[loc] = it->second;
            const auto& o = m.owner[2][it->second];
            std::array<int, 4> oc = face_cycle(m.layout[o.patch][0], o.comp, o.idx);
            for (auto& c : oc) c = m.gid[o.patch][0][c];
            const int pos = static_cast<int>(std::find(oc.begin(), oc.end(), cyc[0]) - oc.begin());
            s[loc] = oc[(pos + 1) % 4] == cyc[1] ? 1 : -1;
          }
        } else {
          g[loc] = m.count[3]++;
          m.owner[3].push_back({p, comp, idx});
          m.subdomain[3].push_back(sub);
        }
      }
    }
  }

  // flags from face tags and interface roles
  for (int k = 0; k < 4; ++k) m.flags[k].assign(m.count[k], 0);
  auto mark_side = [&](int p, Side side, std::uint8_t f) {
    const auto n = disc.counts(p);
    for (int k = 0; k < 3; ++k) {
      const auto& L = m.layout[p][k];
      for (int loc = 0; loc < L.size(); ++loc) {
        const auto dec = L.decode(loc);
        if (entity_on_side(n, k, dec[0], {dec[1], dec[2], dec[3]}, side)) m.flags[k][m.gid[p][k][loc]] |= f;
      }
    }
  };
  for (const auto& t : domain.faces) {
    if (t.kind == FaceKind::dirichlet) mark_side(t.face.patch, t.face.side, on_dirichlet);
    if (t.kind == FaceKind::neumann) mark_side(t.face.patch, t.face.side, on_neumann);
  }
  for (const auto& r : domain.interfaces) {
    mark_side(r.dependent.patch, r.dependent.side,
              r.independent.patch < 0 ? (on_interface_dependent | on_interface_boundary) : on_interface_dependent);
    if (r.independent.patch >= 0) mark_side(r.independent.patch, r.independent.side, on_interface_independent);
  }
  return m;
}

namespace {

SparseMatrix incidence(const ControlMesh& m, int k, bool all_copies) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> done(m.count[k], 0);
  for (int p = 0; p < m.patches(); ++p) {
    const auto& L = m.layout[p][k];
    const auto& Lm = m.layout[p][k - 1];
    for (int loc = 0; loc < L.size(); ++loc) {
      const int row = m.gid[p][k][loc];
      if (!all_copies) {
        if (done[row]) continue;
        done[row] = 1;
      }
      const auto dec = L.decode(loc);
      for (const auto& [e, v] : local_boundary(k, dec[0], {dec[1], dec[2], dec[3]})) {
        const int cl = Lm.index(e[0], e[1], e[2], e[3]);
        trip.emplace_back(row, m.gid[p][k - 1][cl], v * m.sign[p][k][loc] * m.sign[p][k - 1][cl]);
      }
    }
  }
  SparseMatrix A(m.count[k], m.count[k - 1]);
  if (all_copies) {
    // average over the copies; consistent gluing gives the owner matrix back
    std::vector<int> copies(m.count[k], 0);
    for (int p = 0; p < m.patches(); ++p)
      for (int g : m.gid[p][k]) ++copies[g];
    for (auto& t : trip) t = Eigen::Triplet<double>(t.row(), t.col(), t.value() / copies[t.row()]);
  }
  A.setFromTriplets(trip.begin(), trip.end());
  A.prune(0.0);
  return A;
}

}  // namespace

SparseMatrix gradient_incidence(const ControlMesh& m) { return incidence(m, 1, false); }
SparseMatrix curl_incidence(const ControlMesh& m) { return incidence(m, 2, false); }
SparseMatrix div_incidence(const ControlMesh& m) { return incidence(m, 3, false); }
SparseMatrix incidence_from_all_patches(const ControlMesh& m, int k) { return incidence(m, k, true); }

}  // namespace igatc
