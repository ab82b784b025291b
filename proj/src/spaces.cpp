#include "igatc/spaces.hpp"

namespace igatc {

SparseMatrix DofMap::selection() const {
  SparseMatrix S(static_cast<int>(index.size()), size());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < size(); ++i) t.emplace_back(global[i], i, 1.0);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

namespace {

DofMap make_map(const ControlMesh& mesh, int k, int subdomain, bool drop_dirichlet) {
  DofMap m;
  m.k = k;
  m.index.assign(mesh.count[k], -1);
  for (int e = 0; e < mesh.count[k]; ++e) {
    if (subdomain >= 0 && mesh.subdomain[k][e] != subdomain) continue;
    if (drop_dirichlet && (mesh.flags[k][e] & on_dirichlet)) continue;
    m.index[e] = m.size();
    m.global.push_back(e);
  }
  return m;
}

SparseMatrix restrict_rows_cols(const SparseMatrix& A, const DofMap& rows, const DofMap& cols) {
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      const int r = rows.index[it.row()], cc = cols.index[it.col()];
      if (r >= 0 && cc >= 0) t.emplace_back(r, cc, it.value());
    }
  SparseMatrix B(rows.size(), cols.size());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

}  // namespace

DofMap free_dofs(const ControlMesh& mesh, int k, int subdomain) { return make_map(mesh, k, subdomain, true); }
DofMap all_dofs(const ControlMesh& mesh, int k, int subdomain) { return make_map(mesh, k, subdomain, false); }

DiscreteSpace build_space(const ControlMesh& mesh, int k, int subdomain) {
  if (k == 1 && mesh.disc.degree < 2) throw SplineError("edge space needs p >= 2");
  return {&mesh, k, free_dofs(mesh, k, subdomain)};
}

SparseMatrix gradient_matrix(const DiscreteSpace& s0, const DiscreteSpace& s1) {
  if (s0.mesh != s1.mesh || s0.k != 0 || s1.k != 1) throw std::invalid_argument("gradient_matrix: mismatched spaces");
  return restrict_rows_cols(gradient_incidence(*s0.mesh), s1.dofs, s0.dofs);
}

SparseMatrix curl_matrix(const DiscreteSpace& s1, const DiscreteSpace& s2) {
  if (s1.mesh != s2.mesh || s1.k != 1 || s2.k != 2) throw std::invalid_argument("curl_matrix: mismatched spaces");
  return restrict_rows_cols(curl_incidence(*s1.mesh), s2.dofs, s1.dofs);
}

SparseMatrix div_matrix(const DiscreteSpace& s2, const DiscreteSpace& s3) {
  if (s2.mesh != s3.mesh || s2.k != 2 || s3.k != 3) throw std::invalid_argument("div_matrix: mismatched spaces");
  return restrict_rows_cols(div_incidence(*s2.mesh), s3.dofs, s2.dofs);
}

FormBasisEval eval_form_basis(const ControlMesh& mesh, int patch, int k, const Eigen::Vector3d& xi) {
  const auto& kn = mesh.disc.knots[patch];
  const auto& rd = mesh.reduced[patch];
  const FormLayout& L = mesh.layout[patch][k];
  FormBasisEval out;
  std::array<BasisDerivs<double>, 3> B;
  std::array<BasisEval<double>, 3> D;
  for (int d = 0; d < 3; ++d) {
    B[d] = eval_basis_derivs(kn[d], xi(d), 1);
    D[d] = eval_curry_schoenberg(rd[d], xi(d));
  }
  std::vector<Eigen::Vector3d> vals, grads;
  for (int c = 0; c < L.ncomp; ++c) {
    // which directions use the reduced (D) basis
    std::array<bool, 3> red{};
    for (int d = 0; d < 3; ++d) red[d] = k == 3 || (k == 1 && d == c) || (k == 2 && d != c);
    std::array<int, 3> first, cnt;
    for (int d = 0; d < 3; ++d) {
      first[d] = red[d] ? D[d].first : B[d].first;
      cnt[d] = red[d] ? static_cast<int>(D[d].values.size()) : static_cast<int>(B[d].ders.cols());
    }
    auto v = [&](int d, int r) { return red[d] ? D[d].values(r) : B[d].ders(0, r); };
    for (int r2 = 0; r2 < cnt[2]; ++r2)
      for (int r1 = 0; r1 < cnt[1]; ++r1)
        for (int r0 = 0; r0 < cnt[0]; ++r0) {
          const double val = v(0, r0) * v(1, r1) * v(2, r2);
          out.local.push_back(L.index(c, first[0] + r0, first[1] + r1, first[2] + r2));
          Eigen::Vector3d vec = Eigen::Vector3d::Zero();
          if (k == 1 || k == 2) vec(c) = val;
          else vec(0) = val;
          vals.push_back(vec);
          if (k == 0)
            grads.emplace_back(B[0].ders(1, r0) * v(1, r1) * v(2, r2), v(0, r0) * B[1].ders(1, r1) * v(2, r2),
                               v(0, r0) * v(1, r1) * B[2].ders(1, r2));
        }
  }
  out.values.resize(3, vals.size());
  for (size_t i = 0; i < vals.size(); ++i) out.values.col(i) = vals[i];
  out.grads.resize(3, grads.size());
  for (size_t i = 0; i < grads.size(); ++i) out.grads.col(i) = grads[i];
  return out;
}

Eigen::Vector3d push_forward(int k, const MapEval& m, const Eigen::Vector3d& v) {
  switch (k) {
    case 1: return m.jacobian.transpose().partialPivLu().solve(v);
    case 2: return m.jacobian * v / m.det;
    case 3: return v / m.det;
    default: return v;
  }
}

Eigen::Vector3d evaluate_form(const ControlMesh& mesh, int k, const Eigen::VectorXd& coef, int patch,
                              const Eigen::Vector3d& xi) {
  const FormBasisEval e = eval_form_basis(mesh, patch, k, xi);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (size_t r = 0; r < e.local.size(); ++r) {
    const int l = e.local[r];
    v += coef(mesh.gid[patch][k][l]) * mesh.sign[patch][k][l] * e.values.col(r);
  }
  return push_forward(k, eval_map(mesh.domain.patches[patch], xi), v);
}

Eigen::Vector3d evaluate_gradient(const ControlMesh& mesh, const Eigen::VectorXd& coef, int patch,
                                  const Eigen::Vector3d& xi) {
  const FormBasisEval e = eval_form_basis(mesh, patch, 0, xi);
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (size_t r = 0; r < e.local.size(); ++r) g += coef(mesh.gid[patch][0][e.local[r]]) * e.grads.col(r);
  return push_forward(1, eval_map(mesh.domain.patches[patch], xi), g);
}

Eigen::Vector3d face_xi(Side side, double s, double t) {
  Eigen::Vector3d xi;
  const auto tg = side_tangents(side);
  xi(side_direction(side)) = side_upper(side) ? 1.0 : 0.0;
  xi(tg[0]) = s;
  xi(tg[1]) = t;
  return xi;
}

TraceSpace trace_space(const ControlMesh& mesh, const FaceRef& face, TraceFlavor flavor) {
  TraceSpace ts;
  ts.face = face;
  ts.flavor = flavor;
  ts.tangent = side_tangents(face.side);
  const auto n = mesh.disc.counts(face.patch);
  const int a = ts.tangent[0], b = ts.tangent[1];
  const bool curl = flavor == TraceFlavor::curl;
  ts.dims[0] = curl ? std::array<int, 2>{n[a] - 1, n[b]} : std::array<int, 2>{n[a], n[b] - 1};
  ts.dims[1] = curl ? std::array<int, 2>{n[a], n[b] - 1} : std::array<int, 2>{n[a] - 1, n[b]};
  ts.offset = {0, ts.dims[0][0] * ts.dims[0][1], ts.dims[0][0] * ts.dims[0][1] + ts.dims[1][0] * ts.dims[1][1]};
  if (curl) {
    const int d = side_direction(face.side);
    const int at = side_upper(face.side) ? n[d] - 1 : 0;
    const FormLayout& L = mesh.layout[face.patch][1];
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < ts.dims[c][1]; ++j)
        for (int i = 0; i < ts.dims[c][0]; ++i) {
          std::array<int, 3> idx{};
          idx[a] = i;
          idx[b] = j;
          idx[d] = at;
          ts.parent_local.push_back(L.index(ts.tangent[c], idx[0], idx[1], idx[2]));
        }
  }
  return ts;
}

Eigen::Matrix2Xd eval_trace_basis(const ControlMesh& mesh, const TraceSpace& ts, double s, double t) {
  const int a = ts.tangent[0], b = ts.tangent[1];
  const auto& kn = mesh.disc.knots[ts.face.patch];
  const auto& rd = mesh.reduced[ts.face.patch];
  const auto Ba = eval_basis(kn[a], s), Bb = eval_basis(kn[b], t);
  const auto Da = eval_curry_schoenberg(rd[a], s), Db = eval_curry_schoenberg(rd[b], t);
  Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, ts.size());
  const bool curl = ts.flavor == TraceFlavor::curl;
  for (int c = 0; c < 2; ++c) {
    // component c uses D along tangent c for the curl flavor, along the other tangent for div
    const bool dfirst = curl ? c == 0 : c == 1;
    const auto& E0 = dfirst ? Da : Ba;
    const auto& E1 = dfirst ? Bb : Db;
    for (int j = 0; j < E1.values.size(); ++j)
      for (int i = 0; i < E0.values.size(); ++i)
        out(c, ts.index(c, E0.first + i, E1.first + j)) = E0.values(i) * E1.values(j);
  }
  return out;
}

Eigen::Vector2d tangential_trace(const ControlMesh& mesh, const FaceRef& face, const Eigen::VectorXd& local_coef,
                                 double s, double t) {
  const FormBasisEval e = eval_form_basis(mesh, face.patch, 1, face_xi(face.side, s, t));
  const auto tg = side_tangents(face.side);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (size_t r = 0; r < e.local.size(); ++r) {
    v(0) += local_coef(e.local[r]) * e.values(tg[0], r);
    v(1) += local_coef(e.local[r]) * e.values(tg[1], r);
  }
  return v;
}

}  // namespace igatc
