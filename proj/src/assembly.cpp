#include "igatc/assembly.hpp"

#include "igatc/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

namespace igatc {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Basis tables of one patch direction at all quadrature points.
struct DirTable {
  std::vector<double> x, w;
  Eigen::MatrixXd B, D;
  std::vector<int> first_b, first_d;
  int elements = 0, nq = 0;
};

DirTable make_table(const KnotVector& kv, const ReducedKnotVector& rk, int nq) {
  const auto rule = composite_gauss(kv.breakpoints(), nq);
  DirTable t;
  t.nq = nq;
  t.elements = kv.spans();
  const int n = static_cast<int>(rule.points.size()), p = kv.degree();
  t.x = rule.points;
  t.w = rule.weights;
  t.B.resize(p + 1, n);
  t.D.resize(p, n);
  for (int q = 0; q < n; ++q) {
    const auto eb = eval_basis(kv, t.x[q]);
    const auto ed = eval_curry_schoenberg(rk, t.x[q]);
    t.B.col(q) = eb.values;
    t.D.col(q) = ed.values;
    t.first_b.push_back(eb.first);
    t.first_d.push_back(ed.first);
  }
  return t;
}

/// Basis values of one element for form degree k: phi[c] is (#functions of component c) x (#points).
struct Element {
  std::array<std::vector<int>, 3> local;
  std::array<Eigen::MatrixXd, 3> phi;
  std::vector<MapEval> map;
  Eigen::VectorXd w;  // reference weights
  int ncomp = 1;
};

class ElementLoop {
 public:
  ElementLoop(const ControlMesh& mesh, int patch, int nq) : mesh_(mesh), patch_(patch) {
    for (int d = 0; d < 3; ++d) tab_[d] = make_table(mesh.disc.knots[patch][d], mesh.reduced[patch][d], nq);
  }

  std::array<int, 3> elements() const { return {tab_[0].elements, tab_[1].elements, tab_[2].elements}; }

  void fill(int k, const std::array<int, 3>& e, Element& el) const {
    const FormLayout& L = mesh_.layout[patch_][k];
    const int nq = tab_[0].nq, Q = nq * nq * nq;
    std::array<int, 3> q0{};
    for (int d = 0; d < 3; ++d) q0[d] = e[d] * nq;
    el.ncomp = L.ncomp;
    el.w.resize(Q);
    el.map.resize(Q);
    const Patch& patch = mesh_.domain.patches[patch_];
    for (int c2 = 0, q = 0; c2 < nq; ++c2)
      for (int c1 = 0; c1 < nq; ++c1)
        for (int c0 = 0; c0 < nq; ++c0, ++q) {
          const Eigen::Vector3d xi(tab_[0].x[q0[0] + c0], tab_[1].x[q0[1] + c1], tab_[2].x[q0[2] + c2]);
          el.w(q) = tab_[0].w[q0[0] + c0] * tab_[1].w[q0[1] + c1] * tab_[2].w[q0[2] + c2];
          el.map[q] = eval_map(patch, xi);
          if (!(el.map[q].det > 0.0)) {
            std::ostringstream os;
            os << "nonpositive Jacobian " << el.map[q].det << " in patch " << patch_ << " at xi = (" << xi(0) << ", "
               << xi(1) << ", " << xi(2) << ")";
            throw AssemblyError(os.str());
          }
        }
    for (int c = 0; c < L.ncomp; ++c) {
      std::array<bool, 3> red{};
      for (int d = 0; d < 3; ++d) red[d] = k == 3 || (k == 1 && d == c) || (k == 2 && d != c);
      std::array<int, 3> first{}, cnt{};
      std::array<const Eigen::MatrixXd*, 3> tb{};
      for (int d = 0; d < 3; ++d) {
        first[d] = red[d] ? tab_[d].first_d[q0[d]] : tab_[d].first_b[q0[d]];
        tb[d] = red[d] ? &tab_[d].D : &tab_[d].B;
        cnt[d] = static_cast<int>(tb[d]->rows());
      }
      auto& loc = el.local[c];
      loc.clear();
      for (int r2 = 0; r2 < cnt[2]; ++r2)
        for (int r1 = 0; r1 < cnt[1]; ++r1)
          for (int r0 = 0; r0 < cnt[0]; ++r0) loc.push_back(L.index(c, first[0] + r0, first[1] + r1, first[2] + r2));
      auto& phi = el.phi[c];
      phi.resize(static_cast<int>(loc.size()), Q);
      for (int c2 = 0, q = 0; c2 < nq; ++c2)
        for (int c1 = 0; c1 < nq; ++c1)
          for (int c0 = 0; c0 < nq; ++c0, ++q) {
            int r = 0;
            for (int r2 = 0; r2 < cnt[2]; ++r2)
              for (int r1 = 0; r1 < cnt[1]; ++r1) {
                const double v12 = (*tb[1])(r1, q0[1] + c1) * (*tb[2])(r2, q0[2] + c2);
                for (int r0 = 0; r0 < cnt[0]; ++r0, ++r) phi(r, q) = (*tb[0])(r0, q0[0] + c0) * v12;
              }
          }
    }
  }

 private:
  const ControlMesh& mesh_;
  int patch_;
  std::array<DirTable, 3> tab_;
};

template <typename F>
void for_each_element(const ElementLoop& loop, int k, F&& f) {
  const auto ne = loop.elements();
  Element el;
  for (int e2 = 0; e2 < ne[2]; ++e2)
    for (int e1 = 0; e1 < ne[1]; ++e1)
      for (int e0 = 0; e0 < ne[0]; ++e0) {
        loop.fill(k, {e0, e1, e2}, el);
        f(el);
      }
}

int resolve_nq(const ControlMesh& mesh, int nq) { return nq > 0 ? nq : default_quadrature(mesh); }

/// Runs `work(patch)` for every patch on a small pool; results are returned in patch order.
template <typename R, typename F>
std::vector<R> per_patch(int patches, F&& work) {
  std::vector<R> out(patches);
  const int threads = std::max(1, std::min<int>(patches, static_cast<int>(std::thread::hardware_concurrency())));
  if (threads == 1) {
    for (int p = 0; p < patches; ++p) out[p] = work(p);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> fut;
  for (int t = 0; t < threads; ++t)
    fut.push_back(std::async(std::launch::async, [&] {
      for (int p = next++; p < patches; p = next++) out[p] = work(p);
    }));
  for (auto& f : fut) f.get();
  return out;
}

/// Patch-local matrix -> global entity matrix with orientation signs.
void scatter(const ControlMesh& mesh, int patch, int k, const SparseMatrix& local, std::vector<Triplet>& out) {
  const auto& g = mesh.gid[patch][k];
  const auto& s = mesh.sign[patch][k];
  for (int c = 0; c < local.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(local, c); it; ++it)
      out.emplace_back(g[it.row()], g[it.col()], s[it.row()] * s[it.col()] * it.value());
}

}  // namespace

int default_quadrature(const ControlMesh& mesh) { return mesh.disc.degree + 1; }

SparseMatrix assemble_form_mass(const ControlMesh& mesh, int k, const ScalarField& coef, int nq) {
  if (k != 1 && k != 2) throw AssemblyError("assemble_form_mass: k must be 1 or 2");
  nq = resolve_nq(mesh, nq);
  auto patch_matrix = [&](int p) {
    const ElementLoop loop(mesh, p, nq);
    const int n = mesh.layout[p][k].size();
    SparseMatrix acc(n, n);
    std::vector<Triplet> trip;
    Eigen::Matrix<double, 9, Eigen::Dynamic> metric;
    auto flush = [&] {
      SparseMatrix t(n, n);
      t.setFromTriplets(trip.begin(), trip.end());
      acc += t;
      trip.clear();
    };
    for_each_element(loop, k, [&](const Element& el) {
      const int Q = static_cast<int>(el.w.size());
      metric.resize(9, Q);
      for (int q = 0; q < Q; ++q) {
        const MapEval& m = el.map[q];
        Eigen::Matrix3d A;
        if (k == 1) {
          const Eigen::Matrix3d inv = m.jacobian.inverse();
          A = inv * inv.transpose() * m.det;
        } else {
          A = m.jacobian.transpose() * m.jacobian / m.det;
        }
        const double c = coef ? coef(m.x) : 1.0;
        metric.col(q) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(A.data()) * (c * el.w(q));
      }
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          const Eigen::MatrixXd blk =
              el.phi[a] * metric.row(a + 3 * b).transpose().asDiagonal() * el.phi[b].transpose();
          for (int j = 0; j < blk.cols(); ++j)
            for (int i = 0; i < blk.rows(); ++i) {
              const double v = blk(i, j);
              if (v == 0.0) continue;
              trip.emplace_back(el.local[a][i], el.local[b][j], v);
              if (a != b) trip.emplace_back(el.local[b][j], el.local[a][i], v);
            }
        }
      if (trip.size() > 4000000) flush();
    });
    flush();
    std::vector<Triplet> g;
    g.reserve(acc.nonZeros());
    scatter(mesh, p, k, acc, g);
    return g;
  };
  const auto parts = per_patch<std::vector<Triplet>>(mesh.patches(), patch_matrix);
  SparseMatrix M(mesh.count[k], mesh.count[k]);
  std::vector<Triplet> all;
  for (const auto& t : parts) all.insert(all.end(), t.begin(), t.end());
  M.setFromTriplets(all.begin(), all.end());
  // exact symmetry regardless of summation order
  const SparseMatrix Mt = M.transpose();
  return 0.5 * (M + Mt);
}

SparseMatrix assemble_curlcurl(const ControlMesh& mesh, const ScalarField& nu, int nq) {
  const SparseMatrix C = curl_incidence(mesh);
  const SparseMatrix M2 = assemble_form_mass(mesh, 2, nu, nq);
  SparseMatrix K = C.transpose() * M2 * C;
  const SparseMatrix Kt = K.transpose();
  K = 0.5 * (K + Kt);
  K.prune(0.0);
  return K;
}

SparseMatrix assemble_mass(const ControlMesh& mesh, const ScalarField& eps, int nq) {
  return assemble_form_mass(mesh, 1, eps, nq);
}

Eigen::VectorXd assemble_load(const ControlMesh& mesh, const VectorField& current, const VectorField& magnetisation,
                              int nq) {
  nq = resolve_nq(mesh, nq);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.count[1]);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(mesh.count[2]);
  for (int p = 0; p < mesh.patches(); ++p) {
    const ElementLoop loop(mesh, p, nq);
    for (int k : {1, 2}) {
      const VectorField& src = k == 1 ? current : magnetisation;
      if (!src) continue;
      Eigen::VectorXd& out = k == 1 ? f : g;
      for_each_element(loop, k, [&](const Element& el) {
        const int Q = static_cast<int>(el.w.size());
        Eigen::Matrix3Xd ref(3, Q);
        for (int q = 0; q < Q; ++q) {
          const MapEval& m = el.map[q];
          const Eigen::Vector3d v = src(m.x);
          // pulled back so that the integrand pairs with reference basis values
          ref.col(q) = (k == 1 ? Eigen::Vector3d(m.jacobian.partialPivLu().solve(v) * m.det)
                               : Eigen::Vector3d(m.jacobian.transpose() * v)) * el.w(q);
        }
        for (int c = 0; c < el.ncomp; ++c) {
          const Eigen::VectorXd loc = el.phi[c] * ref.row(c).transpose();
          for (int i = 0; i < loc.size(); ++i) {
            const int l = el.local[c][i];
            out(mesh.gid[p][k][l]) += mesh.sign[p][k][l] * loc(i);
          }
        }
      });
    }
  }
  if (magnetisation) f += curl_incidence(mesh).transpose() * g;
  return f;
}

SparseMatrix restrict_matrix(const SparseMatrix& A, const DofMap& rows, const DofMap& cols) {
  std::vector<Triplet> t;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      const int r = rows.index[it.row()], cc = cols.index[it.col()];
      if (r >= 0 && cc >= 0) t.emplace_back(r, cc, it.value());
    }
  SparseMatrix B(rows.size(), cols.size());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

SparseMatrix restrict_cols(const SparseMatrix& A, const DofMap& cols) {
  std::vector<Triplet> t;
  for (int c = 0; c < A.outerSize(); ++c) {
    const int j = cols.index[c];
    if (j < 0) continue;
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) t.emplace_back(it.row(), j, it.value());
  }
  SparseMatrix B(A.rows(), cols.size());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v, const DofMap& dofs) {
  Eigen::VectorXd out(dofs.size());
  for (int i = 0; i < dofs.size(); ++i) out(i) = v(dofs.global[i]);
  return out;
}

Eigen::VectorXd expand_vector(const Eigen::VectorXd& v, const DofMap& dofs) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<int>(dofs.index.size()));
  for (int i = 0; i < dofs.size(); ++i) out(dofs.global[i]) = v(i);
  return out;
}

double L2Error::relative() const {
  if (!(norm2 > 0.0)) throw AssemblyError("relative error: exact field has zero norm");
  return std::sqrt(error2 / norm2);
}

L2Error l2_error_face_field(const ControlMesh& mesh, const Eigen::VectorXd& coef, const VectorField& exact, int nq) {
  nq = resolve_nq(mesh, nq);
  L2Error r;
  for (int p = 0; p < mesh.patches(); ++p) {
    const ElementLoop loop(mesh, p, nq);
    for_each_element(loop, 2, [&](const Element& el) {
      const int Q = static_cast<int>(el.w.size());
      Eigen::Matrix3Xd ref = Eigen::Matrix3Xd::Zero(3, Q);
      for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd a(el.local[c].size());
        for (size_t i = 0; i < el.local[c].size(); ++i) {
          const int l = el.local[c][i];
          a(i) = coef(mesh.gid[p][2][l]) * mesh.sign[p][2][l];
        }
        ref.row(c) = (el.phi[c].transpose() * a).transpose();
      }
      for (int q = 0; q < Q; ++q) {
        const MapEval& m = el.map[q];
        const Eigen::Vector3d bh = m.jacobian * ref.col(q) / m.det;
        const Eigen::Vector3d b = exact(m.x);
        const double dv = el.w(q) * m.det;
        r.error2 += dv * (bh - b).squaredNorm();
        r.norm2 += dv * b.squaredNorm();
      }
    });
  }
  return r;
}

void write_triplets(const std::string& path, const SparseMatrix& A) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "% " << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n" << std::setprecision(17);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace igatc
