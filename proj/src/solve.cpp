#include "igatc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace igatc {

namespace {

using Triplet = Eigen::Triplet<double>;

bool is_dependent(const MultiPatchDomain& d, int subdomain) {
  for (const auto& r : d.interfaces)
    if (d.subdomain[r.dependent.patch] == subdomain) return true;
  return false;
}

GaugePartition no_gauge(int ndofs) {
  GaugePartition p;
  p.cotree.resize(ndofs);
  for (int i = 0; i < ndofs; ++i) p.cotree[i] = i;
  return p;
}

/// Free dofs of every subdomain concatenated in one numbering, with the per-subdomain maps.
struct StackedDofs {
  DofMap all;
  std::vector<DofMap> parts;
  std::vector<int> offset;
};

StackedDofs stacked_free_edges(const ControlMesh& mesh) {
  StackedDofs s;
  s.all.k = 1;
  s.all.index.assign(mesh.count[1], -1);
  for (int sd = 0; sd < mesh.domain.num_subdomains(); ++sd) {
    s.parts.push_back(free_dofs(mesh, 1, sd));
    s.offset.push_back(s.all.size());
    for (int e : s.parts.back().global) {
      s.all.index[e] = s.all.size();
      s.all.global.push_back(e);
    }
  }
  return s;
}

SparseMatrix stacked_coupling(const ControlMesh& mesh, const StackedDofs& dofs, bool enriched) {
  if (mesh.domain.interfaces.empty()) return SparseMatrix(0, dofs.all.size());
  return restrict_cols(assemble_coupling(mesh, build_multiplier(mesh, enriched)).combined(), dofs.all);
}

/// Basis of the constrained space {Gu = 0} inside the cotree, as columns over the stacked free edges.
SparseMatrix constrained_cotree_basis(const ControlMesh& mesh, const StackedDofs& dofs, const SparseMatrix& G,
                                      GaugeMode gauge) {
  std::vector<Triplet> et;
  int nc = 0;
  for (size_t sd = 0; sd < dofs.parts.size(); ++sd) {
    const int n = dofs.parts[sd].size();
    const int id = static_cast<int>(sd);
    const GaugePartition part =
        gauge == GaugeMode::none
            ? no_gauge(n)
            : gauge_subdomain(mesh, dofs.parts[sd], id, is_dependent(mesh.domain, id), gauge == GaugeMode::tree_reversed);
    for (int d : part.cotree) et.emplace_back(dofs.offset[sd] + d, nc++, 1.0);
  }
  SparseMatrix E(dofs.all.size(), nc);
  E.setFromTriplets(et.begin(), et.end());
  return E * constraint_basis(SparseMatrix(G * E)).Z;
}

/// f - M grad(phi), with grad(phi) the M-projection of the load's Riesz vector onto the constrained gradients.
Eigen::VectorXd compatible_load(const ControlMesh& mesh, const SparseMatrix& G, const Eigen::VectorXd& f) {
  const StackedDofs dofs = stacked_free_edges(mesh);
  const DofMap verts = free_dofs(mesh, 0);
  const SparseMatrix M = restrict_matrix(assemble_mass(mesh), dofs.all, dofs.all);
  const SparseMatrix grad = restrict_matrix(gradient_incidence(mesh), dofs.all, verts);
  const SparseMatrix MG = M * grad;
  const SparseMatrix GMG = SparseMatrix(grad.transpose() * MG);
  const SparseMatrix C = restrict_cols(G, dofs.all) * grad;
  const int nv = verts.size(), m = static_cast<int>(C.rows());
  std::vector<Triplet> t;
  for (int c = 0; c < GMG.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(GMG, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < C.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(C, c); it; ++it) {
      t.emplace_back(nv + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nv + it.row(), it.value());
    }
  SparseMatrix S(nv + m, nv + m);
  S.setFromTriplets(t.begin(), t.end());
  const Eigen::VectorXd fr = restrict_vector(f, dofs.all);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + m);
  rhs.head(nv) = grad.transpose() * fr;
  const Eigen::VectorXd x = least_squares(S, rhs);
  const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  if ((S * x - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) throw SolverError("gradient projection of the load failed");
  return expand_vector(fr - MG * x.head(nv), dofs.all);
}

}  // namespace

KernelReport kernel_dimension(const SparseMatrix& K, const SparseMatrix& G, double rel) {
  KernelReport r;
  const ConstraintBasis cb = constraint_basis(G);
  r.constraint_rank = cb.rank;
  r.size = static_cast<int>(cb.Z.cols());
  const SparseMatrix KZ = K * cb.Z;
  const Eigen::MatrixXd A = Eigen::MatrixXd(SparseMatrix(cb.Z.transpose() * KZ));
  const Eigen::MatrixXd As = 0.5 * (A + A.transpose());
  r.cluster = count_zeros(symmetric_eigenvalues(As), rel);
  r.dimension = r.cluster.zeros;
  return r;
}

SaddleSystem build_saddle(const ControlMesh& mesh, const SourceProblem& src, bool enriched, GaugeMode gauge) {
  SaddleSystem sys;
  sys.mesh = &mesh;
  const SparseMatrix K = assemble_curlcurl(mesh, src.reluctivity);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.count[1]);
  if (src.current || src.magnetisation) f = assemble_load(mesh, src.current, src.magnetisation);
  SparseMatrix G(0, mesh.count[1]);
  if (!mesh.domain.interfaces.empty()) {
    sys.multiplier = build_multiplier(mesh, enriched);
    G = assemble_coupling(mesh, sys.multiplier).combined();
    if (src.compatible_load && src.current && f.lpNorm<Eigen::Infinity>() > 0.0) f = compatible_load(mesh, G, f);
  }
  for (int sd = 0; sd < mesh.domain.num_subdomains(); ++sd) {
    SubdomainBlock b;
    b.subdomain = sd;
    b.dofs = free_dofs(mesh, 1, sd);
    b.gauge = gauge == GaugeMode::none
                  ? no_gauge(b.dofs.size())
                  : gauge_subdomain(mesh, b.dofs, sd, is_dependent(mesh.domain, sd), gauge == GaugeMode::tree_reversed);
    const ReducedSystem red = gauge_reduce(restrict_matrix(K, b.dofs, b.dofs), restrict_vector(f, b.dofs), b.gauge);
    b.K = red.K;
    b.rhs = red.rhs;
    b.expander = red.expander;
    b.G = restrict_cols(G, b.dofs) * b.expander;
    sys.blocks.push_back(std::move(b));
  }
  return sys;
}

Eigen::Vector3d FieldSolution::potential(int patch, const Eigen::Vector3d& xi) const {
  return evaluate_form(*mesh, 1, edges, patch, xi);
}

Eigen::Vector3d FieldSolution::flux(int patch, const Eigen::Vector3d& xi) const {
  return evaluate_form(*mesh, 2, face_coefficients(), patch, xi);
}

Eigen::VectorXd FieldSolution::face_coefficients() const { return curl_incidence(*mesh) * edges; }

FieldSolution solve_magnetostatic(const SaddleSystem& sys) {
  const int m = sys.multiplier.size();
  std::vector<int> off{0};
  for (const auto& b : sys.blocks) off.push_back(off.back() + static_cast<int>(b.K.rows()));
  const int n = off.back() + m;
  std::vector<Triplet> t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < sys.blocks.size(); ++i) {
    const auto& b = sys.blocks[i];
    for (int c = 0; c < b.K.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(b.K, c); it; ++it) t.emplace_back(off[i] + it.row(), off[i] + it.col(), it.value());
    if (m > 0)
      for (int c = 0; c < b.G.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(b.G, c); it; ++it) {
          t.emplace_back(off.back() + it.row(), off[i] + it.col(), it.value());
          t.emplace_back(off[i] + it.col(), off.back() + it.row(), it.value());
        }
    rhs.segment(off[i], b.rhs.size()) = b.rhs;
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  FieldSolution sol;
  sol.mesh = sys.mesh;
  sol.edges = Eigen::VectorXd::Zero(sys.mesh->count[1]);
  sol.multipliers = Eigen::VectorXd::Zero(m);
  if (rhs.lpNorm<Eigen::Infinity>() == 0.0) return sol;

  auto singular = [&](const std::string& what) {
    bool gauged = false, enriched = sys.multiplier.enriched || sys.multiplier.size() == 0;
    for (const auto& b : sys.blocks) gauged = gauged || !b.gauge.tree.empty();
    std::ostringstream os;
    os << what << " (" << n << " unknowns)";
    if (!gauged) os << "; suspected cause: no gauge, the curl-curl block has a gradient kernel";
    else if (!enriched) os << "; suspected cause: missing enrichment of the multiplier space at interface-internal vertices";
    else os << "; suspected cause: missing cohomology enrichment of the tree";
    throw SolverError(os.str());
  };
  LuSolver lu;
  if (!lu.factor(A)) singular("singular saddle matrix");
  // roundoff hides exact singularity from the factorization; healthy systems stay far above this pivot ratio
  if (lu.rcond() < 1e-12) {
    std::ostringstream os;
    os << "singular saddle matrix, pivot ratio " << lu.rcond();
    singular(os.str());
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) singular("nonfinite saddle solution");
  sol.residual = (A * x - rhs).lpNorm<Eigen::Infinity>() / rhs.lpNorm<Eigen::Infinity>();
  if (!(sol.residual < 1e-10)) {
    std::ostringstream os;
    os << "saddle residual " << sol.residual << " exceeds 1e-10";
    singular(os.str());
  }
  for (size_t i = 0; i < sys.blocks.size(); ++i) {
    const auto& b = sys.blocks[i];
    const Eigen::VectorXd free = b.expander * x.segment(off[i], b.K.rows());
    for (int d = 0; d < b.dofs.size(); ++d) sol.edges(b.dofs.global[d]) = free(d);
  }
  if (m > 0) sol.multipliers = x.tail(m);
  return sol;
}

double relative_error(const FieldSolution& sol, const VectorField& exact) {
  return l2_error_face_field(*sol.mesh, sol.face_coefficients(), exact).relative();
}

SpectrumReport solve_eigen(const ControlMesh& mesh, const EigenOptions& opt) {
  const StackedDofs dofs = stacked_free_edges(mesh);
  const SparseMatrix K = restrict_matrix(assemble_curlcurl(mesh), dofs.all, dofs.all);
  const SparseMatrix M = restrict_matrix(assemble_mass(mesh), dofs.all, dofs.all);
  const SparseMatrix G = stacked_coupling(mesh, dofs, opt.enriched);
  const SparseMatrix EZ = constrained_cotree_basis(mesh, dofs, G, opt.gauge);
  Eigen::MatrixXd A = Eigen::MatrixXd(SparseMatrix(EZ.transpose() * K * EZ));
  Eigen::MatrixXd B = Eigen::MatrixXd(SparseMatrix(EZ.transpose() * M * EZ));
  A = 0.5 * (A + A.transpose()).eval();
  B = 0.5 * (B + B.transpose()).eval();

  SpectrumReport rep;
  rep.size = static_cast<int>(A.rows());
  std::vector<double> values;
  Eigen::MatrixXd free_modes;
  if (opt.gauge == GaugeMode::none) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        A, B, opt.modes > 0 ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("generalized eigensolver failed");
    rep.cluster = count_zeros(es.eigenvalues());
    values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    if (opt.modes > 0) {
      const int first = rep.cluster.zeros, k = std::min<int>(opt.modes, rep.size - first);
      free_modes = EZ * es.eigenvectors().middleCols(first, k);
      rep.mode_values = es.eigenvalues().segment(first, k);
    }
  } else {
    // quotient mass: remove the M-projection onto constrained gradients
    const DofMap verts = free_dofs(mesh, 0);
    const SparseMatrix grad = restrict_matrix(gradient_incidence(mesh), dofs.all, verts);
    Eigen::MatrixXd R;
    if (G.rows() > 0) {
      const NullSpace ns = null_space(Eigen::MatrixXd(SparseMatrix(G * grad)));
      R = grad * ns.basis;
    } else {
      R = Eigen::MatrixXd(grad);
    }
    const Eigen::MatrixXd MR = M * R;
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (R.cols() > 0) {
      const Eigen::MatrixXd RMR = R.transpose() * MR;
      const Eigen::MatrixXd P = EZ.transpose() * MR;
      llt.compute(0.5 * (RMR + RMR.transpose()));
      if (llt.info() != Eigen::Success) throw SolverError("gradient mass matrix is not positive definite");
      B -= P * llt.solve(P.transpose());
      B = 0.5 * (B + B.transpose()).eval();
    }
    // Gradients left in the gauged space have zero quotient mass and zero curl. Both forms vanish on them, so
    // the pencil is solved on the coordinates that pivoted LDLT keeps and the null directions are reported as zeros.
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(B);
    if (ldlt.info() != Eigen::Success) throw SolverError("quotient mass factorization failed");
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    int s = 0;
    while (s < d.size() && d(d.size() - 1 - s) <= 1e-10 * dmax) ++s;
    if (s > 0 && s < d.size() && d(d.size() - s) > 0.0 && d(d.size() - 1 - s) < 10.0 * d(d.size() - s))
      throw SolverError("quotient mass has no clear null space");
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(ldlt.transpositionsP());
    const Eigen::VectorXi order = perm * Eigen::VectorXi::LinSpaced(rep.size, 0, rep.size - 1);
    const int n = rep.size - s;
    Eigen::MatrixXd As(n, n), Bs(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        As(i, j) = A(order(i), order(j));
        Bs(i, j) = B(order(i), order(j));
      }
    Eigen::MatrixXd coords;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        As, Bs, opt.modes > 0 ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("generalized eigensolver failed");
    if (opt.modes > 0) {
      const int k = std::min(opt.modes, n);
      coords = Eigen::MatrixXd::Zero(rep.size, k);
      for (int i = 0; i < n; ++i) coords.row(order(i)) = es.eigenvectors().row(i).head(k);
      rep.mode_values = es.eigenvalues().head(k);
      // the true eigenfield is M-orthogonal to the constrained gradients
      free_modes = EZ * coords;
      if (R.cols() > 0) free_modes -= R * llt.solve(MR.transpose() * free_modes);
    }
    values.assign(s, 0.0);
    values.insert(values.end(), es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(values.begin(), values.end());
    rep.cluster = count_zeros(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<int>(values.size())));
  }
  const int keep = std::min<int>(opt.count, static_cast<int>(values.size()));
  rep.eigenvalues = Eigen::Map<Eigen::VectorXd>(values.data(), keep);
  if (free_modes.cols() > 0) {
    rep.modes = Eigen::MatrixXd::Zero(mesh.count[1], free_modes.cols());
    for (int d = 0; d < dofs.all.size(); ++d) rep.modes.row(dofs.all.global[d]) = free_modes.row(d);
  }
  return rep;
}

Eigen::MatrixXd constrained_gauged_stiffness(const ControlMesh& mesh, bool enriched, GaugeMode gauge) {
  const StackedDofs dofs = stacked_free_edges(mesh);
  const SparseMatrix K = restrict_matrix(assemble_curlcurl(mesh), dofs.all, dofs.all);
  const SparseMatrix EZ = constrained_cotree_basis(mesh, dofs, stacked_coupling(mesh, dofs, enriched), gauge);
  const Eigen::MatrixXd A = Eigen::MatrixXd(SparseMatrix(EZ.transpose() * K * EZ));
  return 0.5 * (A + A.transpose());
}

std::vector<double> cube_spectrum(double side, double max_value) {
  const double k2 = std::pow(std::numbers::pi / side, 2);
  const int top = static_cast<int>(std::sqrt(max_value / k2)) + 1;
  std::vector<double> out;
  for (int a = 0; a <= top; ++a)
    for (int b = 0; b <= top; ++b)
      for (int c = 0; c <= top; ++c) {
        const int nz = (a > 0) + (b > 0) + (c > 0);
        if (nz < 2) continue;
        const double v = k2 * (a * a + b * b + c * c);
        if (v > max_value) continue;
        for (int m = 0; m < (nz == 3 ? 2 : 1); ++m) out.push_back(v);
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> unmatched_modes(const std::vector<double>& computed, const std::vector<double>& reference, double rel) {
  std::vector<char> used(reference.size(), 0);
  std::vector<int> out;
  for (size_t i = 0; i < computed.size(); ++i) {
    int best = -1;
    double bd = rel;
    for (size_t j = 0; j < reference.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(computed[i] - reference[j]) / reference[j];
      if (d <= bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) out.push_back(static_cast<int>(i));
    else used[best] = 1;
  }
  return out;
}

InfSupReport infsup_constant(const ControlMesh& mesh, bool enriched) {
  int dep = -1;
  for (int sd = 0; sd < mesh.domain.num_subdomains(); ++sd)
    if (is_dependent(mesh.domain, sd)) dep = sd;
  if (dep < 0) throw SolverError("inf-sup constant needs an interface");
  const DofMap dofs = free_dofs(mesh, 1, dep);
  const SparseMatrix X =
      restrict_matrix(SparseMatrix(assemble_curlcurl(mesh) + assemble_mass(mesh)), dofs, dofs);
  const MultiplierSpace sp = build_multiplier(mesh, enriched);
  const SparseMatrix G = restrict_cols(assemble_coupling(mesh, sp).dependent, dofs);
  const Eigen::MatrixXd N = Eigen::MatrixXd(multiplier_gram(mesh, sp));
  SpdSolver chol;
  if (!chol.factor(X)) throw SolverError("H(curl) Gram matrix is not positive definite");
  const Eigen::MatrixXd Gt = Eigen::MatrixXd(SparseMatrix(G.transpose()));
  const Eigen::MatrixXd Y = chol.solve(Gt);
  Eigen::MatrixXd S = Gt.transpose() * Y;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, N, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("singular multiplier Gram matrix");
  InfSupReport r;
  r.multipliers = sp.size();
  r.rank = static_cast<int>(sp.size());
  r.beta = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  return r;
}

}  // namespace igatc
