#include "igatc/experiments.hpp"

#include "igatc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace igatc {

ControlMesh make_mesh(const std::string& geometry, int degree, int elements, int regularity) {
  const MultiPatchDomain d = resolve_geometry(geometry);
  return extract_control_mesh(d, make_discretization(d, degree, elements, regularity));
}

Eigen::Vector3d manufactured_potential(const Eigen::Vector3d& x) {
  using std::sin;
  return {sin(x(1)) * sin(0.5 * x(2)), sin(x(0)) * sin(0.5 * x(2)), sin(x(0)) * sin(x(1))};
}

Eigen::Vector3d manufactured_flux(const Eigen::Vector3d& x) {
  using std::cos;
  using std::sin;
  return {sin(x(0)) * cos(x(1)) - 0.5 * sin(x(0)) * cos(0.5 * x(2)),
          -cos(x(0)) * sin(x(1)) + 0.5 * sin(x(1)) * cos(0.5 * x(2)),
          cos(x(0)) * sin(0.5 * x(2)) - cos(x(1)) * sin(0.5 * x(2))};
}

Eigen::Vector3d manufactured_current(const Eigen::Vector3d& x) {
  using std::sin;
  return {1.25 * sin(x(1)) * sin(0.5 * x(2)), 1.25 * sin(x(0)) * sin(0.5 * x(2)), 2.0 * sin(x(0)) * sin(x(1))};
}

int constrained_scalar_dimension(const ControlMesh& mesh) {
  int n = 0;
  for (int v = 0; v < mesh.count[0]; ++v) n += (mesh.flags[0][v] & (on_dirichlet | on_interface_dependent)) == 0;
  return n;
}

KernelRow kernel_row(const std::string& geometry, int degree, int elements, int regularity) {
  const ControlMesh mesh = make_mesh(geometry, degree, elements, regularity);
  KernelRow row;
  row.geometry = geometry;
  row.patches = mesh.patches();
  row.degree = degree;
  row.elements = elements;
  row.dim_x0 = constrained_scalar_dimension(mesh);
  row.internal_vertices = static_cast<int>(interface_internal_vertices(mesh).size());
  const DofMap free = free_dofs(mesh, 1);
  const SparseMatrix K = restrict_matrix(assemble_curlcurl(mesh), free, free);
  for (bool enriched : {false, true}) {
    const MultiplierSpace sp = build_multiplier(mesh, enriched);
    const SparseMatrix G = restrict_cols(assemble_coupling(mesh, sp).dependent, free);
    const KernelReport r = kernel_dimension(K, G);
    if (r.cluster.ambiguous) throw SolverError("kernel dimension: no clear gap between zero and nonzero eigenvalues");
    (enriched ? row.dim_k_enriched : row.dim_k_standard) = r.dimension;
  }
  return row;
}

EigenRun eigen_run(const ControlMesh& mesh, const EigenOptions& opt, double side, double rel_tol) {
  EigenRun run;
  run.report = solve_eigen(mesh, opt);
  const auto& ev = run.report.eigenvalues;
  run.values.assign(ev.data(), ev.data() + ev.size());
  const double top = run.values.empty() ? 0.0 : run.values.back();
  const std::vector<double> ref = cube_spectrum(side, 2.0 * std::max(top, 1.0) + 10.0);
  const std::vector<int> unmatched = unmatched_modes(run.values, ref, rel_tol);
  run.spurious.assign(run.values.size(), 0);
  for (int i : unmatched) run.spurious[i] = 1;
  run.spurious_count = static_cast<int>(unmatched.size());
  // report the matched reference values in order
  std::vector<char> used(ref.size(), 0);
  run.reference.assign(run.values.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < run.values.size(); ++i) {
    if (run.spurious[i]) continue;
    int best = -1;
    double bd = rel_tol;
    for (size_t j = 0; j < ref.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(run.values[i] - ref[j]) / ref[j];
      if (d <= bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      used[best] = 1;
      run.reference[i] = ref[best];
    }
  }
  return run;
}

ConvergenceRow convergence_row(const std::string& geometry, int degree, int elements, GaugeMode gauge, bool enriched) {
  const ControlMesh mesh = make_mesh(geometry, degree, elements);
  SourceProblem src;
  src.current = manufactured_current;
  const SaddleSystem sys = build_saddle(mesh, src, enriched, gauge);
  const FieldSolution sol = solve_magnetostatic(sys);
  ConvergenceRow row;
  row.geometry = geometry;
  row.degree = degree;
  row.elements = elements;
  for (const auto& b : sys.blocks) row.unknowns += static_cast<int>(b.K.rows());
  row.multipliers = sys.multiplier.size();
  row.error = relative_error(sol, manufactured_flux);
  row.residual = sol.residual;
  return row;
}

InfSupRow infsup_row(const std::string& geometry, int degree, int elements, bool enriched) {
  const ControlMesh mesh = make_mesh(geometry, degree, elements);
  const InfSupReport r = infsup_constant(mesh, enriched);
  InfSupRow row;
  row.geometry = geometry;
  int dependent = 0;
  for (int p = 0; p < mesh.patches(); ++p) dependent += mesh.domain.subdomain[p] == 0;
  row.patches = dependent;
  row.degree = degree;
  row.elements = elements;
  row.enriched = enriched;
  row.multipliers = r.multipliers;
  row.beta = r.beta;
  return row;
}

double fitted_slope(const std::vector<int>& elements, const std::vector<double>& errors) {
  const int n = static_cast<int>(elements.size());
  if (n < 2 || static_cast<int>(errors.size()) != n) throw std::invalid_argument("slope needs two or more levels");
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = std::log(static_cast<double>(elements[i]));
    X(i, 1) = 1.0;
    y(i) = -std::log(errors[i]);
  }
  return X.colPivHouseholderQr().solve(y)(0);
}

double complex_defect(const ControlMesh& mesh) {
  const SparseMatrix CG = curl_incidence(mesh) * gradient_incidence(mesh);
  const SparseMatrix DC = div_incidence(mesh) * curl_incidence(mesh);
  double d = 0.0;
  for (const SparseMatrix* A : {&CG, &DC})
    for (int c = 0; c < A->outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(*A, c); it; ++it) d = std::max(d, std::abs(it.value()));
  return d;
}

double derivative_defect(const KnotVector& kv, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.02, 0.98);
  const ReducedKnotVector r(kv);
  const double eps = 1e-6;
  auto value = [&kv](int i, double x) {
    const auto b = eval_basis(kv, x);
    const int q = i - b.first;
    return (q >= 0 && q < b.values.size()) ? b.values(q) : 0.0;
  };
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    const double x = U(rng);
    const auto d = eval_curry_schoenberg(r, x);
    auto D = [&](int j) {
      const int q = j - d.first;
      return (q >= 0 && q < d.values.size()) ? d.values(q) : 0.0;
    };
    for (int i = 0; i < kv.size(); ++i) {
      const double fd = (value(i, x + eps) - value(i, x - eps)) / (2 * eps);
      worst = std::max(worst, std::abs(D(i - 1) - D(i) - fd) * kv.mesh_size());
    }
  }
  return worst;
}

double unity_defect(const KnotVector& kv, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) worst = std::max(worst, std::abs(eval_basis(kv, U(rng)).values.sum() - 1.0));
  return std::max({worst, std::abs(eval_basis(kv, 0.0).values.sum() - 1.0), std::abs(eval_basis(kv, 1.0).values.sum() - 1.0)});
}

double trace_gradient_defect(const ControlMesh& m, const Eigen::VectorXd& c) {
  const Eigen::VectorXd e = gradient_incidence(m) * c;
  double err = 0.0;
  for (int p = 0; p < m.patches(); ++p)
    for (int s = 0; s < 6; ++s) {
      const FaceRef f{p, static_cast<Side>(s)};
      const auto tg = side_tangents(f.side);
      const auto& kn = m.disc.knots[p];
      Eigen::VectorXd cl(m.layout[p][0].size()), el(m.layout[p][1].size());
      for (int l = 0; l < cl.size(); ++l) cl(l) = c(m.gid[p][0][l]);
      for (int l = 0; l < el.size(); ++l) el(l) = e(m.gid[p][1][l]) * m.sign[p][1][l];
      const auto n = m.disc.counts(p);
      const int d = side_direction(f.side), at = side_upper(f.side) ? n[d] - 1 : 0;
      const auto ra = composite_gauss(kn[tg[0]].breakpoints(), kn[tg[0]].degree() + 2);
      const auto rb = composite_gauss(kn[tg[1]].breakpoints(), kn[tg[1]].degree() + 2);
      for (size_t qa = 0; qa < ra.points.size(); ++qa)
        for (size_t qb = 0; qb < rb.points.size(); ++qb) {
          const double sa = ra.points[qa], sb = rb.points[qb];
          // surface gradient of the scalar face spline
          const auto Ba = eval_basis_derivs(kn[tg[0]], sa, 1), Bb = eval_basis_derivs(kn[tg[1]], sb, 1);
          Eigen::Vector2d g = Eigen::Vector2d::Zero();
          for (int j = 0; j <= kn[tg[1]].degree(); ++j)
            for (int i = 0; i <= kn[tg[0]].degree(); ++i) {
              std::array<int, 3> idx{};
              idx[tg[0]] = Ba.first + i;
              idx[tg[1]] = Bb.first + j;
              idx[d] = at;
              const double cv = cl(m.layout[p][0].index(0, idx[0], idx[1], idx[2]));
              g(0) += cv * Ba.ders(1, i) * Bb.ders(0, j);
              g(1) += cv * Ba.ders(0, i) * Bb.ders(1, j);
            }
          err += ra.weights[qa] * rb.weights[qb] * (tangential_trace(m, f, el, sa, sb) - g).squaredNorm();
        }
    }
  return std::sqrt(err);
}

}  // namespace igatc
