#pragma once

#include "igatc/solve.hpp"

#include <string>

namespace igatc {

/// Mesh of a builtin name or geometry file with `elements` per patch direction.
ControlMesh make_mesh(const std::string& geometry, int degree, int elements, int regularity = -1);

/// Manufactured problem on the x-periodic 2pi x pi x 2pi box (unit reluctivity, no magnetisation).
Eigen::Vector3d manufactured_potential(const Eigen::Vector3d& x);
Eigen::Vector3d manufactured_flux(const Eigen::Vector3d& x);
Eigen::Vector3d manufactured_current(const Eigen::Vector3d& x);

/// Vertices that are neither Dirichlet nor constrained by a multiplier-only interface.
int constrained_scalar_dimension(const ControlMesh& mesh);

/// Kernel dimensions of the mortar-constrained curl-curl operator with both multiplier spaces.
struct KernelRow {
  std::string geometry;
  int patches = 0;
  int degree = 0;
  int elements = 0;
  int dim_x0 = 0;
  int dim_k_standard = 0;
  int dim_k_enriched = 0;
  int internal_vertices = 0;
};
/// Table runs use C^1 splines (`regularity` 1).
KernelRow kernel_row(const std::string& geometry, int degree, int elements, int regularity = 1);

/// Smallest eigenvalues with analytic matches against the cavity spectrum of the cube with side `side`.
struct EigenRun {
  SpectrumReport report;
  std::vector<double> values;
  std::vector<double> reference;  // matched analytic value, or NaN
  std::vector<char> spurious;
  int spurious_count = 0;
};
EigenRun eigen_run(const ControlMesh& mesh, const EigenOptions& opt, double side, double rel_tol = 0.05);

struct ConvergenceRow {
  std::string geometry;
  int degree = 0;
  int elements = 0;
  int unknowns = 0;
  int multipliers = 0;
  double error = 0.0;
  double residual = 0.0;
};
ConvergenceRow convergence_row(const std::string& geometry, int degree, int elements,
                               GaugeMode gauge = GaugeMode::tree, bool enriched = true);

struct InfSupRow {
  std::string geometry;
  int patches = 0;
  int degree = 0;
  int elements = 0;
  bool enriched = false;
  int multipliers = 0;
  double beta = 0.0;
};
InfSupRow infsup_row(const std::string& geometry, int degree, int elements, bool enriched);

/// Largest entry of the discrete curl of gradients and divergence of curls.
double complex_defect(const ControlMesh& mesh);

/// Derivative identity B' = D_{i-1} - D_i against centered differences of the B-splines of `kv`, at `samples`
/// random points: largest deviation times the mesh size.
double derivative_defect(const KnotVector& kv, int samples, unsigned seed);

/// Largest |sum B_i(x) - 1| at `samples` random points.
double unity_defect(const KnotVector& kv, int samples, unsigned seed);

/// L2 norm over all patch faces of the tangential trace of grad(u) minus the surface gradient of the trace of u,
/// for vertex coefficients `u`.
double trace_gradient_defect(const ControlMesh& mesh, const Eigen::VectorXd& u);

/// Least-squares slope of -log(error) against log(elements).
double fitted_slope(const std::vector<int>& elements, const std::vector<double>& errors);

}  // namespace igatc
