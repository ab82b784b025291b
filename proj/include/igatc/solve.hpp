#pragma once

#include "igatc/gauge.hpp"
#include "igatc/linalg.hpp"
#include "igatc/multiplier.hpp"

namespace igatc {

/// Dimension of {u : G u = 0, (curl u, curl v) = 0 for all such v}, by counting zero eigenvalues of Z^T K Z.
struct KernelReport {
  int dimension = 0;
  int size = 0;             // columns of Z
  int constraint_rank = 0;  // rank of G
  ZeroCluster cluster;
};
/// K and G indexed by the same dofs.
KernelReport kernel_dimension(const SparseMatrix& K, const SparseMatrix& G, double rel = 1e-8);

/// One subdomain block of the gauged mortar system.
struct SubdomainBlock {
  int subdomain = 0;
  DofMap dofs;            // free edges of the subdomain
  GaugePartition gauge;
  SparseMatrix K;         // cotree x cotree
  Eigen::VectorXd rhs;    // cotree
  SparseMatrix G;         // multipliers x cotree
  SparseMatrix expander;  // free dofs x cotree
};

struct SaddleSystem {
  const ControlMesh* mesh = nullptr;
  std::vector<SubdomainBlock> blocks;
  MultiplierSpace multiplier;
};

/// `tree_reversed` grows the trees with the neighbor order reversed.
enum class GaugeMode { tree, tree_reversed, none };

struct SourceProblem {
  ScalarField reluctivity;
  VectorField current;
  VectorField magnetisation;
  /// Removes the load's mass-projection onto constrained gradients. A weakly coupled gradient jumps across a
  /// nonconforming interface and pairs with the normal current there, which makes the field depend on the tree.
  bool compatible_load = true;
};

/// Assembles the gauged (or ungauged) block system of a one- or two-subdomain domain.
SaddleSystem build_saddle(const ControlMesh& mesh, const SourceProblem& src, bool enriched, GaugeMode gauge);

struct FieldSolution {
  const ControlMesh* mesh = nullptr;
  Eigen::VectorXd edges;        // global edge coefficients (tree and Dirichlet entries zero)
  Eigen::VectorXd multipliers;
  double residual = 0.0;        // max-norm residual relative to the right side
  /// Physical vector potential and flux density at a patch parameter.
  Eigen::Vector3d potential(int patch, const Eigen::Vector3d& xi) const;
  Eigen::Vector3d flux(int patch, const Eigen::Vector3d& xi) const;
  Eigen::VectorXd face_coefficients() const;
};

FieldSolution solve_magnetostatic(const SaddleSystem& sys);

/// relative L2 error of B = curl A against an exact field
double relative_error(const FieldSolution& sol, const VectorField& exact);

/// Smallest eigenvalues of the constrained curl-curl pencil.
struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // ascending
  ZeroCluster cluster;
  int size = 0;
  /// Global edge coefficients of the first modes of the definite part of the pencil (deflated zeros skipped).
  Eigen::MatrixXd modes;
  Eigen::VectorXd mode_values;
};

struct EigenOptions {
  bool enriched = true;
  GaugeMode gauge = GaugeMode::tree;
  int count = 20;
  int modes = 0;  // eigenvectors to return
};

/// Maxwell eigenvalues on a Dirichlet domain (one or two subdomains). With the tree gauge the mass is taken on
/// the quotient by the constrained gradients that the gauge does not remove, so that zero eigenvalues count
/// only kernel functions left in the gauged space.
SpectrumReport solve_eigen(const ControlMesh& mesh, const EigenOptions& opt);

/// Dense gauged stiffness restricted to the multiplier-constrained cotree space.
Eigen::MatrixXd constrained_gauged_stiffness(const ControlMesh& mesh, bool enriched, GaugeMode gauge = GaugeMode::tree);

/// Analytic cavity eigenvalues of the cube [0,L]^3 (sorted, with multiplicity), for a^2 + b^2 + c^2 <= max.
std::vector<double> cube_spectrum(double side, double max_value);

/// Greedy matching of computed values against reference values within a relative tolerance; returns the
/// indices of unmatched computed values.
std::vector<int> unmatched_modes(const std::vector<double>& computed, const std::vector<double>& reference, double rel);

/// Numerical inf-sup constant sqrt(lambda_min) of (G X^-1 G^T) q = lambda N q with X the H(curl) Gram matrix of
/// the dependent subdomain and N the multiplier L2 Gram matrix.
struct InfSupReport {
  double beta = 0.0;
  int multipliers = 0;
  int rank = 0;
};
InfSupReport infsup_constant(const ControlMesh& mesh, bool enriched);

}  // namespace igatc
