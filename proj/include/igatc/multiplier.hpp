#pragma once

#include "igatc/assembly.hpp"

namespace igatc {

/// Div-conforming multiplier functions on one dependent interface face. Component 0 pairs with the
/// tangential trace along the first face tangent: degree p-1 along it and p-2 across; component 1 is swapped.
struct MultiplierBlock {
  FaceRef face;
  std::array<int, 2> tangent{};
  /// knots[c][t]: knot vector of component c along face tangent t
  std::array<std::array<KnotVector, 2>, 2> knots;
  /// functions with nonempty support, per component and tangent
  std::array<std::array<std::vector<int>, 2>, 2> active;
  std::array<std::array<std::vector<int>, 2>, 2> position;  // spline index -> active position or -1
  int offset = 0;
  int size = 0;
  int comp_size(int c) const { return static_cast<int>(active[c][0].size() * active[c][1].size()); }
};

/// M_h (standard) or M_h plus surface gradients of the interface-internal vertex functions.
struct MultiplierSpace {
  std::vector<MultiplierBlock> blocks;
  std::vector<int> enrichment_vertices;  // global vertex ids
  bool enriched = false;
  int standard_size = 0;
  int size() const { return standard_size + static_cast<int>(enrichment_vertices.size()); }
};

/// Dependent interface vertices that are not on a Dirichlet face and are shared by at least three
/// dependent interface faces.
std::vector<int> interface_internal_vertices(const ControlMesh& mesh);

MultiplierSpace build_multiplier(const ControlMesh& mesh, bool enriched);

/// Reference multiplier density at face parameters (s,t) of block b: column r is function offset + r
/// in the contravariant face components (the physical multiplier is (m_0 T_0 + m_1 T_1) / |T_0 x T_1|).
Eigen::Matrix2Xd eval_multiplier_block(const MultiplierBlock& b, double s, double t);

/// Coupling matrices over all edges (columns indexed by global edge): rows are multipliers.
/// dependent = -int u.mu on dependent faces, independent = +int u.mu with the independent trace.
struct Coupling {
  SparseMatrix dependent;
  SparseMatrix independent;
  SparseMatrix combined() const { return dependent + independent; }
};

Coupling assemble_coupling(const ControlMesh& mesh, const MultiplierSpace& space, int nq = 0);

/// L2 Gram matrix of the multiplier functions on the interface.
SparseMatrix multiplier_gram(const ControlMesh& mesh, const MultiplierSpace& space, int nq = 0);

/// Quadrature pieces of a face direction: (s on dependent side, weight, s on independent side).
struct InterfacePoint {
  double s = 0.0, w = 0.0, s2 = 0.0;
};
/// Merged-grid rule along tangent t of an interface record, split at the wrap seam.
std::vector<InterfacePoint> interface_rule(const ControlMesh& mesh, const InterfaceRecord& rec, int t, int nq);
/// Cells of the merged grid along tangent t (dependent parametrization).
std::vector<std::array<double, 2>> interface_cells(const ControlMesh& mesh, const InterfaceRecord& rec, int t);

}  // namespace igatc
