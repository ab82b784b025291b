#pragma once

#include "igatc/geometry.hpp"

#include <Eigen/Sparse>

#include <cstdint>

namespace igatc {

/// Degree-p knot vectors of the discrete spaces, per patch and direction.
struct Discretization {
  int degree = 2;
  std::vector<std::array<KnotVector, 3>> knots;

  std::array<int, 3> counts(int patch) const {
    return {knots[patch][0].size(), knots[patch][1].size(), knots[patch][2].size()};
  }
  double mesh_size() const;
};

/// `elements` uniform spans per patch direction with the given regularity (-1: maximal).
Discretization make_discretization(const MultiPatchDomain& domain, int degree, int elements, int regularity = -1);

/// Patch-local numbering of the entities of dimension k: components, each a tensor grid.
struct FormLayout {
  int ncomp = 1;
  std::array<std::array<int, 3>, 3> dims{};
  std::array<int, 4> offset{};
  int size() const { return offset[ncomp]; }
  int index(int c, int i, int j, int k) const { return offset[c] + i + dims[c][0] * (j + dims[c][1] * k); }
  std::array<int, 4> decode(int flat) const;  // component, i, j, k
};

/// k = 0: vertices, 1: edges (component = direction), 2: faces (component = normal direction), 3: cells.
FormLayout form_layout(const std::array<int, 3>& n, int k);

struct EntityRef {
  int patch = -1;
  int comp = 0;
  std::array<int, 3> idx{};
};

enum EntityFlag : std::uint8_t {
  on_dirichlet = 1,
  on_neumann = 2,
  on_interface_dependent = 4,
  on_interface_independent = 8,
  on_interface_boundary = 16,  // dependent-only interface face (constrained by the multiplier alone)
};

/// Control mesh of the discrete spaces with coincident entities of glued and periodic faces identified.
/// Entities are never identified across subdomains.
struct ControlMesh {
  MultiPatchDomain domain;
  Discretization disc;
  std::array<int, 4> count{};
  std::vector<std::array<FormLayout, 4>> layout;
  /// gid[patch][k][local] and sign[patch][k][local]
  std::vector<std::array<std::vector<int>, 4>> gid;
  std::vector<std::array<std::vector<std::int8_t>, 4>> sign;
  std::array<std::vector<EntityRef>, 4> owner;
  std::array<std::vector<int>, 4> subdomain;
  std::array<std::vector<std::uint8_t>, 4> flags;
  std::vector<Eigen::Vector3d> vertex_position;
  std::vector<std::array<int, 2>> edge_vertices;  // tail, head
  /// Reduced (degree p-1) knot vectors per patch and direction.
  std::vector<std::vector<ReducedKnotVector>> reduced;

  int patches() const { return static_cast<int>(gid.size()); }
};

ControlMesh extract_control_mesh(const MultiPatchDomain& domain, const Discretization& disc);

/// Control points of the geometry expressed in the degree-p basis of `knots` (Greville interpolation of
/// the homogeneous coordinates; exact when the geometry space is contained in the discrete one).
Eigen::MatrixX3d discrete_control_points(const Patch& patch, const std::array<KnotVector, 3>& knots);

/// Does the patch-local entity lie on the given side?
bool entity_on_side(const std::array<int, 3>& n, int k, int comp, const std::array<int, 3>& idx, Side side);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Signed incidence matrices of the identified control mesh (all entities, no constraints).
SparseMatrix gradient_incidence(const ControlMesh& mesh);
SparseMatrix curl_incidence(const ControlMesh& mesh);
SparseMatrix div_incidence(const ControlMesh& mesh);

/// Same matrices assembled from every patch copy of each entity; used to check gluing consistency.
SparseMatrix incidence_from_all_patches(const ControlMesh& mesh, int k);

}  // namespace igatc
