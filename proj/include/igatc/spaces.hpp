#pragma once

#include "igatc/control_mesh.hpp"

namespace igatc {

/// Numbering of a subset of the global entities of dimension k.
struct DofMap {
  int k = 1;
  std::vector<int> global;  // dof -> entity
  std::vector<int> index;   // entity -> dof or -1
  int size() const { return static_cast<int>(global.size()); }
  /// Entity-by-dof 0/1 matrix.
  SparseMatrix selection() const;
};

/// Entities of dimension k in `subdomain` (-1: all) that are not on a Dirichlet face.
DofMap free_dofs(const ControlMesh& mesh, int k, int subdomain = -1);
/// All entities of dimension k in `subdomain`.
DofMap all_dofs(const ControlMesh& mesh, int k, int subdomain = -1);

/// Spline de Rham space of form degree k on the identified control mesh.
struct DiscreteSpace {
  const ControlMesh* mesh = nullptr;
  int k = 1;
  DofMap dofs;
  int dim() const { return dofs.size(); }
};

DiscreteSpace build_space(const ControlMesh& mesh, int k, int subdomain = -1);

/// Incidence matrices restricted to the free dofs of two spaces.
SparseMatrix gradient_matrix(const DiscreteSpace& s0, const DiscreteSpace& s1);
SparseMatrix curl_matrix(const DiscreteSpace& s1, const DiscreteSpace& s2);
SparseMatrix div_matrix(const DiscreteSpace& s2, const DiscreteSpace& s3);

/// Reference-domain values of the nonzero local basis functions of form degree k at xi.
/// For k = 0, 3 only row 0 of `values` is used; `grads` is filled for k = 0.
struct FormBasisEval {
  std::vector<int> local;
  Eigen::Matrix3Xd values;
  Eigen::Matrix3Xd grads;
};

FormBasisEval eval_form_basis(const ControlMesh& mesh, int patch, int k, const Eigen::Vector3d& xi);

/// Physical value of the field with entity coefficients `coef` (indexed by global entity).
/// k = 0 returns (value, 0, 0); k = 3 likewise.
Eigen::Vector3d evaluate_form(const ControlMesh& mesh, int k, const Eigen::VectorXd& coef, int patch,
                              const Eigen::Vector3d& xi);
/// Physical gradient of a k = 0 field.
Eigen::Vector3d evaluate_gradient(const ControlMesh& mesh, const Eigen::VectorXd& coef, int patch,
                                  const Eigen::Vector3d& xi);

/// Push-forward of one reference value for form degree k.
Eigen::Vector3d push_forward(int k, const MapEval& m, const Eigen::Vector3d& v);

enum class TraceFlavor { curl, div };

/// Spline space on one patch face. Curl flavor: components (D_a B_b, B_a D_b) with the face DoFs of the
/// parent edge space; div flavor swaps the components.
struct TraceSpace {
  FaceRef face;
  TraceFlavor flavor = TraceFlavor::curl;
  std::array<int, 2> tangent{};
  std::array<std::array<int, 2>, 2> dims{};
  std::array<int, 3> offset{};
  /// curl flavor: trace dof -> parent patch-local k=1 index
  std::vector<int> parent_local;
  int size() const { return offset[2]; }
  int index(int c, int i, int j) const { return offset[c] + i + dims[c][0] * j; }
};

TraceSpace trace_space(const ControlMesh& mesh, const FaceRef& face, TraceFlavor flavor);

/// Reference values of all trace basis functions at face parameters (s,t); column r is function r
/// (components along the two tangents).
Eigen::Matrix2Xd eval_trace_basis(const ControlMesh& mesh, const TraceSpace& ts, double s, double t);

/// Face-reference tangential components of a patch k=1 field (coefficients by patch-local index).
Eigen::Vector2d tangential_trace(const ControlMesh& mesh, const FaceRef& face, const Eigen::VectorXd& local_coef,
                                 double s, double t);

/// Reference point of a face parameter pair.
Eigen::Vector3d face_xi(Side side, double s, double t);

}  // namespace igatc
