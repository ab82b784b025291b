#pragma once

#include "igatc/spaces.hpp"

#include <functional>
#include <string>

namespace igatc {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ScalarField = std::function<double(const Eigen::Vector3d&)>;
using VectorField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

/// Gauss points per direction and knot span used by default (p + 1).
int default_quadrature(const ControlMesh& mesh);

/// Mass matrix of the k-form basis (k = 1: covariant, k = 2: contravariant) with a scalar coefficient,
/// indexed by global entities. An empty coefficient means 1. nq <= 0 selects the default rule.
SparseMatrix assemble_form_mass(const ControlMesh& mesh, int k, const ScalarField& coef = {}, int nq = 0);

/// Curl-curl stiffness on all edges: curl^T M_2(nu) curl.
SparseMatrix assemble_curlcurl(const ControlMesh& mesh, const ScalarField& nu = {}, int nq = 0);
/// Edge mass matrix with permittivity eps.
SparseMatrix assemble_mass(const ControlMesh& mesh, const ScalarField& eps = {}, int nq = 0);
/// f_a = int J . psi_a + M . curl psi_a over all edges.
Eigen::VectorXd assemble_load(const ControlMesh& mesh, const VectorField& current, const VectorField& magnetisation = {},
                              int nq = 0);

/// Rows/columns of an entity-indexed matrix selected by dof maps.
SparseMatrix restrict_matrix(const SparseMatrix& A, const DofMap& rows, const DofMap& cols);
/// Keeps all rows and the columns in `cols`.
SparseMatrix restrict_cols(const SparseMatrix& A, const DofMap& cols);
Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v, const DofMap& dofs);
/// Entity-indexed vector from dof values (zeros elsewhere).
Eigen::VectorXd expand_vector(const Eigen::VectorXd& v, const DofMap& dofs);

/// Squared L2 norms over the domain of (field_h - exact) and of exact, for a k = 2 field with
/// entity coefficients.
struct L2Error {
  double error2 = 0.0;
  double norm2 = 0.0;
  double relative() const;
};
L2Error l2_error_face_field(const ControlMesh& mesh, const Eigen::VectorXd& coef, const VectorField& exact, int nq = 0);

/// "row col value" lines, 1-based, with a size header.
void write_triplets(const std::string& path, const SparseMatrix& A);

}  // namespace igatc
