#pragma once

#include "igatc/spaces.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace igatc {

/// Float with 12 significant digits; NaN prints as "nan".
std::string csv_number(double v);

/// One named face field (global face coefficients) to sample.
struct FaceField {
  std::string name;
  Eigen::VectorXd coefficients;
};

/// Legacy VTK unstructured grid: each patch sampled on a uniform (n+1)^3 grid of hexahedra, with the physical
/// vector of every field and the patch index as point data.
void write_vtk_fields(std::ostream& os, const ControlMesh& mesh, const std::vector<FaceField>& fields, int n = 6);
void write_vtk_fields(const std::string& path, const ControlMesh& mesh, const std::vector<FaceField>& fields, int n = 6);

}  // namespace igatc
