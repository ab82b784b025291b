#include "igatc/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace igatc {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_vtk_fields(std::ostream& os, const ControlMesh& mesh, const std::vector<FaceField>& fields, int n) {
  if (n < 1) throw std::invalid_argument("vtk sampling needs at least one cell per direction");
  const int per = (n + 1) * (n + 1) * (n + 1);
  const int np = mesh.patches();
  auto sample = [n](int i) { return static_cast<double>(i) / n; };
  os << "# vtk DataFile Version 3.0\nigatc fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << np * per << " double\n";
  for (int p = 0; p < np; ++p)
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
          const Eigen::Vector3d x = eval_map(mesh.domain.patches[p], {sample(i), sample(j), sample(k)}).x;
          os << x(0) << " " << x(1) << " " << x(2) << "\n";
        }
  const int cells = np * n * n * n;
  os << "CELLS " << cells << " " << 9 * cells << "\n";
  auto id = [n, per](int p, int i, int j, int k) { return p * per + i + (n + 1) * (j + (n + 1) * k); };
  for (int p = 0; p < np; ++p)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          os << "8 " << id(p, i, j, k) << " " << id(p, i + 1, j, k) << " " << id(p, i + 1, j + 1, k) << " "
             << id(p, i, j + 1, k) << " " << id(p, i, j, k + 1) << " " << id(p, i + 1, j, k + 1) << " "
             << id(p, i + 1, j + 1, k + 1) << " " << id(p, i, j + 1, k + 1) << "\n";
  os << "CELL_TYPES " << cells << "\n";
  for (int c = 0; c < cells; ++c) os << "12\n";
  os << "POINT_DATA " << np * per << "\nSCALARS patch int 1\nLOOKUP_TABLE default\n";
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < per; ++q) os << p << "\n";
  for (const auto& f : fields) {
    os << "VECTORS " << f.name << " double\n";
    for (int p = 0; p < np; ++p)
      for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
          for (int i = 0; i <= n; ++i) {
            const Eigen::Vector3d b = evaluate_form(mesh, 2, f.coefficients, p, {sample(i), sample(j), sample(k)});
            os << b(0) << " " << b(1) << " " << b(2) << "\n";
          }
  }
}

void write_vtk_fields(const std::string& path, const ControlMesh& mesh, const std::vector<FaceField>& fields, int n) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(12);
  write_vtk_fields(os, mesh, fields, n);
}

}  // namespace igatc
