#pragma once

#include "igatc/splines.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace igatc {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Patch side: direction = side / 2, upper end if side % 2 == 1.
enum class Side { xmin = 0, xmax, ymin, ymax, zmin, zmax };

inline int side_direction(Side s) { return static_cast<int>(s) / 2; }
inline bool side_upper(Side s) { return static_cast<int>(s) % 2 == 1; }
inline Side make_side(int dir, bool upper) { return static_cast<Side>(2 * dir + (upper ? 1 : 0)); }
std::string side_name(Side s);
Side parse_side(const std::string& s);

/// The two tangential directions of a side, increasing.
std::array<int, 2> side_tangents(Side s);

/// Trivariate B-spline / NURBS patch. Control points are homogeneous (w*x, w*y, w*z, w),
/// ordered with the first index running fastest.
class Patch {
 public:
  Patch() = default;
  Patch(std::array<KnotVector, 3> knots, Eigen::MatrixX4d points);

  /// Polynomial patch from Cartesian control points (weights 1).
  static Patch polynomial(std::array<KnotVector, 3> knots, const Eigen::MatrixX3d& points);
  /// Trilinear patch through eight corners, corner(i + 2j + 4k) at (i,j,k).
  static Patch trilinear(const std::array<Eigen::Vector3d, 8>& corners);

  const std::array<KnotVector, 3>& knots() const { return knots_; }
  const KnotVector& knots(int d) const { return knots_[d]; }
  const Eigen::MatrixX4d& points() const { return points_; }
  Eigen::MatrixX4d& points() { return points_; }
  std::array<int, 3> counts() const { return {knots_[0].size(), knots_[1].size(), knots_[2].size()}; }
  int index(int i, int j, int k) const { return i + knots_[0].size() * (j + knots_[1].size() * k); }

 private:
  std::array<KnotVector, 3> knots_;
  Eigen::MatrixX4d points_;
};

/// Value and first derivatives of the geometry map.
struct MapEval {
  Eigen::Vector3d x;
  Eigen::Matrix3d jacobian;
  double det = 0.0;
};

MapEval eval_map(const Patch& patch, const Eigen::Vector3d& xi);

enum class FaceKind { dirichlet, neumann, interface, periodic };

struct FaceRef {
  int patch = -1;
  Side side = Side::xmin;
  bool operator==(const FaceRef&) const = default;
};

struct FaceTag {
  FaceRef face;
  FaceKind kind = FaceKind::dirichlet;
  int id = 0;
};

/// Dependent-face parameter s maps to independent parameter flip ? 1 - (s + offset) : s + offset,
/// optionally modulo a wrap period (0 means no wrap), per tangential direction.
struct InterfaceMap {
  std::array<double, 2> offset{0.0, 0.0};
  std::array<bool, 2> flip{false, false};
  std::array<double, 2> wrap{0.0, 0.0};
};

/// One dependent/independent face pair. independent.patch < 0 means the dependent face
/// is constrained by the multiplier alone.
struct InterfaceRecord {
  int id = 0;
  FaceRef dependent;
  FaceRef independent;
  InterfaceMap map;
};

struct GlueRecord {
  FaceRef a, b;
};

/// Faces b are the translates of faces a by the given vector.
struct PeriodicRecord {
  int id = 0;
  FaceRef a, b;
};

struct MultiPatchDomain {
  std::vector<Patch> patches;
  /// 0 = dependent (or only) subdomain, 1 = independent.
  std::vector<int> subdomain;
  std::vector<FaceTag> faces;
  std::vector<InterfaceRecord> interfaces;
  std::vector<GlueRecord> glue;
  std::vector<PeriodicRecord> periodic;

  int num_patches() const { return static_cast<int>(patches.size()); }
  int num_subdomains() const;
  const FaceTag* tag(const FaceRef& f) const;
  /// Translation t with F_b = F_a + t for periodic record `id`.
  Eigen::Vector3d periodic_translation(int id) const;
  /// Characteristic length for geometric tolerances.
  double extent() const;
};

/// Point on a face at face parameters (s, t) in the tangential directions of side_tangents.
Eigen::Vector3d face_point(const Patch& patch, Side side, double s, double t);

/// Sampled check that detDF keeps one sign; returns the minimum of detDF / max |detDF|.
double min_relative_jacobian(const Patch& patch, int samples_per_span = 5);

struct ValidationReport {
  bool ok = true;
  double max_glue_deviation = 0.0;
  double max_interface_deviation = 0.0;
  std::vector<std::string> messages;
};

ValidationReport validate_interfaces(const MultiPatchDomain& domain);

/// Throws GeometryError when validate_interfaces fails or a patch is not orientation preserving.
void check_domain(const MultiPatchDomain& domain);

/// Builtin domains: cube, cube-2, cube-4, cube-5, cube-mortar-conforming:N, cube-mortar-shifted:delta,
/// source-box-shifted:delta, periodic-cube, periodic-cube-neumann, quarter-ring, ring.
MultiPatchDomain builtin_geometry(const std::string& name);
std::vector<std::string> builtin_names();

MultiPatchDomain load_geometry(const std::string& path);
MultiPatchDomain parse_geometry_json(const std::string& text);
std::string geometry_to_json(const MultiPatchDomain& domain);

/// Builtin name or JSON file path.
MultiPatchDomain resolve_geometry(const std::string& name_or_path);

}  // namespace igatc
