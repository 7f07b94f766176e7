#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"

namespace globtop::fem {

/// Meridian node on the spherical mid-surface.
struct Node {
  double phi;  // polar angle from the apex, rad
  double r;    // distance from the axis, m
  double z;    // height above the sphere centre, m
  double s;    // meridian arc length from the apex, a * phi, m
};

/// Straight conical frustum between nodes i and i + 1.
struct Element {
  double length;      // chord (generator length of the frustum), m
  double arc_length;  // meridian arc the element replaces, m
  double cone_angle;  // angle of the generator below the horizontal, rad
  double mid_radius;  // m
};

/// Nodal dofs are expressed in the local frame of the sphere at the node:
/// meridional displacement u, normal displacement w (positive toward the
/// centre of curvature) and meridional rotation beta = dw/ds.
inline constexpr std::size_t kDofsPerNode = 3;

struct ShellMesh {
  CapGeometry geometry;
  std::vector<Node> nodes;
  std::vector<Element> elements;

  std::size_t dof_count() const { return nodes.size() * kDofsPerNode; }
};

/// Uniform phi subdivision of [0, alpha]; n_elements >= 4.
ShellMesh mesh_cap(const CapGeometry& geom, std::size_t n_elements);

enum class RimCondition { clamped, pinned };

std::string_view to_string(RimCondition bc);
RimCondition parse_rim_condition(std::string_view text);

/// Local 6x6 stiffness of element e (dofs u, w, beta at both ends in the
/// nodal frames), row-major.
std::array<double, 36> element_stiffness(const ShellMesh& mesh, std::size_t e, double thickness_m,
                                         const Material& material);

/// Consistent nodal load of uniform pressure acting toward the centre.
std::array<double, 6> element_pressure_load(const ShellMesh& mesh, std::size_t e, double pressure_pa);

struct NodalDisplacement {
  double phi;       // rad
  double u;         // m
  double w;         // m, positive toward the centre of curvature
  double rotation;  // rad
};

struct FemSolution {
  std::vector<NodalDisplacement> field;
  double apex_deflection;     // |w| at the apex, m
  // Axial (z, away from the sphere centre) resultants in N. Pressure pushes
  // the cap toward the centre, so the applied load is negative and the rim
  // supports balance it: rim_axial_reaction + applied_axial_load = 0.
  double rim_axial_reaction;
  double applied_axial_load;
  std::size_t elements;
  std::size_t equations;
  double pivot_ratio;  // see SymmetricBandMatrix::pivot_ratio
};

/// Linear static solve of the pressurized cap. The apex carries the
/// symmetry constraints u = beta = 0; the rim is clamped (u = w = beta = 0)
/// or pinned (u = w = 0).
FemSolution solve_case(const ShellMesh& mesh, double thickness_m, const Material& material,
                       double pressure_pa, RimCondition bc = RimCondition::clamped);

/// CSV with columns phi_deg, u_um, w_um, rotation_rad.
std::string solution_csv(const FemSolution& solution);

struct ConvergenceLevel {
  std::size_t elements;
  double apex_deflection;  // m
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  double extrapolated = 0.0;       // Richardson limit from the finest three levels, m
  double previous_extrapolated = 0.0;  // same from the three levels before, m (0 if < 4 levels)
  double observed_order = 0.0;
  bool contracting = true;  // successive differences shrink
  bool monotone = true;     // successive differences keep their sign

  /// |extrapolated - previous_extrapolated| / |extrapolated|.
  double extrapolation_drift() const;
};

/// Solve at n, 2n, 4n, ... (refinement_levels >= 3, n >= 4).
ConvergenceReport converge(const CapGeometry& geom, double thickness_m, const Material& material,
                           double pressure_pa, RimCondition bc, std::size_t refinement_levels,
                           std::size_t base_elements = 32);

std::string convergence_json(const ConvergenceReport& report);

}  // namespace globtop::fem
