#include "globtop/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "globtop/banded.hpp"
#include "globtop/error.hpp"
#include "globtop/units.hpp"

namespace globtop::fem {

namespace {

constexpr std::size_t kElementDofs = 2 * kDofsPerNode;
constexpr std::size_t kHalfBandwidth = kElementDofs - 1;

// Five-point Gauss-Legendre rule mapped to [0, 1].
constexpr std::array<double, 5> kGaussPoints = {
    0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGaussWeights = {
    0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324,
    0.11846344252809454};

struct Hermite {
  std::array<double, 4> h;    // values
  std::array<double, 4> dh;   // d/dxi
  std::array<double, 4> ddh;  // d2/dxi2
};

Hermite hermite(double xi) {
  const double xi2 = xi * xi;
  const double xi3 = xi2 * xi;
  return {{1.0 - 3.0 * xi2 + 2.0 * xi3, xi - 2.0 * xi2 + xi3, 3.0 * xi2 - 2.0 * xi3, xi3 - xi2},
          {-6.0 * xi + 6.0 * xi2, 1.0 - 4.0 * xi + 3.0 * xi2, 6.0 * xi - 6.0 * xi2, 3.0 * xi2 - 2.0 * xi},
          {-6.0 + 12.0 * xi, -4.0 + 6.0 * xi, 6.0 - 12.0 * xi, 6.0 * xi - 2.0}};
}

// Rotation from the nodal sphere frame to the element frame, 6x6 block
// diagonal, row-major.
std::array<double, 36> frame_rotation(const ShellMesh& mesh, std::size_t e) {
  const double psi = mesh.elements[e].cone_angle;
  std::array<double, 36> t{};
  for (std::size_t end = 0; end < 2; ++end) {
    const double delta = mesh.nodes[e + end].phi - psi;
    const double c = std::cos(delta);
    const double s = std::sin(delta);
    const std::size_t o = end * kDofsPerNode;
    t[(o + 0) * 6 + o + 0] = c;
    t[(o + 0) * 6 + o + 1] = -s;
    t[(o + 1) * 6 + o + 0] = s;
    t[(o + 1) * 6 + o + 1] = c;
    t[(o + 2) * 6 + o + 2] = 1.0;
  }
  return t;
}

std::array<double, 36> rotate_stiffness(const std::array<double, 36>& k_local,
                                        const std::array<double, 36>& t) {
  std::array<double, 36> kt{};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t m = 0; m < 6; ++m) kt[i * 6 + j] += k_local[i * 6 + m] * t[m * 6 + j];
  std::array<double, 36> k{};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t m = 0; m < 6; ++m) k[i * 6 + j] += t[m * 6 + i] * kt[m * 6 + j];
  return k;
}

void check_inputs(const ShellMesh& mesh, double thickness_m, double pressure_pa) {
  if (mesh.elements.size() < 4 || mesh.nodes.size() != mesh.elements.size() + 1) {
    throw DomainError("shell mesh must have at least 4 elements");
  }
  if (!std::isfinite(thickness_m) || thickness_m <= 0.0) {
    throw DomainError(fmt::format("shell thickness must be positive (got {})", thickness_m));
  }
  if (!std::isfinite(pressure_pa) || pressure_pa < 0.0) {
    throw DomainError(fmt::format("pressure must be non-negative (got {})", pressure_pa));
  }
}

}  // namespace

ShellMesh mesh_cap(const CapGeometry& geom, std::size_t n_elements) {
  if (n_elements < 4) {
    throw DomainError(fmt::format("shell mesh needs at least 4 elements (got {})", n_elements));
  }
  const double a = geom.radius();
  const double alpha = geom.base_angle();
  if (!(a > 0.0) || !(alpha > 0.0) || !std::isfinite(a) || !std::isfinite(alpha)) {
    throw DomainError("degenerate cap geometry");
  }
  ShellMesh mesh{geom, {}, {}};
  mesh.nodes.reserve(n_elements + 1);
  for (std::size_t i = 0; i <= n_elements; ++i) {
    const double phi = i == n_elements ? alpha : alpha * static_cast<double>(i) / n_elements;
    mesh.nodes.push_back({phi, a * std::sin(phi), a * std::cos(phi), a * phi});
  }
  mesh.elements.reserve(n_elements);
  for (std::size_t e = 0; e < n_elements; ++e) {
    const Node& p = mesh.nodes[e];
    const Node& q = mesh.nodes[e + 1];
    const double half = 0.5 * (q.phi - p.phi);
    mesh.elements.push_back({2.0 * a * std::sin(half), q.s - p.s, 0.5 * (p.phi + q.phi), 0.5 * (p.r + q.r)});
  }
  return mesh;
}

std::string_view to_string(RimCondition bc) {
  return bc == RimCondition::clamped ? "clamped" : "pinned";
}

RimCondition parse_rim_condition(std::string_view text) {
  if (text == "clamped") return RimCondition::clamped;
  if (text == "pinned") return RimCondition::pinned;
  throw ValidationError(fmt::format("unknown rim condition '{}' (expected clamped or pinned)", text));
}

std::array<double, 36> element_stiffness(const ShellMesh& mesh, std::size_t e, double thickness_m,
                                         const Material& material) {
  const Element& el = mesh.elements.at(e);
  const double length = el.length;
  const double c = std::cos(el.cone_angle);
  const double s = std::sin(el.cone_angle);
  const double r0 = mesh.nodes[e].r;

  const double nu = material.poisson_ratio;
  const double young = material.youngs_modulus();
  const double membrane = young * thickness_m / (1.0 - nu * nu);
  const double bending = membrane * thickness_m * thickness_m / 12.0;

  std::array<double, 36> k{};
  for (std::size_t g = 0; g < kGaussPoints.size(); ++g) {
    const double xi = kGaussPoints[g];
    const double r = r0 + xi * length * c;
    const Hermite hw = hermite(xi);

    // Strain rows: eps_s, eps_theta, kappa_s, kappa_theta.
    std::array<std::array<double, 6>, 4> b{};
    b[0] = {-1.0 / length, 0.0, 0.0, 1.0 / length, 0.0, 0.0};
    b[1] = {(1.0 - xi) * c / r, -hw.h[0] * s / r, -hw.h[1] * length * s / r,
            xi * c / r,         -hw.h[2] * s / r, -hw.h[3] * length * s / r};
    b[2] = {0.0, -hw.ddh[0] / (length * length), -hw.ddh[1] / length,
            0.0, -hw.ddh[2] / (length * length), -hw.ddh[3] / length};
    b[3] = {0.0, -c * hw.dh[0] / (length * r), -c * hw.dh[1] / r,
            0.0, -c * hw.dh[2] / (length * r), -c * hw.dh[3] / r};

    const double weight = 2.0 * std::numbers::pi * kGaussWeights[g] * length * r;
    for (std::size_t i = 0; i < 6; ++i) {
      // C * b(:, i), with C = diag(membrane, bending) * [[1, nu], [nu, 1]] blocks.
      const double m0 = membrane * (b[0][i] + nu * b[1][i]);
      const double m1 = membrane * (nu * b[0][i] + b[1][i]);
      const double k0 = bending * (b[2][i] + nu * b[3][i]);
      const double k1 = bending * (nu * b[2][i] + b[3][i]);
      for (std::size_t j = 0; j < 6; ++j) {
        k[j * 6 + i] += weight * (b[0][j] * m0 + b[1][j] * m1 + b[2][j] * k0 + b[3][j] * k1);
      }
    }
  }
  return rotate_stiffness(k, frame_rotation(mesh, e));
}

std::array<double, 6> element_pressure_load(const ShellMesh& mesh, std::size_t e, double pressure_pa) {
  const Element& el = mesh.elements.at(e);
  const double c = std::cos(el.cone_angle);
  const double r0 = mesh.nodes[e].r;
  std::array<double, 6> f_local{};
  for (std::size_t g = 0; g < kGaussPoints.size(); ++g) {
    const double xi = kGaussPoints[g];
    const double r = r0 + xi * el.length * c;
    const Hermite hw = hermite(xi);
    const double weight = 2.0 * std::numbers::pi * kGaussWeights[g] * el.length * r * pressure_pa;
    f_local[1] += weight * hw.h[0];
    f_local[2] += weight * hw.h[1] * el.length;
    f_local[4] += weight * hw.h[2];
    f_local[5] += weight * hw.h[3] * el.length;
  }
  const auto t = frame_rotation(mesh, e);
  std::array<double, 6> f{};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t m = 0; m < 6; ++m) f[i] += t[m * 6 + i] * f_local[m];
  return f;
}

FemSolution solve_case(const ShellMesh& mesh, double thickness_m, const Material& material,
                       double pressure_pa, RimCondition bc) {
  check_inputs(mesh, thickness_m, pressure_pa);
  const std::size_t n_dofs = mesh.dof_count();
  const std::size_t rim = mesh.nodes.size() - 1;

  SymmetricBandMatrix stiffness(n_dofs, kHalfBandwidth);
  std::vector<double> load(n_dofs, 0.0);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto k = element_stiffness(mesh, e, thickness_m, material);
    const auto f = element_pressure_load(mesh, e, pressure_pa);
    const std::size_t base = e * kDofsPerNode;
    for (std::size_t i = 0; i < kElementDofs; ++i) {
      if (!std::isfinite(f[i])) {
        throw NumericalError(fmt::format("non-finite load in element {}", e));
      }
      load[base + i] += f[i];
      for (std::size_t j = 0; j <= i; ++j) {
        if (!std::isfinite(k[i * 6 + j])) {
          throw NumericalError(fmt::format("non-finite stiffness in element {}", e));
        }
        stiffness.add(base + i, base + j, k[i * 6 + j]);
      }
    }
  }

  std::vector<bool> fixed(n_dofs, false);
  fixed[0] = true;  // apex meridional displacement
  fixed[2] = true;  // apex rotation
  fixed[rim * kDofsPerNode + 0] = true;
  fixed[rim * kDofsPerNode + 1] = true;
  if (bc == RimCondition::clamped) {
    fixed[rim * kDofsPerNode + 2] = true;
  }

  std::vector<std::size_t> equation(n_dofs, n_dofs);
  std::size_t n_eq = 0;
  for (std::size_t d = 0; d < n_dofs; ++d) {
    if (!fixed[d]) equation[d] = n_eq++;
  }
  SymmetricBandMatrix reduced(n_eq, kHalfBandwidth);
  std::vector<double> rhs(n_eq, 0.0);
  for (std::size_t i = 0; i < n_dofs; ++i) {
    if (fixed[i]) continue;
    rhs[equation[i]] = load[i];
    const std::size_t j0 = i > kHalfBandwidth ? i - kHalfBandwidth : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      if (!fixed[j]) reduced.add(equation[i], equation[j], stiffness(i, j));
    }
  }
  try {
    reduced.factorize();
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format("shell stiffness solve failed ({} equations): {}", n_eq, e.what()));
  }
  const std::vector<double> x = reduced.solve(rhs);

  std::vector<double> d(n_dofs, 0.0);
  for (std::size_t i = 0; i < n_dofs; ++i) {
    if (!fixed[i]) d[i] = x[equation[i]];
  }

  FemSolution sol;
  sol.field.reserve(mesh.nodes.size());
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    sol.field.push_back({mesh.nodes[k].phi, d[k * kDofsPerNode], d[k * kDofsPerNode + 1],
                         d[k * kDofsPerNode + 2]});
  }
  sol.apex_deflection = std::abs(sol.field.front().w);

  // Axial (z) resultants; the nodal frame has t = (cos phi, -sin phi) and
  // inward normal n = (-sin phi, -cos phi) in (r, z).
  const std::vector<double> internal = stiffness.multiply(d);
  sol.rim_axial_reaction = 0.0;
  sol.applied_axial_load = 0.0;
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    const double phi = mesh.nodes[k].phi;
    const std::size_t o = k * kDofsPerNode;
    sol.applied_axial_load += -std::sin(phi) * load[o] - std::cos(phi) * load[o + 1];
    if (k == rim) {
      sol.rim_axial_reaction += -std::sin(phi) * (internal[o] - load[o]) -
                                std::cos(phi) * (internal[o + 1] - load[o + 1]);
    }
  }
  sol.elements = mesh.elements.size();
  sol.equations = n_eq;
  sol.pivot_ratio = reduced.pivot_ratio();
  return sol;
}

std::string solution_csv(const FemSolution& solution) {
  std::string out = "phi_deg,u_um,w_um,rotation_rad\n";
  for (const auto& n : solution.field) {
    out += fmt::format("{:.6f},{:.6f},{:.6f},{:.9e}\n", units::rad_to_deg(n.phi), units::m_to_um(n.u),
                       units::m_to_um(n.w), n.rotation);
  }
  return out;
}

double ConvergenceReport::extrapolation_drift() const {
  if (extrapolated == 0.0) return 0.0;
  return std::abs(extrapolated - previous_extrapolated) / std::abs(extrapolated);
}

namespace {

struct Richardson {
  double limit;
  double order;
};

Richardson richardson(double coarse, double mid, double fine) {
  const double e1 = mid - coarse;
  const double e2 = fine - mid;
  if (e2 == 0.0 || e1 == 0.0) {
    return {fine, 0.0};
  }
  const double order = std::log2(std::abs(e1 / e2));
  const double ratio = std::pow(2.0, order);
  if (!(ratio > 1.0)) {
    return {fine, order};
  }
  return {fine + e2 / (ratio - 1.0), order};
}

}  // namespace

ConvergenceReport converge(const CapGeometry& geom, double thickness_m, const Material& material,
                           double pressure_pa, RimCondition bc, std::size_t refinement_levels,
                           std::size_t base_elements) {
  if (refinement_levels < 3) {
    throw DomainError(fmt::format("convergence study needs at least 3 levels (got {})", refinement_levels));
  }
  ConvergenceReport report;
  std::size_t n = base_elements;
  for (std::size_t level = 0; level < refinement_levels; ++level, n *= 2) {
    const ShellMesh mesh = mesh_cap(geom, n);
    report.levels.push_back({n, solve_case(mesh, thickness_m, material, pressure_pa, bc).apex_deflection});
  }
  const auto& lv = report.levels;
  for (std::size_t i = 2; i < lv.size(); ++i) {
    const double e1 = lv[i - 1].apex_deflection - lv[i - 2].apex_deflection;
    const double e2 = lv[i].apex_deflection - lv[i - 1].apex_deflection;
    if (std::abs(e2) > std::abs(e1)) report.contracting = false;
    if (e1 * e2 < 0.0) report.monotone = false;
  }
  const std::size_t m = lv.size();
  const Richardson last = richardson(lv[m - 3].apex_deflection, lv[m - 2].apex_deflection,
                                     lv[m - 1].apex_deflection);
  report.extrapolated = last.limit;
  report.observed_order = last.order;
  report.previous_extrapolated =
      m >= 4 ? richardson(lv[m - 4].apex_deflection, lv[m - 3].apex_deflection, lv[m - 2].apex_deflection)
                   .limit
             : 0.0;
  return report;
}

std::string convergence_json(const ConvergenceReport& report) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"elements", l.elements}, {"apex_deflection_um", units::m_to_um(l.apex_deflection)}});
  }
  nlohmann::json j{{"levels", levels},
                   {"extrapolated_um", units::m_to_um(report.extrapolated)},
                   {"previous_extrapolated_um", units::m_to_um(report.previous_extrapolated)},
                   {"extrapolation_drift", report.extrapolation_drift()},
                   {"observed_order", report.observed_order},
                   {"contracting", report.contracting},
                   {"monotone", report.monotone},
                   {"flagged", !report.contracting || !report.monotone}};
  return j.dump(2) + "\n";
}

}  // namespace globtop::fem
