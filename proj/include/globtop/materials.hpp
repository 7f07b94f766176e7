#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/units.hpp"

namespace globtop {

/// Named linear-elastic encapsulant.
///
/// The modulus is kept in GPa as written in the library file so that a
/// load/serialize round trip is field-exact; youngs_modulus() gives Pa.
struct Material {
  std::string name;
  double youngs_modulus_gpa = 0.0;
  double poisson_ratio = 0.0;

  double youngs_modulus() const { return youngs_modulus_gpa * units::kGigapascal; }

  bool operator==(const Material&) const = default;
};

/// Throws ValidationError naming the material and field on violation.
void validate(const Material& material);

/// Ordered, validated, non-empty set of materials with unique names.
class MaterialLibrary {
 public:
  explicit MaterialLibrary(std::vector<Material> materials);

  const std::vector<Material>& materials() const { return materials_; }
  std::size_t size() const { return materials_.size(); }
  auto begin() const { return materials_.begin(); }
  auto end() const { return materials_.end(); }

  /// Look up by name. Matching ignores case, spaces and punctuation, and a
  /// unique prefix is accepted, so "CarbonEpoxy" finds "Carbon epoxy resin".
  const Material& find(std::string_view name) const;

  /// Materials sorted by ascending Young's modulus.
  std::vector<Material> by_stiffness() const;

  bool operator==(const MaterialLibrary&) const = default;

 private:
  std::vector<Material> materials_;
};

/// Parse {"materials": [{"name", "youngs_modulus_gpa", "poisson_ratio"}, ...]}.
MaterialLibrary load_library(std::string_view config_text);
MaterialLibrary load_library_file(const std::string& path);

std::string serialize(const MaterialLibrary& library);

/// The three candidate encapsulants shipped with the tool.
MaterialLibrary default_library();
std::string_view default_library_text();

}  // namespace globtop
