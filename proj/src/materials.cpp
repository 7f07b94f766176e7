#include "globtop/materials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "globtop/error.hpp"

namespace globtop {

namespace {

constexpr std::string_view kDefaultLibrary = R"({
  "materials": [
    {"name": "Polyimide", "youngs_modulus_gpa": 7.5, "poisson_ratio": 0.35},
    {"name": "Parylene C", "youngs_modulus_gpa": 27.59, "poisson_ratio": 0.4},
    {"name": "Carbon epoxy resin", "youngs_modulus_gpa": 70, "poisson_ratio": 0.4}
  ]
}
)";

std::string normalize(std::string_view name) {
  std::string key;
  for (const char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return key;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

double number_field(const nlohmann::json& entry, const std::string& material, const char* field) {
  const auto it = entry.find(field);
  if (it == entry.end()) {
    throw ValidationError(fmt::format("material '{}': missing field {}", material, field));
  }
  if (!it->is_number()) {
    throw ValidationError(fmt::format("material '{}': field {} must be a number", material, field));
  }
  return it->get<double>();
}

}  // namespace

void validate(const Material& m) {
  if (m.name.empty()) {
    throw ValidationError("material name must not be empty");
  }
  if (!std::isfinite(m.youngs_modulus_gpa) || m.youngs_modulus_gpa <= 0.0) {
    throw ValidationError(fmt::format("material '{}': youngs_modulus_gpa must be positive (got {})",
                                      m.name, m.youngs_modulus_gpa));
  }
  if (!std::isfinite(m.poisson_ratio) || m.poisson_ratio < 0.0 || m.poisson_ratio >= 0.5) {
    throw ValidationError(fmt::format(
        "material '{}': poisson_ratio must satisfy 0 <= nu < 0.5 (got {})", m.name, m.poisson_ratio));
  }
}

MaterialLibrary::MaterialLibrary(std::vector<Material> materials) : materials_(std::move(materials)) {
  if (materials_.empty()) {
    throw ValidationError("material library must not be empty");
  }
  for (std::size_t i = 0; i < materials_.size(); ++i) {
    validate(materials_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (materials_[j].name == materials_[i].name) {
        throw ValidationError(fmt::format("duplicate material name '{}'", materials_[i].name));
      }
    }
  }
}

const Material& MaterialLibrary::find(std::string_view name) const {
  const std::string key = normalize(name);
  if (key.empty()) {
    throw ValidationError(fmt::format("invalid material name '{}'", name));
  }
  const Material* prefix_hit = nullptr;
  std::size_t prefix_hits = 0;
  for (const auto& m : materials_) {
    const std::string candidate = normalize(m.name);
    if (candidate == key) {
      return m;
    }
    if (candidate.starts_with(key)) {
      prefix_hit = &m;
      ++prefix_hits;
    }
  }
  if (prefix_hits == 1) {
    return *prefix_hit;
  }
  if (prefix_hits > 1) {
    throw ValidationError(fmt::format("material name '{}' is ambiguous", name));
  }
  throw ValidationError(fmt::format("unknown material '{}'", name));
}

std::vector<Material> MaterialLibrary::by_stiffness() const {
  std::vector<Material> sorted = materials_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Material& a, const Material& b) {
    return a.youngs_modulus_gpa < b.youngs_modulus_gpa;
  });
  return sorted;
}

MaterialLibrary load_library(std::string_view config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_and_column(config_text, e.byte);
    throw ValidationError(
        fmt::format("material library: parse error at line {}, column {}: {}", line, column, e.what()));
  }
  if (!doc.is_object() || !doc.contains("materials") || !doc["materials"].is_array()) {
    throw ValidationError("material library: expected an object with a \"materials\" array");
  }
  std::vector<Material> materials;
  std::size_t index = 0;
  for (const auto& entry : doc["materials"]) {
    if (!entry.is_object()) {
      throw ValidationError(fmt::format("material library: entry {} is not an object", index));
    }
    const auto name_it = entry.find("name");
    if (name_it == entry.end() || !name_it->is_string()) {
      throw ValidationError(fmt::format("material library: entry {} has no string name", index));
    }
    Material m;
    m.name = name_it->get<std::string>();
    m.youngs_modulus_gpa = number_field(entry, m.name, "youngs_modulus_gpa");
    m.poisson_ratio = number_field(entry, m.name, "poisson_ratio");
    materials.push_back(std::move(m));
    ++index;
  }
  return MaterialLibrary(std::move(materials));
}

MaterialLibrary load_library_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open material library '{}'", path));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return load_library(text.str());
}

std::string serialize(const MaterialLibrary& library) {
  nlohmann::json doc;
  doc["materials"] = nlohmann::json::array();
  for (const auto& m : library) {
    nlohmann::json entry;
    entry["name"] = m.name;
    entry["youngs_modulus_gpa"] = m.youngs_modulus_gpa;
    entry["poisson_ratio"] = m.poisson_ratio;
    doc["materials"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

MaterialLibrary default_library() { return load_library(kDefaultLibrary); }

std::string_view default_library_text() { return kDefaultLibrary; }

}  // namespace globtop
