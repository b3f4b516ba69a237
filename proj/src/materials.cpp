#include "walker/materials.hpp"

#include <string>

#include "walker/error.hpp"

namespace walker {

namespace {

constexpr double kGPa = 1e9;
constexpr double kMPa = 1e6;

// clang-format off
const MaterialSpec kAluminum{ 69 * kGPa, 0.330, 26 * kGPa, 2700.0,  310 * kMPa, 275 * kMPa};
const MaterialSpec kSteel   {205 * kGPa, 0.285, 80 * kGPa, 7850.0,  731 * kMPa, 460 * kMPa};
const MaterialSpec kTitanium{105 * kGPa, 0.310, 41 * kGPa, 4429.0, 1050 * kMPa, 827 * kMPa};
// clang-format on

}  // namespace

std::string_view to_string(Material m) {
  switch (m) {
    case Material::Aluminum: return "Aluminum";
    case Material::Steel: return "Steel";
    case Material::Titanium: return "Titanium";
  }
  throw Error(ErrorCode::UnknownMaterial, "material id " + std::to_string(static_cast<int>(m)));
}

Material material_from_string(std::string_view name) {
  for (Material m : kAllMaterials) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::UnknownMaterial, "'" + std::string(name) + "'");
}

const MaterialSpec& material_properties(Material m) {
  switch (m) {
    case Material::Aluminum: return kAluminum;
    case Material::Steel: return kSteel;
    case Material::Titanium: return kTitanium;
  }
  throw Error(ErrorCode::UnknownMaterial, "material id " + std::to_string(static_cast<int>(m)));
}

const MaterialSpec& material_properties(std::string_view name) {
  return material_properties(material_from_string(name));
}

}  // namespace walker
