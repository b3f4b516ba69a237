#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace walker {

enum class Material : std::uint8_t { Aluminum = 0, Steel = 1, Titanium = 2 };

inline constexpr std::array<Material, 3> kAllMaterials{Material::Aluminum, Material::Steel,
                                                       Material::Titanium};

std::string_view to_string(Material m);
// Throws Error(UnknownMaterial).
Material material_from_string(std::string_view name);

/// Isotropic alloy constants in SI (Pa, kg/m^3).
struct MaterialSpec {
  double elastic_modulus;
  double poisson_ratio;
  double shear_modulus;
  double density;
  double tensile_strength;
  double yield_strength;
};

/// 6061-T6 aluminum, AISI 4130 steel and Ti-6Al-4V.
/// Throws Error(UnknownMaterial) for a value outside the enumeration.
const MaterialSpec& material_properties(Material m);
const MaterialSpec& material_properties(std::string_view name);

}  // namespace walker
