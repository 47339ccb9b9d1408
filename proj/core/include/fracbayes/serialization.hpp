#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fracbayes/forward.hpp"
#include "fracbayes/mesh.hpp"

namespace fracbayes {

struct MeshCoefficient {
  Mesh1D mesh;
  Coefficient coefficient;
};

/// {"mesh": {"x_left", "x_right", "n_cells"}, "values": [...]}
std::string coefficient_to_json(const Mesh1D& mesh, const Coefficient& a);
MeshCoefficient coefficient_from_json(std::string_view text);

/// {"points": [...], "gamma": g, "y": [...], "seed": n}
std::string data_to_json(const DataVector& data);
DataVector data_from_json(std::string_view text);

/// 64-bit FNV-1a, used to stamp outputs with the configuration that made them.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace fracbayes
