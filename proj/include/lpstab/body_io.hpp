#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "lpstab/convex_body.hpp"
#include "lpstab/generators.hpp"

namespace lpstab {

// shortest decimal representation that round-trips to the same double
std::string format_double(double v);

nlohmann::json spec_to_json(const BodySpec& spec);
BodySpec spec_from_json(const nlohmann::json& j);

// Body file: JSON with format_version, dimension, representation
// ("fourier" for n=2, "real_spherical_harmonics" for n=3), the flat
// coefficient array, and metadata (resolution, generator spec if known).
nlohmann::json body_to_json(const ConvexBody& K, const BodySpec* spec = nullptr);

struct LoadedBody {
  ConvexBody body;
  std::optional<BodySpec> spec;
};
LoadedBody body_from_json(const nlohmann::json& j,
                          const std::vector<int>& resolution_override = {});

void write_body_file(const std::string& path, const ConvexBody& K,
                     const BodySpec* spec = nullptr);
LoadedBody read_body_file(const std::string& path,
                          const std::vector<int>& resolution_override = {});

}  // namespace lpstab
