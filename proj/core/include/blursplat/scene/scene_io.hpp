#pragma once

#include <filesystem>
#include <iosfwd>

#include "blursplat/scene/gaussian.hpp"

namespace blursplat::scene {

/// Text format, one Gaussian per line:
/// mu_x mu_y mu_z qw qx qy qz sx sy sz opacity r g b
/// Blank lines and lines starting with '#' are ignored. Values are written
/// with 17 significant digits so a round trip is lossless.
void write_scene(std::ostream& os, const Scene& scene);
Scene read_scene(std::istream& is);

void save_scene(const std::filesystem::path& path, const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

}  // namespace blursplat::scene
