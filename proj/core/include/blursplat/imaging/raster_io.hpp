#pragma once

#include <filesystem>

#include "blursplat/imaging/image.hpp"

namespace blursplat::imaging {

/// 8-bit PNG, gray or RGB. Decoded images are SrgbEncoded.
Image read_png(const std::filesystem::path& path);
/// Samples are clamped to [0, 1] and rounded to 8 bits. Requires SrgbEncoded.
void write_png(const std::filesystem::path& path, const Image& img);

/// Portable float map ("PF" RGB / "Pf" gray), little-endian. Decoded images are Linear.
Image read_pfm(const std::filesystem::path& path);
/// Samples are stored as 32-bit floats.
void write_pfm(const std::filesystem::path& path, const Image& img);

}  // namespace blursplat::imaging
