#include "blursplat/imaging/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blursplat/error.hpp"

namespace blursplat::imaging {

namespace fs = std::filesystem;

Image read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("cannot read PNG '" + path.string() + "': " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&png);
    throw IoError("cannot decode PNG '" + path.string() + "': " + png.message);
  }
  const int channels = gray ? 1 : 3;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height), channels,
            ColorSpace::SrgbEncoded);
  auto dst = img.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = buffer[i] / 255.0;
  return img;
}

void write_png(const fs::path& path, const Image& img) {
  if (img.space() != ColorSpace::SrgbEncoded) {
    throw ContractError("write_png expects an sRGB-encoded image");
  }
  std::vector<std::uint8_t> buffer(img.size());
  auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    buffer[i] = static_cast<std::uint8_t>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw IoError("cannot write PNG '" + path.string() + "': " + png.message);
  }
}

namespace {

float to_little_endian(float v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bits = std::bit_cast<std::uint32_t>(v);
    bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
    return std::bit_cast<float>(bits);
  }
}

}  // namespace

Image read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PFM '" + path.string() + "'");
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  in.get();  // single whitespace byte before raster data
  if (!in || (magic != "PF" && magic != "Pf") || width <= 0 || height <= 0 || scale == 0.0) {
    throw IoError("malformed PFM header in '" + path.string() + "'");
  }
  if (scale > 0.0) throw IoError("big-endian PFM is not supported: '" + path.string() + "'");
  const int channels = magic == "PF" ? 3 : 1;
  Image img(width, height, channels, ColorSpace::Linear);
  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  // PFM stores rows bottom-to-top.
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("truncated PFM raster in '" + path.string() + "'");
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) img.at(x, y, c) = to_little_endian(row[x * channels + c]);
    }
  }
  return img;
}

void write_pfm(const fs::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (img.channels() == 3 ? "PF" : "Pf") << '\n'
      << img.width() << ' ' << img.height() << '\n'
      << "-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(img.width()) * img.channels());
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        row[x * img.channels() + c] = to_little_endian(static_cast<float>(img.at(x, y, c)));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing PFM '" + path.string() + "'");
}

}  // namespace blursplat::imaging
