#pragma once

// Integer-only rasteriser for symbolic panels. Output is bit-exact across
// platforms: geometry is computed in 1/16 pixel units from fixed-point
// tables, with no floating point on the drawing path.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ravenforge/model.hpp"
#include "ravenforge/panel.hpp"

namespace ravenforge {

inline constexpr int kPanelSize = 80;
inline constexpr int kPanelPixels = kPanelSize * kPanelSize;
inline constexpr std::uint8_t kBackground = 255;

struct PanelImage {
  std::array<std::uint8_t, kPanelPixels> pixels;

  PanelImage() { pixels.fill(kBackground); }

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y * kPanelSize + x)]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y * kPanelSize + x)]; }

  friend bool operator==(const PanelImage&, const PanelImage&) = default;
};

// Fill intensity of a color level: 255 for level 0 down to 0 for level 9.
constexpr std::uint8_t color_intensity(int level) {
  return static_cast<std::uint8_t>(255 - level * 255 / (kColorCount - 1));
}

// White background, black 2 px outlines filled with the color intensity,
// mesh lines drawn last as 2 px black bars.
PanelImage rasterize(const SymbolicPanel& panel, Configuration configuration);

// 1 where a line of `state` is drawn, 0 elsewhere.
PanelImage mesh_mask(MeshState state);

PanelImage rotate_image_cw(const PanelImage& img);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y * width + x)]; }
};

// Composite of a matrix: the 3x3 context grid (cell 9 left blank) above
// the eight answers in two rows of four.
struct TileOrigin {
  int x;
  int y;
};
TileOrigin context_tile(int cell);  // cell 0..8
TileOrigin answer_tile(int index);  // 0..7
GrayImage render_sheet(std::span<const PanelImage, 16> panels);
GrayImage render_sheet(const SymbolicMatrix& matrix);

// The 16 panels of a matrix, context then answers.
std::array<PanelImage, 16> render_matrix(const SymbolicMatrix& matrix);

// 8-bit single-channel PNG.
std::vector<std::uint8_t> encode_png(const GrayImage& img);
void write_png(const std::filesystem::path& path, const GrayImage& img);

}  // namespace ravenforge
