#include "ravenforge/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>

#include "ravenforge/error.hpp"

namespace ravenforge {

namespace {

constexpr int kSub = 16;                      // subpixel units per pixel
constexpr int kEdge = kPanelSize * kSub;      // panel edge in subpixel units
constexpr int kStroke = 2 * kSub;

// sin(3k degrees) for k = 0..30, Q20.
constexpr std::array<std::int64_t, 31> kSinQuarter = {
    0,      54878,  109606, 164033, 218011, 271391, 324028, 375776,
    426494, 476044, 524288, 571095, 616338, 659890, 701634, 741455,
    779244, 814897, 848316, 879410, 908093, 934288, 957922, 978930,
    997255, 1012847, 1025662, 1035666, 1042832, 1047139, 1048576};

// 1 / cos(pi / n), Q16, for n = 3..6: perpendicular stroke width to radial
// inset of a regular polygon.
constexpr std::array<std::int64_t, 4> kSecant = {131072, 92682, 81007, 75674};

constexpr std::array<int, kSizeCount> kSizeScale = {400, 500, 600, 700, 800, 900};  // permille

std::int64_t sin_deg(int deg) {
  deg = ((deg % 360) + 360) % 360;
  const int quadrant = deg / 90;
  const int r = deg % 90;
  switch (quadrant) {
    case 0: return kSinQuarter[static_cast<std::size_t>(r / 3)];
    case 1: return kSinQuarter[static_cast<std::size_t>((90 - r) / 3)];
    case 2: return -kSinQuarter[static_cast<std::size_t>(r / 3)];
    default: return -kSinQuarter[static_cast<std::size_t>((90 - r) / 3)];
  }
}

std::int64_t cos_deg(int deg) { return sin_deg(deg + 90); }

// Round-to-nearest of a / 2^20 for signed a.
std::int64_t q20(std::int64_t a) { return a >= 0 ? (a + (1 << 19)) >> 20 : -((-a + (1 << 19)) >> 20); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

struct Point {
  std::int64_t x, y;
};

// Fills every pixel whose centre lies inside the polygon, scanline by
// scanline with even-odd crossings.
void fill_polygon(PanelImage& img, std::span<const Point> poly, std::uint8_t value) {
  std::vector<std::int64_t> xs;
  for (int py = 0; py < kPanelSize; ++py) {
    const std::int64_t y = py * kSub + kSub / 2;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i];
      const Point b = poly[(i + 1) % poly.size()];
      if (a.y == b.y) continue;
      const Point lo = a.y < b.y ? a : b;
      const Point hi = a.y < b.y ? b : a;
      if (y < lo.y || y >= hi.y) continue;
      xs.push_back(lo.x + floor_div((y - lo.y) * (hi.x - lo.x), hi.y - lo.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const auto x0 = std::max<std::int64_t>(0, ceil_div(xs[i] - kSub / 2, kSub));
      const auto x1 = std::min<std::int64_t>(kPanelSize, ceil_div(xs[i + 1] - kSub / 2, kSub));
      for (auto px = x0; px < x1; ++px) img.at(static_cast<int>(px), py) = value;
    }
  }
}

void fill_disk(PanelImage& img, std::int64_t cx, std::int64_t cy, std::int64_t r, std::uint8_t value) {
  for (int py = 0; py < kPanelSize; ++py)
    for (int px = 0; px < kPanelSize; ++px) {
      const std::int64_t dx = px * kSub + kSub / 2 - cx;
      const std::int64_t dy = py * kSub + kSub / 2 - cy;
      if (dx * dx + dy * dy <= r * r) img.at(px, py) = value;
    }
}

std::vector<Point> regular_polygon(std::int64_t cx, std::int64_t cy, std::int64_t r, int sides,
                                   int rotation) {
  const int base = sides % 2 == 1 ? -90 : -90 + 180 / sides;
  std::vector<Point> pts;
  for (int i = 0; i < sides; ++i) {
    const int deg = base + rotation + i * 360 / sides;
    pts.push_back({cx + q20(r * cos_deg(deg)), cy + q20(r * sin_deg(deg))});
  }
  return pts;
}

void draw_entity(PanelImage& img, const SlotGeometry& slot, const ComponentState& s, int slot_index) {
  const std::int64_t cx = slot.cx * kEdge / 1000;
  const std::int64_t cy = slot.cy * kEdge / 1000;
  const std::int64_t extent = slot.extent * kEdge / 1000;
  const std::int64_t r = extent * kSizeScale[s.size] / 2000;
  const std::uint8_t fill = color_intensity(s.color);
  const int rotation = (s.angles[static_cast<std::size_t>(slot_index)] - 3) * 45;
  if (r <= 0) return;
  if (s.type == kTypeCount - 1) {
    fill_disk(img, cx, cy, r, 0);
    if (r > kStroke) fill_disk(img, cx, cy, r - kStroke, fill);
    return;
  }
  const int sides = s.type + 3;
  const auto outer = regular_polygon(cx, cy, r, sides, rotation);
  fill_polygon(img, outer, 0);
  const std::int64_t inset = (kStroke * kSecant[static_cast<std::size_t>(sides - 3)]) >> 16;
  if (r > inset) fill_polygon(img, regular_polygon(cx, cy, r - inset, sides, rotation), fill);
}

// Pixel span [first, last] of grid line `line` (0..2) and of half `half`.
constexpr std::array<std::array<int, 2>, 3> kLinePixels = {{{0, 1}, {39, 40}, {78, 79}}};
constexpr std::array<std::array<int, 2>, 2> kHalfPixels = {{{0, 40}, {39, 79}}};

template <class F>
void for_each_line_pixel(MeshState state, F&& f) {
  for (int slot = 0; slot < kMeshSlots; ++slot) {
    if (!state.contains(slot)) continue;
    const int local = slot % 6;
    const auto& line = kLinePixels[static_cast<std::size_t>(local / 2)];
    const auto& half = kHalfPixels[static_cast<std::size_t>(local % 2)];
    const bool horizontal = slot < 6;
    for (int a = line[0]; a <= line[1]; ++a)
      for (int b = half[0]; b <= half[1]; ++b) horizontal ? f(b, a) : f(a, b);
  }
}

}  // namespace

PanelImage rasterize(const SymbolicPanel& panel, Configuration configuration) {
  PanelImage img;
  const auto& layouts = component_layouts(configuration);
  for (int c = 0; c < panel.component_count && c < static_cast<int>(layouts.size()); ++c) {
    const ComponentState& s = panel.components[static_cast<std::size_t>(c)];
    const auto& slots = layouts[static_cast<std::size_t>(c)].slots;
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
      if ((s.positions >> i) & 1u) draw_entity(img, slots[static_cast<std::size_t>(i)], s, i);
  }
  if (panel.mesh) for_each_line_pixel(*panel.mesh, [&](int x, int y) { img.at(x, y) = 0; });
  return img;
}

PanelImage mesh_mask(MeshState state) {
  PanelImage img;
  img.pixels.fill(0);
  for_each_line_pixel(state, [&](int x, int y) { img.at(x, y) = 1; });
  return img;
}

PanelImage rotate_image_cw(const PanelImage& img) {
  PanelImage out;
  for (int y = 0; y < kPanelSize; ++y)
    for (int x = 0; x < kPanelSize; ++x) out.at(kPanelSize - 1 - y, x) = img.at(x, y);
  return out;
}

namespace {
constexpr int kGap = 4;
constexpr int kStride = kPanelSize + kGap;
constexpr int kAnswerTop = kGap + 3 * kStride + kGap;
constexpr std::uint8_t kSheetBackground = 160;
}  // namespace

TileOrigin context_tile(int cell) { return {kGap + (cell % 3) * kStride, kGap + (cell / 3) * kStride}; }

TileOrigin answer_tile(int index) {
  return {kGap + (index % 4) * kStride, kAnswerTop + (index / 4) * kStride};
}

GrayImage render_sheet(std::span<const PanelImage, 16> panels) {
  GrayImage sheet;
  sheet.width = kGap + 4 * kStride;
  sheet.height = kAnswerTop + 2 * kStride;
  sheet.pixels.assign(static_cast<std::size_t>(sheet.width * sheet.height), kSheetBackground);
  auto blit = [&](TileOrigin o, const PanelImage& p) {
    for (int y = 0; y < kPanelSize; ++y)
      for (int x = 0; x < kPanelSize; ++x)
        sheet.pixels[static_cast<std::size_t>((o.y + y) * sheet.width + o.x + x)] = p.at(x, y);
  };
  for (int i = 0; i < kContextPanels; ++i) blit(context_tile(i), panels[static_cast<std::size_t>(i)]);
  blit(context_tile(8), PanelImage{});
  for (int i = 0; i < kAnswerPanels; ++i)
    blit(answer_tile(i), panels[static_cast<std::size_t>(kContextPanels + i)]);
  return sheet;
}

std::array<PanelImage, 16> render_matrix(const SymbolicMatrix& m) {
  std::array<PanelImage, 16> out;
  for (int i = 0; i < kContextPanels; ++i)
    out[static_cast<std::size_t>(i)] = rasterize(m.context[static_cast<std::size_t>(i)], m.configuration);
  for (int i = 0; i < kAnswerPanels; ++i)
    out[static_cast<std::size_t>(kContextPanels + i)] =
        rasterize(m.answers[static_cast<std::size_t>(i)], m.configuration);
  return out;
}

GrayImage render_sheet(const SymbolicMatrix& matrix) {
  const auto panels = render_matrix(matrix);
  return render_sheet(std::span<const PanelImage, 16>(panels));
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale, no interlace
  put_chunk(out, "IHDR", ihdr);

  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>((img.width + 1) * img.height));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const auto* row = img.pixels.data() + static_cast<std::ptrdiff_t>(y) * img.width;
    raw.insert(raw.end(), row, row + img.width);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> idat(len);
  if (compress2(idat.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error(ErrorKind::IoFailure, "zlib compression failed");
  idat.resize(len);
  put_chunk(out, "IDAT", idat);
  put_chunk(out, "IEND", {});
  return out;
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
}

}  // namespace ravenforge
