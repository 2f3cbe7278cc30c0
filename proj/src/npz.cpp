#include "ravenforge/npz.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "ravenforge/error.hpp"

namespace ravenforge {

std::size_t NpyArray::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t NpyArray::item_size() const {
  std::size_t n = 0;
  for (std::size_t i = 2; i < descr.size(); ++i) n = n * 10 + static_cast<std::size_t>(descr[i] - '0');
  return n;
}

namespace {

constexpr char kMagic[] = "\x93NUMPY";

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorKind::CorruptArchive, why); }

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

std::string_view after(std::string_view header, std::string_view key) {
  const auto pos = header.find(key);
  if (pos == std::string_view::npos) corrupt("npy header lacks " + std::string(key));
  auto rest = header.substr(pos + key.size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) corrupt("npy header malformed");
  rest = rest.substr(colon + 1);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  return rest;
}

void put16(std::vector<std::uint8_t>& o, std::uint32_t v) {
  o.push_back(static_cast<std::uint8_t>(v));
  o.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(std::vector<std::uint8_t>& o, std::uint32_t v) {
  put16(o, v & 0xffff);
  put16(o, v >> 16);
}
std::uint32_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 2 > b.size()) corrupt("truncated");
  return static_cast<std::uint32_t>(b[at] | (b[at + 1] << 8));
}
std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return get16(b, at) | (get16(b, at + 2) << 16);
}

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint32_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

std::vector<std::uint8_t> raw_deflate(std::span<const std::uint8_t> in) {
  z_stream s{};
  if (deflateInit2(&s, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(ErrorKind::IoFailure, "deflateInit2 failed");
  std::vector<std::uint8_t> out(deflateBound(&s, static_cast<uLong>(in.size())));
  s.next_in = const_cast<Bytef*>(in.data());
  s.avail_in = static_cast<uInt>(in.size());
  s.next_out = out.data();
  s.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&s, Z_FINISH);
  out.resize(s.total_out);
  deflateEnd(&s);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::IoFailure, "deflate failed");
  return out;
}

std::vector<std::uint8_t> raw_inflate(std::span<const std::uint8_t> in, std::size_t expected) {
  z_stream s{};
  if (inflateInit2(&s, -MAX_WBITS) != Z_OK) corrupt("inflateInit2 failed");
  std::vector<std::uint8_t> out(expected);
  s.next_in = const_cast<Bytef*>(in.data());
  s.avail_in = static_cast<uInt>(in.size());
  s.next_out = out.data();
  s.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&s, Z_FINISH);
  const auto produced = s.total_out;
  inflateEnd(&s);
  if (rc != Z_STREAM_END || produced != expected) corrupt("deflate stream damaged");
  return out;
}

std::uint32_t crc_of(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

}  // namespace

std::vector<std::uint8_t> encode_npy(const NpyArray& a) {
  if (a.data.size() != a.element_count() * a.item_size())
    throw std::invalid_argument("npy data size does not match shape");
  std::string header = "{'descr': '" + a.descr + "', 'fortran_order': " +
                       (a.fortran_order ? "True" : "False") + ", 'shape': " + shape_string(a.shape) + ", }";
  const std::size_t unpadded = 6 + 2 + 2 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';
  std::vector<std::uint8_t> out(kMagic, kMagic + 6);
  out.push_back(1);
  out.push_back(0);
  put16(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), a.data.begin(), a.data.end());
  return out;
}

NpyArray decode_npy(std::span<const std::uint8_t> b) {
  if (b.size() < 10 || std::memcmp(b.data(), kMagic, 6) != 0) corrupt("not an npy array");
  const int major = b[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = get16(b, 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    header_len = get32(b, 8);
    offset = 12;
  } else {
    corrupt("unsupported npy version " + std::to_string(major));
  }
  if (offset + header_len > b.size()) corrupt("npy header truncated");
  const std::string header(b.begin() + static_cast<std::ptrdiff_t>(offset),
                           b.begin() + static_cast<std::ptrdiff_t>(offset + header_len));

  NpyArray a;
  auto descr = after(header, "'descr'");
  if (descr.empty() || descr.front() != '\'') corrupt("npy descr malformed");
  a.descr = std::string(descr.substr(1, descr.find('\'', 1) - 1));
  a.fortran_order = after(header, "'fortran_order'").starts_with("True");
  auto shape = after(header, "'shape'");
  if (shape.empty() || shape.front() != '(') corrupt("npy shape malformed");
  shape = shape.substr(1, shape.find(')') - 1);
  std::size_t v = 0;
  bool digits = false;
  for (char ch : shape) {
    if (ch >= '0' && ch <= '9') {
      v = v * 10 + static_cast<std::size_t>(ch - '0');
      digits = true;
    } else if (ch == ',') {
      if (digits) a.shape.push_back(v);
      v = 0;
      digits = false;
    }
  }
  if (digits) a.shape.push_back(v);
  if (a.descr.size() < 3) corrupt("npy descr malformed");

  const std::size_t want = a.element_count() * a.item_size();
  const std::size_t data_at = offset + header_len;
  if (b.size() - data_at != want) corrupt("npy payload size mismatch");
  a.data.assign(b.begin() + static_cast<std::ptrdiff_t>(data_at), b.end());
  return a;
}

std::vector<std::uint8_t> encode_zip(std::span<const ZipEntry> entries, bool deflate) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  for (const ZipEntry& e : entries) {
    const std::uint32_t crc = crc_of(e.data);
    const auto payload = deflate ? raw_deflate(e.data) : e.data;
    const auto offset = static_cast<std::uint32_t>(out.size());
    const std::uint32_t method = deflate ? 8 : 0;

    put32(out, kLocalSig);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, static_cast<std::uint32_t>(e.name.size()));
    put16(out, 0);
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), payload.begin(), payload.end());

    put32(central, kCentralSig);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, method);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put32(central, static_cast<std::uint32_t>(e.data.size()));
    put16(central, static_cast<std::uint32_t>(e.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central.insert(central.end(), e.name.begin(), e.name.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

std::vector<ZipEntry> decode_zip(std::span<const std::uint8_t> b) {
  if (b.size() < 22) corrupt("too short for a zip archive");
  std::size_t end = b.size() - 22;
  while (get32(b, end) != kEndSig) {
    if (end == 0 || b.size() - end > 22 + 0xffff) corrupt("no end of central directory");
    --end;
  }
  const std::uint32_t count = get16(b, end + 10);
  std::size_t at = get32(b, end + 16);
  std::vector<ZipEntry> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (get32(b, at) != kCentralSig) corrupt("bad central directory entry");
    const std::uint32_t method = get16(b, at + 10);
    const std::uint32_t crc = get32(b, at + 16);
    const std::uint32_t csize = get32(b, at + 20);
    const std::uint32_t usize = get32(b, at + 24);
    const std::uint32_t name_len = get16(b, at + 28);
    const std::uint32_t extra_len = get16(b, at + 30);
    const std::uint32_t comment_len = get16(b, at + 32);
    const std::uint32_t local = get32(b, at + 42);
    if (csize == 0xffffffffu || usize == 0xffffffffu) corrupt("zip64 members are not supported");
    if (at + 46 + name_len > b.size()) corrupt("truncated central directory");
    ZipEntry e;
    e.name.assign(b.begin() + static_cast<std::ptrdiff_t>(at + 46),
                  b.begin() + static_cast<std::ptrdiff_t>(at + 46 + name_len));
    at += 46 + name_len + extra_len + comment_len;

    if (get32(b, local) != kLocalSig) corrupt("bad local header for " + e.name);
    const std::size_t data_at = local + 30 + get16(b, local + 26) + get16(b, local + 28);
    if (data_at + csize > b.size()) corrupt("truncated member " + e.name);
    const auto payload = b.subspan(data_at, csize);
    if (method == 0) {
      if (csize != usize) corrupt("stored member size mismatch");
      e.data.assign(payload.begin(), payload.end());
    } else if (method == 8) {
      e.data = raw_inflate(payload, usize);
    } else {
      corrupt("unsupported compression method " + std::to_string(method));
    }
    if (crc_of(e.data) != crc) corrupt("crc mismatch in " + e.name);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
}

}  // namespace ravenforge
