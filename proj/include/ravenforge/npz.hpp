#pragma once

// NPY arrays and NPZ archives (zip of members, deflate-compressed).
// Writes NPY format version 1.0, little-endian, C order; reads 1.0 and 2.0.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ravenforge {

struct NpyArray {
  std::string descr;  // numpy dtype string, e.g. "|u1", "<i8"
  bool fortran_order = false;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> data;

  std::size_t element_count() const;
  std::size_t item_size() const;
};

std::vector<std::uint8_t> encode_npy(const NpyArray& array);
// Throws CorruptArchive on malformed bytes.
NpyArray decode_npy(std::span<const std::uint8_t> bytes);

struct ZipEntry {
  std::string name;
  std::vector<std::uint8_t> data;
};

// Deterministic: fixed timestamps, entries in the given order.
std::vector<std::uint8_t> encode_zip(std::span<const ZipEntry> entries, bool deflate = true);
// Verifies sizes and CRCs; throws CorruptArchive.
std::vector<ZipEntry> decode_zip(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace ravenforge
