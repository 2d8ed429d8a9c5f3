#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depscope::bytecode {

struct ZipEntry {
  std::string name;
  std::vector<std::uint8_t> data;
};

struct ZipReadResult {
  bool ok = false;
  std::string error;  // non-empty means the container is corrupt
  std::vector<ZipEntry> entries;
};

// Parses a zip/jar container via its central directory. Supports stored and
// deflated entries; zip64 archives are rejected as unsupported.
ZipReadResult read_zip(const std::vector<std::uint8_t>& bytes);
ZipReadResult read_zip_file(const std::string& path);

// Writes entries uncompressed (store method) with CRC-32. Deterministic:
// fixed timestamps, entry order preserved.
std::vector<std::uint8_t> write_zip(const std::vector<ZipEntry>& entries);
bool write_zip_file(const std::string& path, const std::vector<ZipEntry>& entries);

}  // namespace depscope::bytecode
