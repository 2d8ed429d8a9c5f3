#include "depscope/bytecode/zip.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace depscope::bytecode {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;

std::uint16_t rd16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t rd32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void wr16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(static_cast<std::uint8_t>(x));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
}
void wr32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  wr16(v, static_cast<std::uint16_t>(x));
  wr16(v, static_cast<std::uint16_t>(x >> 16));
}

bool inflate_raw(const std::uint8_t* src, std::size_t src_len, std::size_t dst_len,
                 std::vector<std::uint8_t>& out) {
  out.resize(dst_len);
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) return false;
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(src_len);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(dst_len);
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  return rc == Z_STREAM_END && zs.total_out == dst_len;
}

ZipReadResult fail(std::string msg) {
  ZipReadResult r;
  r.error = std::move(msg);
  return r;
}

}  // namespace

ZipReadResult read_zip(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 22) return fail("too short for a zip container");

  // locate EOCD, scanning back over a possible comment
  std::size_t eocd = std::string::npos;
  std::size_t scan_limit = bytes.size() >= 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
  for (std::size_t i = bytes.size() - 22; ; --i) {
    if (rd32(&bytes[i]) == kEocdSig) {
      eocd = i;
      break;
    }
    if (i == scan_limit) break;
  }
  if (eocd == std::string::npos) return fail("end-of-central-directory record not found");

  std::uint16_t entry_count = rd16(&bytes[eocd + 10]);
  std::uint32_t cd_size = rd32(&bytes[eocd + 12]);
  std::uint32_t cd_offset = rd32(&bytes[eocd + 16]);
  if (entry_count == 0xFFFF || cd_offset == 0xFFFFFFFF) return fail("zip64 not supported");
  if (static_cast<std::size_t>(cd_offset) + cd_size > bytes.size())
    return fail("central directory out of range");

  ZipReadResult res;
  std::size_t pos = cd_offset;
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (pos + 46 > bytes.size() || rd32(&bytes[pos]) != kCentralSig)
      return fail("bad central directory entry");
    std::uint16_t method = rd16(&bytes[pos + 10]);
    std::uint32_t comp_size = rd32(&bytes[pos + 20]);
    std::uint32_t uncomp_size = rd32(&bytes[pos + 24]);
    std::uint16_t name_len = rd16(&bytes[pos + 28]);
    std::uint16_t extra_len = rd16(&bytes[pos + 30]);
    std::uint16_t comment_len = rd16(&bytes[pos + 32]);
    std::uint32_t local_off = rd32(&bytes[pos + 42]);
    if (pos + 46 + name_len > bytes.size()) return fail("truncated entry name");
    std::string name(reinterpret_cast<const char*>(&bytes[pos + 46]), name_len);
    pos += 46 + name_len + extra_len + comment_len;

    if (!name.empty() && name.back() == '/') continue;  // directory entry

    if (static_cast<std::size_t>(local_off) + 30 > bytes.size() ||
        rd32(&bytes[local_off]) != kLocalSig)
      return fail("bad local header for " + name);
    std::uint16_t lname = rd16(&bytes[local_off + 26]);
    std::uint16_t lextra = rd16(&bytes[local_off + 28]);
    std::size_t data_off = static_cast<std::size_t>(local_off) + 30 + lname + lextra;
    if (data_off + comp_size > bytes.size()) return fail("truncated entry data for " + name);

    ZipEntry entry;
    entry.name = std::move(name);
    if (method == 0) {
      if (comp_size != uncomp_size) return fail("stored entry size mismatch");
      entry.data.assign(bytes.begin() + static_cast<long>(data_off),
                        bytes.begin() + static_cast<long>(data_off + comp_size));
    } else if (method == 8) {
      if (!inflate_raw(&bytes[data_off], comp_size, uncomp_size, entry.data))
        return fail("inflate failed for " + entry.name);
    } else {
      return fail("unsupported compression method for " + entry.name);
    }
    res.entries.push_back(std::move(entry));
  }
  res.ok = true;
  return res;
}

ZipReadResult read_zip_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_zip(bytes);
}

std::vector<std::uint8_t> write_zip(const std::vector<ZipEntry>& entries) {
  std::vector<std::uint8_t> out;
  struct CdRecord {
    std::string name;
    std::uint32_t crc, size, offset;
  };
  std::vector<CdRecord> cd;

  for (const auto& e : entries) {
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, e.data.empty() ? Z_NULL : e.data.data(), static_cast<uInt>(e.data.size())));
    std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    wr32(out, kLocalSig);
    wr16(out, 20);      // version needed
    wr16(out, 0);       // flags
    wr16(out, 0);       // method: store
    wr16(out, 0);       // time
    wr16(out, 0x21);    // date (1980-01-01)
    wr32(out, crc);
    wr32(out, static_cast<std::uint32_t>(e.data.size()));
    wr32(out, static_cast<std::uint32_t>(e.data.size()));
    wr16(out, static_cast<std::uint16_t>(e.name.size()));
    wr16(out, 0);  // extra
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), e.data.begin(), e.data.end());
    cd.push_back({e.name, crc, static_cast<std::uint32_t>(e.data.size()), offset});
  }

  std::uint32_t cd_start = static_cast<std::uint32_t>(out.size());
  for (const auto& r : cd) {
    wr32(out, kCentralSig);
    wr16(out, 20);
    wr16(out, 20);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0x21);
    wr32(out, r.crc);
    wr32(out, r.size);
    wr32(out, r.size);
    wr16(out, static_cast<std::uint16_t>(r.name.size()));
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr32(out, 0);
    wr32(out, r.offset);
    out.insert(out.end(), r.name.begin(), r.name.end());
  }
  std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_start;
  wr32(out, kEocdSig);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<std::uint16_t>(cd.size()));
  wr16(out, static_cast<std::uint16_t>(cd.size()));
  wr32(out, cd_size);
  wr32(out, cd_start);
  wr16(out, 0);
  return out;
}

bool write_zip_file(const std::string& path, const std::vector<ZipEntry>& entries) {
  auto bytes = write_zip(entries);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
  return out.good();
}

}  // namespace depscope::bytecode
