#include "medsensor/zipio.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "medsensor/errors.hpp"

namespace medsensor::zipio {

namespace {

std::uint16_t rd16(const Bytes& d, std::size_t off) {
  return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}
std::uint32_t rd32(const Bytes& d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}
void wr16(Bytes& d, std::uint16_t v) {
  d.push_back(v & 0xff);
  d.push_back((v >> 8) & 0xff);
}
void wr32(Bytes& d, std::uint32_t v) {
  d.push_back(v & 0xff);
  d.push_back((v >> 8) & 0xff);
  d.push_back((v >> 16) & 0xff);
  d.push_back((v >> 24) & 0xff);
}

Bytes inflate_raw(const std::uint8_t* src, std::size_t n, std::size_t out_size) {
  Bytes out(out_size);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error("inflateInit failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(n);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("zip entry: inflate failed");
  return out;
}

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;

}  // namespace

std::map<std::string, Bytes> read_archive(const Bytes& data) {
  // locate end-of-central-directory (no comment expected, but scan anyway)
  if (data.size() < 22) throw Error("zip: truncated archive");
  std::size_t eocd = data.size() - 22;
  while (rd32(data, eocd) != kEndSig) {
    if (eocd == 0) throw Error("zip: end record not found");
    --eocd;
  }
  const std::uint16_t count = rd16(data, eocd + 10);
  std::size_t off = rd32(data, eocd + 16);

  std::map<std::string, Bytes> out;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (off + 46 > data.size() || rd32(data, off) != kCentralSig)
      throw Error("zip: bad central directory");
    const std::uint16_t method = rd16(data, off + 10);
    const std::uint32_t comp_size = rd32(data, off + 20);
    const std::uint32_t uncomp_size = rd32(data, off + 24);
    const std::uint16_t name_len = rd16(data, off + 28);
    const std::uint16_t extra_len = rd16(data, off + 30);
    const std::uint16_t comment_len = rd16(data, off + 32);
    const std::uint32_t local_off = rd32(data, off + 42);
    std::string name(reinterpret_cast<const char*>(data.data() + off + 46), name_len);

    if (local_off + 30 > data.size() || rd32(data, local_off) != kLocalSig)
      throw Error("zip: bad local header for " + name);
    const std::uint16_t lname = rd16(data, local_off + 26);
    const std::uint16_t lextra = rd16(data, local_off + 28);
    const std::size_t payload = local_off + 30 + lname + lextra;
    if (payload + comp_size > data.size()) throw Error("zip: truncated entry " + name);

    if (method == 0) {
      out[name] = Bytes(data.begin() + payload, data.begin() + payload + comp_size);
    } else if (method == 8) {
      out[name] = inflate_raw(data.data() + payload, comp_size, uncomp_size);
    } else {
      throw Error("zip: unsupported compression method in " + name);
    }
    off += 46 + name_len + extra_len + comment_len;
  }
  return out;
}

Bytes write_archive(const std::vector<std::pair<std::string, Bytes>>& entries) {
  Bytes out;
  struct Central {
    std::string name;
    std::uint32_t crc, size, offset;
  };
  std::vector<Central> centrals;

  for (const auto& [name, payload] : entries) {
    const auto crc = static_cast<std::uint32_t>(
        crc32(0, payload.data(), static_cast<uInt>(payload.size())));
    const auto offset = static_cast<std::uint32_t>(out.size());
    wr32(out, kLocalSig);
    wr16(out, 20);  // version needed
    wr16(out, 0);   // flags
    wr16(out, 0);   // stored
    wr16(out, 0);   // mod time (fixed)
    wr16(out, 0x21);  // mod date (fixed: 1980-01-01)
    wr32(out, crc);
    wr32(out, static_cast<std::uint32_t>(payload.size()));
    wr32(out, static_cast<std::uint32_t>(payload.size()));
    wr16(out, static_cast<std::uint16_t>(name.size()));
    wr16(out, 0);
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), payload.begin(), payload.end());
    centrals.push_back({name, crc, static_cast<std::uint32_t>(payload.size()), offset});
  }

  const auto cd_start = static_cast<std::uint32_t>(out.size());
  for (const auto& c : centrals) {
    wr32(out, kCentralSig);
    wr16(out, 20);
    wr16(out, 20);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0x21);
    wr32(out, c.crc);
    wr32(out, c.size);
    wr32(out, c.size);
    wr16(out, static_cast<std::uint16_t>(c.name.size()));
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr32(out, 0);
    wr32(out, c.offset);
    out.insert(out.end(), c.name.begin(), c.name.end());
  }
  const auto cd_size = static_cast<std::uint32_t>(out.size()) - cd_start;

  wr32(out, kEndSig);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<std::uint16_t>(centrals.size()));
  wr16(out, static_cast<std::uint16_t>(centrals.size()));
  wr32(out, cd_size);
  wr32(out, cd_start);
  wr16(out, 0);
  return out;
}

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure(path);
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const Bytes& data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure(path);
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (!f) throw IoFailure(path);
}

}  // namespace medsensor::zipio
