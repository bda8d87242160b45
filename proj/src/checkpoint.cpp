#include "tgan/checkpoint.hpp"

#include <zlib.h>

#include <fstream>

namespace tgan {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'A', 'N', 'C', 'K', 'P', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, std::uint32_t(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

struct Reader {
  const std::uint8_t* p;
  const std::uint8_t* end;
  const std::string& path;

  void need(std::size_t n) const {
    check_state(std::size_t(end - p) >= n, "checkpoint: truncated archive " + path);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    return s;
  }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> b(p, p + n);
    p += n;
    return b;
  }
};

}  // namespace

void Archive::save(const std::string& path) const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);
  put_u32(out, std::uint32_t(kFormatVersion));

  put_u32(out, std::uint32_t(meta.size()));
  for (const auto& [k, v] : meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, std::uint32_t(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_str(out, name);
    out.push_back(std::uint8_t(t.dtype));
    put_u64(out, std::uint64_t(t.rows));
    put_u64(out, std::uint64_t(t.cols));
    put_u64(out, std::uint64_t(t.bytes.size()));
    out.insert(out.end(), t.bytes.begin(), t.bytes.end());
  }
  const uLong crc = crc32(0L, out.data(), uInt(out.size()));
  put_u32(out, std::uint32_t(crc));

  std::ofstream f(path, std::ios::binary);
  check_state(bool(f), "checkpoint: cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  check_state(bool(f), "checkpoint: write failure on " + path);
}

Archive Archive::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check_state(bool(f), "checkpoint: cannot open " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
  check_state(buf.size() >= 8 + 4 + 4, "checkpoint: truncated archive " + path);

  // integrity first: nothing is parsed from a corrupted file
  const std::size_t body = buf.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= std::uint32_t(buf[body + i]) << (8 * i);
  const uLong crc = crc32(0L, buf.data(), uInt(body));
  check_state(std::uint32_t(crc) == stored,
              "checkpoint: integrity check failed for " + path);

  Reader r{buf.data(), buf.data() + body, path};
  r.need(8);
  check_state(std::memcmp(r.p, kMagic, 8) == 0, "checkpoint: bad magic in " + path);
  r.p += 8;
  const std::uint32_t version = r.u32();
  check_state(version == std::uint32_t(kFormatVersion),
              "checkpoint: unsupported format version " + std::to_string(version) +
                  " in " + path);

  Archive a;
  const std::uint32_t n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    a.meta[k] = r.str();
  }
  const std::uint32_t n_tensors = r.u32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.str();
    Tensor t;
    r.need(1);
    t.dtype = DType(*r.p++);
    check_state(t.dtype == f32 || t.dtype == f64,
                "checkpoint: bad dtype for tensor " + name);
    t.rows = Index(r.u64());
    t.cols = Index(r.u64());
    const std::uint64_t nbytes = r.u64();
    const std::size_t elem = t.dtype == f32 ? 4 : 8;
    check_state(nbytes == std::uint64_t(t.rows) * std::uint64_t(t.cols) * elem,
                "checkpoint: inconsistent tensor size for " + name);
    t.bytes = r.bytes(std::size_t(nbytes));
    a.tensors[name] = std::move(t);
  }
  check_state(r.p == r.end, "checkpoint: trailing bytes in " + path);
  return a;
}

}  // namespace tgan
