#include "tgan/png_io.hpp"

#include "tgan/types.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace tgan {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
  put_be32(out, std::uint32_t(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const uLong crc = crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start));
  put_be32(out, std::uint32_t(crc));
}

}  // namespace

void write_png(const std::string& path, const std::vector<std::uint8_t>& pixels, int width,
               int height, int channels) {
  check_arg(channels == 1 || channels == 3, "write_png: channels must be 1 or 3");
  check_arg(width > 0 && height > 0, "write_png: empty image");
  check_arg(pixels.size() == std::size_t(width) * height * channels,
            "write_png: pixel buffer size mismatch");

  // filter byte 0 in front of every scanline
  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(height) * (1 + std::size_t(width) * channels));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = pixels.data() + std::size_t(y) * width * channels;
    raw.insert(raw.end(), row, row + std::size_t(width) * channels);
  }
  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> deflated(bound);
  const int rc = compress2(deflated.data(), &bound, raw.data(), uLong(raw.size()), 6);
  check_state(rc == Z_OK, "write_png: deflate failed");
  deflated.resize(bound);

  std::vector<std::uint8_t> out;
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.insert(out.end(), sig, sig + 8);

  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, std::uint32_t(width));
  put_be32(ihdr, std::uint32_t(height));
  ihdr.push_back(8);                                // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);            // gray / truecolor
  ihdr.push_back(0);                                // deflate
  ihdr.push_back(0);                                // filter method
  ihdr.push_back(0);                                // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", deflated);
  put_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary);
  check_state(bool(f), "write_png: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  check_state(bool(f), "write_png: write failure on " + path);
}

}  // namespace tgan
