#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tgan {

/// Minimal deterministic PNG writer (zlib-deflated, filter 0 scanlines).
/// channels must be 1 (grayscale) or 3 (RGB); pixels are row-major,
/// interleaved when channels == 3.
void write_png(const std::string& path, const std::vector<std::uint8_t>& pixels, int width,
               int height, int channels);

}  // namespace tgan
