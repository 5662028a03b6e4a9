// Copyright 2026 The gentrify authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gentrify {

/// Square RGB raster, 8-bit, channel-planar layout (all of R, then G, then B).
/// Encoder inputs are these values scaled to [0,1] as v/255.
struct ImageTensor {
    int side = 0;
    std::vector<std::uint8_t> data; // 3 * side * side

    ImageTensor() = default;
    explicit ImageTensor(int side_px)
        : side(side_px), data(static_cast<std::size_t>(3) * side_px * side_px, 0) {}

    std::uint8_t& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * side + y) * side + x];
    }
    [[nodiscard]] std::uint8_t at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * side + y) * side + x];
    }
    [[nodiscard]] double value(int c, int y, int x) const { return at(c, y, x) / 255.0; }

    bool operator==(const ImageTensor&) const = default;
};

/// Reads a PNG and converts to 8-bit RGB regardless of the stored format.
ImageTensor read_png_rgb8(const std::string& path);

/// Writes 8-bit RGB with fixed encoder settings; output bytes are a pure
/// function of the pixel content.
void write_png_rgb8(const std::string& path, const ImageTensor& img);

std::uint64_t image_content_hash(const ImageTensor& img);

} // namespace gentrify
