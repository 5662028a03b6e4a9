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

#include "gentrify/image.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>

#include <png.h>

#include "gentrify/common.hpp"

namespace gentrify {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

ImageTensor read_png_rgb8(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw Error("cannot open PNG: " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng init failed");
    }
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> interleaved;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("failed to decode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) {
        png_set_strip_16(png);
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (width != height) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError("expected a square image, got " + std::to_string(width) + "x" +
                              std::to_string(height) + ": " + path);
    }

    const int side = static_cast<int>(width);
    interleaved.resize(static_cast<std::size_t>(side) * side * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = interleaved.data() + static_cast<std::size_t>(y) * side * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor img(side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const std::size_t base = (static_cast<std::size_t>(y) * side + x) * 3;
            img.at(0, y, x) = interleaved[base];
            img.at(1, y, x) = interleaved[base + 1];
            img.at(2, y, x) = interleaved[base + 2];
        }
    }
    return img;
}

void write_png_rgb8(const std::string& path, const ImageTensor& img) {
    if (img.side <= 0 || img.data.size() != static_cast<std::size_t>(3) * img.side * img.side) {
        throw ValidationError("write_png_rgb8: malformed image tensor");
    }
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    const std::string tmp = path + ".tmp";
    {
        FilePtr fp(std::fopen(tmp.c_str(), "wb"));
        if (!fp) {
            throw Error("cannot write PNG: " + path);
        }
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            png_destroy_write_struct(&png, &info);
            throw Error("libpng init failed");
        }
        std::vector<std::uint8_t> interleaved(static_cast<std::size_t>(img.side) * img.side * 3);
        std::vector<png_bytep> rows(static_cast<std::size_t>(img.side));
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw Error("failed to encode PNG: " + path);
        }
        png_init_io(png, fp.get());
        // Fixed settings keep the byte stream deterministic for given pixels.
        png_set_compression_level(png, 6);
        png_set_filter(png, 0, PNG_FILTER_NONE);
        png_set_IHDR(png, info, static_cast<png_uint_32>(img.side), static_cast<png_uint_32>(img.side),
                     8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        for (int y = 0; y < img.side; ++y) {
            for (int x = 0; x < img.side; ++x) {
                const std::size_t base = (static_cast<std::size_t>(y) * img.side + x) * 3;
                interleaved[base] = img.at(0, y, x);
                interleaved[base + 1] = img.at(1, y, x);
                interleaved[base + 2] = img.at(2, y, x);
            }
            rows[static_cast<std::size_t>(y)] = interleaved.data() + static_cast<std::size_t>(y) * img.side * 3;
        }
        png_write_info(png, info);
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    std::filesystem::rename(tmp, target);
}

std::uint64_t image_content_hash(const ImageTensor& img) {
    std::uint64_t h = fnv1a64(img.data.data(), img.data.size());
    h ^= static_cast<std::uint64_t>(img.side) * 0x9e3779b97f4a7c15ULL;
    return h;
}

} // namespace gentrify
