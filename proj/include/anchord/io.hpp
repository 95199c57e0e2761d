#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"

namespace anchord {

// Depth interchange formats.
//
// PNG16: single-channel 16-bit grayscale, integer millimeters, 0 encodes
// an invalid pixel (the common RGB-D dataset convention). Lossy to
// 0.5 mm; encodable range (0, 65.535] m.
//
// Raw f32 ("ADPF"): little-endian binary, magic "ADPF", u32 version = 1,
// u32 height, u32 width, then height*width 32-bit floats row-major with
// NaN encoding invalid. Lossless for float-representable depths.

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) std::fclose(f);
    }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

struct PngReadState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriteState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteState() { png_destroy_write_struct(&png, &info); }
};

/// Reads a single-channel grayscale PNG into 16-bit samples (8-bit input
/// is widened). Throws InputError naming the offending property when the
/// file is not single-channel grayscale.
inline void read_gray_png(const std::string& path, int& height, int& width, int& bit_depth,
                          std::vector<std::uint16_t>& samples) {
    FileHandle file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw InputError("input-missing", "cannot open " + path);
    }
    unsigned char signature[8];
    if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
        throw InputError("input-format", path + ": not a PNG file (bad signature)");
    }

    PngReadState state;
    state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (state.png == nullptr) throw InputError("input-format", "libpng init failed");
    state.info = png_create_info_struct(state.png);
    if (state.info == nullptr) throw InputError("input-format", "libpng init failed");
    if (setjmp(png_jmpbuf(state.png))) {
        throw InputError("input-format", path + ": corrupt PNG data");
    }
    png_init_io(state.png, file.get());
    png_set_sig_bytes(state.png, 8);
    png_read_info(state.png, state.info);

    const png_uint_32 w = png_get_image_width(state.png, state.info);
    const png_uint_32 h = png_get_image_height(state.png, state.info);
    const int color_type = png_get_color_type(state.png, state.info);
    bit_depth = png_get_bit_depth(state.png, state.info);

    if (color_type != PNG_COLOR_TYPE_GRAY) {
        throw InputError("input-format",
                         path + ": expected a single-channel grayscale PNG, got color type " +
                             std::to_string(color_type));
    }
    if (bit_depth != 8 && bit_depth != 16) {
        throw InputError("input-format",
                         path + ": expected bit depth 8 or 16, got " + std::to_string(bit_depth));
    }
    if (bit_depth < 16) png_set_expand_gray_1_2_4_to_8(state.png);
    png_read_update_info(state.png, state.info);

    height = static_cast<int>(h);
    width = static_cast<int>(w);
    const std::size_t row_bytes = png_get_rowbytes(state.png, state.info);
    std::vector<std::uint8_t> buffer(row_bytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = buffer.data() + r * row_bytes;
    png_read_image(state.png, rows.data());
    png_read_end(state.png, nullptr);

    samples.resize(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
    for (int r = 0; r < height; ++r) {
        const std::uint8_t* row = buffer.data() + static_cast<std::size_t>(r) * row_bytes;
        for (int c = 0; c < width; ++c) {
            const auto i = static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + c;
            if (bit_depth == 16) {
                // PNG stores 16-bit samples big-endian.
                samples[i] = static_cast<std::uint16_t>((row[2 * c] << 8) | row[2 * c + 1]);
            } else {
                samples[i] = row[c];
            }
        }
    }
}

inline void write_gray16_png(const std::string& path, int height, int width,
                             const std::vector<std::uint16_t>& samples) {
    FileHandle file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw InputError("input-missing", "cannot open " + path + " for writing");
    }
    PngWriteState state;
    state.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (state.png == nullptr) throw InputError("input-format", "libpng init failed");
    state.info = png_create_info_struct(state.png);
    if (state.info == nullptr) throw InputError("input-format", "libpng init failed");
    if (setjmp(png_jmpbuf(state.png))) {
        throw InputError("input-format", path + ": PNG write failed");
    }
    png_init_io(state.png, file.get());
    png_set_IHDR(state.png, state.info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(state.png, state.info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 2);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::uint16_t v =
                samples[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + c];
            row[static_cast<std::size_t>(2 * c)] = static_cast<std::uint8_t>(v >> 8);
            row[static_cast<std::size_t>(2 * c + 1)] = static_cast<std::uint8_t>(v & 0xFF);
        }
        png_write_row(state.png, row.data());
    }
    png_write_end(state.png, nullptr);
}

}  // namespace detail

/// Loads a 16-bit single-channel depth PNG; sample value v is v/1000
/// meters, 0 is invalid.
inline DepthMap load_depth_png16(const std::string& path) {
    int height = 0;
    int width = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
    detail::read_gray_png(path, height, width, bit_depth, samples);
    if (bit_depth != 16) {
        throw InputError("input-format",
                         path + ": expected bit depth 16, got " + std::to_string(bit_depth));
    }
    DepthMap map(height, width);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] == 0) continue;
        map.values[i] = static_cast<double>(samples[i]) / 1000.0;
        map.valid[i] = 1;
    }
    return map;
}

/// Writes a depth map as a 16-bit PNG in integer millimeters; invalid
/// pixels encode as 0. Values must fit the encodable range.
inline void save_depth_png16(const DepthMap& map, const std::string& path) {
    std::vector<std::uint16_t> samples(map.size(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!map.valid[i]) continue;
        const double mm = std::round(map.values[i] * 1000.0);
        if (mm > 65535.0) {
            throw InputError("input-invalid",
                             path + ": depth " + std::to_string(map.values[i]) +
                                 " m exceeds the PNG16 maximum of 65.535 m");
        }
        // Valid depths quantizing to 0 mm would silently become invalid;
        // keep them at the smallest encodable value instead.
        samples[i] = static_cast<std::uint16_t>(std::max(mm, 1.0));
    }
    detail::write_gray16_png(path, map.height, map.width, samples);
}

/// Loads an object mask from an 8- or 16-bit grayscale PNG; any nonzero
/// sample is inside the mask.
inline BoolMask load_mask_png(const std::string& path) {
    int height = 0;
    int width = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
    detail::read_gray_png(path, height, width, bit_depth, samples);
    BoolMask mask(height, width);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        mask.values[i] = samples[i] != 0 ? 1 : 0;
    }
    return mask;
}

/// Writes an object mask as a 16-bit grayscale PNG (65535 inside, 0 outside).
inline void save_mask_png(const BoolMask& mask, const std::string& path) {
    std::vector<std::uint16_t> samples(mask.values.size(), 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (mask.values[i]) samples[i] = 65535;
    }
    detail::write_gray16_png(path, mask.height, mask.width, samples);
}

namespace detail {

inline void append_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline void save_raw_f32(const DepthMap& map, const std::string& path) {
    std::string payload;
    payload.reserve(16 + map.size() * 4);
    payload += "ADPF";
    detail::append_u32_le(payload, 1);
    detail::append_u32_le(payload, static_cast<std::uint32_t>(map.height));
    detail::append_u32_le(payload, static_cast<std::uint32_t>(map.width));
    for (std::size_t i = 0; i < map.size(); ++i) {
        const float v = map.valid[i] ? static_cast<float>(map.values[i])
                                     : std::numeric_limits<float>::quiet_NaN();
        std::uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        detail::append_u32_le(payload, bits);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("input-missing", "cannot open " + path + " for writing");
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw InputError("input-format", "write failed for " + path);
    }
}

inline DepthMap load_raw_f32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("input-missing", "cannot open " + path);
    }
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (data.size() < 16 || std::memcmp(data.data(), "ADPF", 4) != 0) {
        throw InputError("input-format", path + ": bad magic (expected ADPF)");
    }
    const std::uint32_t version = detail::read_u32_le(data.data() + 4);
    if (version != 1) {
        throw InputError("input-format", path + ": unsupported version " + std::to_string(version));
    }
    const std::uint32_t height = detail::read_u32_le(data.data() + 8);
    const std::uint32_t width = detail::read_u32_le(data.data() + 12);
    const std::size_t expected = 16 + static_cast<std::size_t>(height) * width * 4;
    if (height == 0 || width == 0 || data.size() != expected) {
        throw InputError("input-format",
                         path + ": payload size does not match header dimensions");
    }
    DepthMap map(static_cast<int>(height), static_cast<int>(width));
    for (std::size_t i = 0; i < map.size(); ++i) {
        const std::uint32_t bits = detail::read_u32_le(data.data() + 16 + i * 4);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        if (std::isnan(v) || !(v > 0.0f)) continue;  // NaN and non-positive both mean invalid
        map.values[i] = static_cast<double>(v);
        map.valid[i] = 1;
    }
    return map;
}

}  // namespace anchord
