#ifndef SEATEX_IMAGE_IO_HPP
#define SEATEX_IMAGE_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

namespace seatex::io {

/// Single-channel image as read from disk, before any normalization.
struct GrayImage {
    int width = 0;
    int height = 0;
    int bit_depth = 8; // 8 or 16
    std::vector<std::uint16_t> pixels; // row-major

    std::size_t size() const { return pixels.size(); }
};

namespace detail {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

inline void skip_pgm_whitespace(std::istream& in) {
    for (;;) {
        int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            in.get();
        } else {
            return;
        }
    }
}

} // namespace detail

inline bool is_png_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {0};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

/// Reads an 8- or 16-bit grayscale PNG. Color, palette, and alpha images are rejected.
inline GrayImage read_png(const std::string& path) {
    detail::FileCloser file{std::fopen(path.c_str(), "rb")};
    if (!file.f) throw std::runtime_error("cannot open file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("failed to read PNG: " + path);
    }

    png_init_io(png, file.f);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("unsupported PNG format (grayscale only): " + path);
    }
    if (bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    png_read_update_info(png, info);

    GrayImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.bit_depth = bit_depth;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> row(row_bytes);
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        if (bit_depth == 16) {
            for (int x = 0; x < img.width; ++x) {
                img.pixels[static_cast<std::size_t>(y) * img.width + x] =
                    static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
            }
        } else {
            for (int x = 0; x < img.width; ++x) {
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = row[x];
            }
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

/// Reads a binary PGM (P5), 8- or 16-bit (big-endian samples when maxval > 255).
inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("unsupported PGM format (binary P5 only): " + path);

    detail::skip_pgm_whitespace(in);
    int width = 0, height = 0, maxval = 0;
    in >> width;
    detail::skip_pgm_whitespace(in);
    in >> height;
    detail::skip_pgm_whitespace(in);
    in >> maxval;
    if (!in || width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw std::runtime_error("malformed PGM header: " + path);
    in.get(); // single whitespace byte before raster data

    GrayImage img;
    img.width = width;
    img.height = height;
    img.bit_depth = maxval > 255 ? 16 : 8;
    img.pixels.resize(static_cast<std::size_t>(width) * height);

    if (img.bit_depth == 16) {
        std::vector<unsigned char> raw(img.pixels.size() * 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw std::runtime_error("truncated PGM data: " + path);
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    } else {
        std::vector<unsigned char> raw(img.pixels.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw std::runtime_error("truncated PGM data: " + path);
        for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = raw[i];
    }
    return img;
}

/// Reads a grayscale image, dispatching on the PNG signature vs the PGM magic.
inline GrayImage read_gray_image(const std::string& path) {
    if (is_png_file(path)) return read_png(path);
    return read_pgm(path);
}

namespace detail {

inline void write_png_gray(const std::string& path, int width, int height, int bit_depth,
                           const unsigned char* bytes) {
    FileCloser file{std::fopen(path.c_str(), "wb")};
    if (!file.f) throw std::runtime_error("cannot write file: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("failed to write PNG: " + path);
    }

    png_init_io(png, file.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t row_bytes = static_cast<std::size_t>(width) * (bit_depth / 8);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(bytes + static_cast<std::size_t>(y) * row_bytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace detail

inline void write_png_gray8(const std::string& path, int width, int height,
                            const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("pixel buffer size mismatch");
    detail::write_png_gray(path, width, height, 8, pixels.data());
}

inline void write_png_gray16(const std::string& path, int width, int height,
                             const std::vector<std::uint16_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("pixel buffer size mismatch");
    std::vector<unsigned char> bytes(pixels.size() * 2);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        bytes[2 * i] = static_cast<unsigned char>(pixels[i] >> 8);
        bytes[2 * i + 1] = static_cast<unsigned char>(pixels[i] & 0xff);
    }
    detail::write_png_gray(path, width, height, 16, bytes.data());
}

} // namespace seatex::io

#endif
