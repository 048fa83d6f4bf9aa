#include "choroid/io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace choroid::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) raise(ErrorCode::IoError, "cannot open " + path.string());
    return f;
}

GrayFile read_png(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::IoError, "libpng init failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::IoError, "corrupt PNG: " + path.string());
    }

    png_init_io(png, f.get());
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::InvalidArgument, "not an 8/16-bit grayscale PNG: " + path.string());
    }
    if (depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        depth = 8;
    }
#if __BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__
    if (depth == 16) png_set_swap(png);
#endif
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));

    GrayFile out;
    out.bit_depth = depth;
    out.image = Image(h, w);
    const float scale = 1.0f / ((depth == 16) ? 65535.0f : 255.0f);

    if (depth == 16) {
        std::vector<uint16_t> row(w);
        for (int r = 0; r < h; ++r) {
            png_read_row(png, reinterpret_cast<png_bytep>(row.data()), nullptr);
            for (int c = 0; c < w; ++c) out.image.at(r, c) = row[c] * scale;
        }
    } else {
        std::vector<uint8_t> row(w);
        for (int r = 0; r < h; ++r) {
            png_read_row(png, row.data(), nullptr);
            for (int c = 0; c < w; ++c) out.image.at(r, c) = row[c] * scale;
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png_impl(const std::filesystem::path& path, const Image& img, int depth) {
    FilePtr f = open_file(path, "wb");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        raise(ErrorCode::IoError, "libpng init failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        raise(ErrorCode::IoError, "PNG write failure: " + path.string());
    }

    png_init_io(png, f.get());
    png_set_IHDR(png, info, img.width, img.height, depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
#if __BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__
    if (depth == 16) png_set_swap(png);
#endif

    const float maxval = (depth == 16) ? 65535.0f : 255.0f;
    auto quantize = [&](float v) {
        v = std::min(1.0f, std::max(0.0f, v));
        return static_cast<uint32_t>(std::lround(v * maxval));
    };

    if (depth == 16) {
        std::vector<uint16_t> row(img.width);
        for (int r = 0; r < img.height; ++r) {
            for (int c = 0; c < img.width; ++c) row[c] = static_cast<uint16_t>(quantize(img.at(r, c)));
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    } else {
        std::vector<uint8_t> row(img.width);
        for (int r = 0; r < img.height; ++r) {
            for (int c = 0; c < img.width; ++c) row[c] = static_cast<uint8_t>(quantize(img.at(r, c)));
            png_write_row(png, row.data());
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

int pgm_next_value(std::istream& in) {
    // skips whitespace and '#' comments between tokens
    while (true) {
        int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    if (!in) raise(ErrorCode::IoError, "truncated PGM header");
    return v;
}

GrayFile read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    const bool binary = magic[1] == '5';
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        raise(ErrorCode::InvalidArgument, "not a P2/P5 PGM: " + path.string());

    const int w = pgm_next_value(in);
    const int h = pgm_next_value(in);
    const int maxval = pgm_next_value(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        raise(ErrorCode::IoError, "bad PGM header: " + path.string());

    GrayFile out;
    out.bit_depth = maxval > 255 ? 16 : 8;
    out.image = Image(h, w);
    const float scale = 1.0f / static_cast<float>(maxval);

    if (binary) {
        in.get();  // single whitespace after maxval
        if (maxval > 255) {
            std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
            if (!in) raise(ErrorCode::IoError, "truncated PGM data");
            for (size_t i = 0; i < out.image.size(); ++i) {
                // P5 16-bit samples are big-endian
                out.image.data[i] = static_cast<float>((buf[2 * i] << 8) | buf[2 * i + 1]) * scale;
            }
        } else {
            std::vector<uint8_t> buf(static_cast<size_t>(w) * h);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
            if (!in) raise(ErrorCode::IoError, "truncated PGM data");
            for (size_t i = 0; i < out.image.size(); ++i) out.image.data[i] = buf[i] * scale;
        }
    } else {
        for (size_t i = 0; i < out.image.size(); ++i) {
            int v;
            in >> v;
            if (!in) raise(ErrorCode::IoError, "truncated PGM data");
            out.image.data[i] = static_cast<float>(v) * scale;
        }
    }
    return out;
}

} // namespace

GrayFile read_grayscale(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) raise(ErrorCode::IoError, "cannot open " + path.string());
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();

    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path);
    return read_png(path);
}

void write_png8(const std::filesystem::path& path, const Image& img) { write_png_impl(path, img, 8); }
void write_png16(const std::filesystem::path& path, const Image& img) { write_png_impl(path, img, 16); }

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
    Image img(mask.height, mask.width);
    for (size_t i = 0; i < mask.size(); ++i) img.data[i] = mask.data[i] ? 1.0f : 0.0f;
    write_png_impl(path, img, 8);
}

Mask read_mask_png(const std::filesystem::path& path, float threshold) {
    GrayFile g = read_grayscale(path);
    Mask m(g.image.height, g.image.width);
    for (size_t i = 0; i < m.size(); ++i) m.data[i] = g.image.data[i] >= threshold ? 1 : 0;
    return m;
}

void write_pmap(const std::filesystem::path& path, const Image& pmap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path.string());
    out << "{\"height\":" << pmap.height << ",\"width\":" << pmap.width << "}\n";
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(pmap.data.data()),
              static_cast<std::streamsize>(pmap.size() * sizeof(float)));
    if (!out) raise(ErrorCode::IoError, "short write: " + path.string());
}

Image read_pmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception&) {
        raise(ErrorCode::IoError, "bad .pmap header: " + path.string());
    }
    const int h = j.value("height", 0);
    const int w = j.value("width", 0);
    if (h <= 0 || w <= 0) raise(ErrorCode::IoError, "bad .pmap dims: " + path.string());

    Image img(h, w);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(img.size() * sizeof(float)))
        raise(ErrorCode::IoError, "truncated .pmap: " + path.string());
    return img;
}

Image read_probability_map(const std::filesystem::path& path) {
    if (path.extension() == ".pmap") return read_pmap(path);
    GrayFile g = read_grayscale(path);
    return g.image;
}

} // namespace choroid::io
