#include "bifeat/image.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bifeat {

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1 || w > 4096 || h > 4096)
        throw std::invalid_argument("GrayImage: dimensions must be in 1..4096, got " +
                                    std::to_string(w) + "x" + std::to_string(h));
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

IntegralImage compute_integral(const GrayImage& img) {
    IntegralImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.data.size());
    for (int y = 0; y < img.height; ++y) {
        std::uint32_t row_sum = 0;
        for (int x = 0; x < img.width; ++x) {
            row_sum += img.at(x, y);
            out.data[static_cast<std::size_t>(y) * img.width + x] =
                row_sum + (y > 0 ? out.at(x, y - 1) : 0u);
        }
    }
    return out;
}

std::int64_t box_sum(const IntegralImage& ii, const Rect& r) {
    if (r.x0 < 0 || r.y0 < 0 || r.x0 > r.x1 || r.y0 > r.y1 || r.x1 >= ii.width || r.y1 >= ii.height)
        throw std::out_of_range("box_sum: rect [" + std::to_string(r.x0) + "," + std::to_string(r.y0) +
                                "]..[" + std::to_string(r.x1) + "," + std::to_string(r.y1) +
                                "] outside " + std::to_string(ii.width) + "x" + std::to_string(ii.height));
    std::int64_t a = ii.at(r.x1, r.y1);
    std::int64_t b = r.x0 > 0 ? ii.at(r.x0 - 1, r.y1) : 0;
    std::int64_t c = r.y0 > 0 ? ii.at(r.x1, r.y0 - 1) : 0;
    std::int64_t d = (r.x0 > 0 && r.y0 > 0) ? ii.at(r.x0 - 1, r.y0 - 1) : 0;
    return a + d - b - c;
}

std::uint32_t pack_coord(int x, int y) {
    if (x < 0 || y < 0 || x >= kCoordLimit || y >= kCoordLimit)
        throw std::out_of_range("pack_coord: coordinate (" + std::to_string(x) + "," +
                                std::to_string(y) + ") outside 0..1023");
    return static_cast<std::uint32_t>(y) * 1024u + static_cast<std::uint32_t>(x);
}

void unpack_coord(std::uint32_t code, int& x, int& y) {
    if (code >= (1u << 20))
        throw std::out_of_range("unpack_coord: code " + std::to_string(code) + " wider than 20 bits");
    x = static_cast<int>(code & 1023u);
    y = static_cast<int>(code >> 10);
}

namespace {

int pgm_next_token(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comment lines, then reads one decimal token.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw std::runtime_error("read_pgm: malformed header in " + path);
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 20) throw std::runtime_error("read_pgm: header value out of range in " + path);
        c = in.get();
    }
    return value;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw std::runtime_error("read_pgm: " + path + " is not a binary PGM (P5)");
    int w = pgm_next_token(in, path);
    int h = pgm_next_token(in, path);
    int maxval = pgm_next_token(in, path);
    if (maxval != 255)
        throw std::runtime_error("read_pgm: " + path + " has maxval " + std::to_string(maxval) +
                                 ", only 255 supported");
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    char header[64];
    std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", img.width, img.height);
    out << header;
    out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

}  // namespace bifeat
