// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/image.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eyevol {

double srgb_encode(double x) {
    constexpr double kSlopeAtOne = 1.055 / 2.4;  // d/dx (1.055 x^(1/2.4) - 0.055) at x = 1
    if (x < 0) return 12.92 * x;
    if (x <= 0.0031308) return 12.92 * x;
    if (x <= 1.0) return 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
    return 1.0 + kSlopeAtOne * (x - 1.0);
}

double srgb_decode(double y) {
    constexpr double kSlopeAtOne = 1.055 / 2.4;
    if (y < 0) return y / 12.92;
    if (y <= 0.04045) return y / 12.92;
    if (y <= 1.0) return std::pow((y + 0.055) / 1.055, 2.4);
    return 1.0 + (y - 1.0) / kSlopeAtOne;
}

static void check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw std::runtime_error("image: nonpositive dimensions");
}

void write_pfm(const std::string& path, const Image3f& img) {
    check_dims(img.width, img.height);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pfm: cannot open for write: " + path);
    out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    // PFM stores rows bottom-up.
    for (int y = img.height - 1; y >= 0; y--) {
        const float* row = &img.data[3 * size_t(y) * img.width];
        out.write(reinterpret_cast<const char*>(row), std::streamsize(3 * sizeof(float)) * img.width);
    }
    if (!out) throw std::runtime_error("pfm: write failed: " + path);
}

Image3f read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pfm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "PF") throw std::runtime_error("pfm: expected color PF file: " + path);
    int w = 0, h = 0;
    double scale = 0;
    in >> w >> h >> scale;
    in.get();  // single whitespace after the header
    check_dims(w, h);
    if (scale == 0) throw std::runtime_error("pfm: zero scale: " + path);
    bool little_endian = scale < 0;
    Image3f img(w, h);
    for (int y = h - 1; y >= 0; y--) {
        float* row = &img.data[3 * size_t(y) * w];
        in.read(reinterpret_cast<char*>(row), std::streamsize(3 * sizeof(float)) * w);
    }
    if (!in) throw std::runtime_error("pfm: truncated file: " + path);
    if (!little_endian) {
        for (auto& f : img.data) {
            uint32_t v;
            std::memcpy(&v, &f, 4);
            v = __builtin_bswap32(v);
            std::memcpy(&f, &v, 4);
        }
    }
    double mag = std::fabs(scale);
    if (mag != 1.0)
        for (auto& f : img.data) f = float(f * mag);
    return img;
}

void write_ppm(const std::string& path, const Image3f& img) {
    check_dims(img.width, img.height);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("ppm: cannot open for write: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> row(size_t(3) * img.width);
    for (int y = 0; y < img.height; y++) {
        for (int x = 0; x < img.width; x++) {
            Rgb c = img.at(x, y);
            for (int ch = 0; ch < 3; ch++) {
                double e = srgb_encode(clamp(c[ch], 0.0, 1.0));
                row[3 * x + ch] = uint8_t(std::lround(clamp(e, 0.0, 1.0) * 255.0));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw std::runtime_error("ppm: write failed: " + path);
}

Image3f read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ppm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error("ppm: expected binary P6 file: " + path);
    auto next_token = [&in, &path]() {
        std::string tok;
        for (;;) {
            in >> tok;
            if (!in) throw std::runtime_error("ppm: truncated header: " + path);
            if (tok[0] == '#') { std::string rest; std::getline(in, rest); continue; }
            return tok;
        }
    };
    int w = std::stoi(next_token());
    int h = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    in.get();
    check_dims(w, h);
    if (maxval != 255) throw std::runtime_error("ppm: only maxval 255 supported: " + path);
    Image3f img(w, h);
    std::vector<uint8_t> row(size_t(3) * w);
    for (int y = 0; y < h; y++) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
        if (!in) throw std::runtime_error("ppm: truncated data: " + path);
        for (int x = 0; x < w; x++) {
            Rgb c{srgb_decode(row[3 * x + 0] / 255.0), srgb_decode(row[3 * x + 1] / 255.0),
                  srgb_decode(row[3 * x + 2] / 255.0)};
            img.set(x, y, c);
        }
    }
    return img;
}

double image_mse(const Image3f& a, const Image3f& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::runtime_error("image_mse: dimension mismatch");
    double sum = 0;
    for (size_t i = 0; i < a.data.size(); i += 3) {
        for (int ch = 0; ch < 3; ch++) {
            double d = double(a.data[i + ch]) - double(b.data[i + ch]);
            sum += d * d;
        }
    }
    return sum / (double(a.width) * a.height);
}

}  // namespace eyevol
