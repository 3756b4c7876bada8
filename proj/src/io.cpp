#include "mmf/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace mmf {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what, std::streamoff off) {
    throw std::runtime_error(path + ": " + what + " at byte " + std::to_string(off));
}

// PNM token reader: skips whitespace and '#' comment lines.
int read_pnm_int(std::istream& in, const std::string& path) {
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
        } else if (!std::isspace(ch)) {
            break;
        }
    }
    if (ch == EOF) fail(path, "unexpected end of header", in.tellg());
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) fail(path, "expected integer in header", std::streamoff(in.tellg()) - 1);
    return value;
}

float to_le_float(float v) {
    static_assert(sizeof(float) == 4);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u = __builtin_bswap32(u);
    std::memcpy(&v, &u, 4);
#endif
    return v;
}

}  // namespace

MultiChannelImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    char m0 = char(in.get()), m1 = char(in.get());
    int channels;
    if (m0 == 'P' && m1 == '6')
        channels = 3;
    else if (m0 == 'P' && m1 == '5')
        channels = 1;
    else
        fail(path, "not a binary PPM/PGM (magic P5/P6)", 0);
    const int w = read_pnm_int(in, path);
    const int h = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (w <= 0 || h <= 0) fail(path, "bad dimensions", in.tellg());
    if (maxval != 255) fail(path, "unsupported maxval " + std::to_string(maxval), in.tellg());

    MultiChannelImage img = MultiChannelImage::make2d(w, h, channels);
    const std::size_t bytes = std::size_t(w) * std::size_t(h) * std::size_t(channels);
    std::vector<unsigned char> buf(bytes);
    const std::streamoff payload = in.tellg();
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(bytes));
    if (std::size_t(in.gcount()) != bytes)
        fail(path, "truncated payload", payload + in.gcount());
    for (std::size_t i = 0; i < bytes; ++i) img.data[i] = buf[i] / 255.0;
    return img;
}

void write_image(const std::string& path, const MultiChannelImage& img) {
    if (img.dims != 2 || (img.channels != 1 && img.channels != 3))
        throw std::runtime_error(path + ": only planar 1- or 3-channel images");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.nx << " " << img.ny << "\n255\n";
    std::vector<unsigned char> buf(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

MultiChannelImage read_flow(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic;
    int w = 0, h = 0;
    in >> magic >> w >> h;
    if (magic != "FLO2" || !in) fail(path, "bad FLO2 header", 0);
    if (w <= 0 || h <= 0) fail(path, "bad dimensions", in.tellg());
    if (in.get() != '\n') fail(path, "expected newline after header", in.tellg());

    MultiChannelImage img = MultiChannelImage::make2d(w, h, 2);
    const std::size_t count = std::size_t(w) * std::size_t(h) * 2;
    std::vector<float> buf(count);
    const std::streamoff payload = in.tellg();
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(count * 4));
    if (std::size_t(in.gcount()) != count * 4)
        fail(path, "truncated payload", payload + in.gcount());
    for (std::size_t i = 0; i < count; ++i) img.data[i] = double(to_le_float(buf[i]));
    return img;
}

void write_flow(const std::string& path, const MultiChannelImage& img) {
    if (img.dims != 2 || img.channels != 2)
        throw std::invalid_argument("flow files need a planar 2-channel image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "FLO2 " << img.nx << " " << img.ny << "\n";
    std::vector<float> buf(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        buf[i] = to_le_float(float(img.data[i]));
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * 4));
    if (!out) throw std::runtime_error(path + ": write failed");
}

MultiChannelImage add_impulse_noise(const MultiChannelImage& img, double density, double lo,
                                    double hi, std::uint64_t seed) {
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("noise density must be in [0,1]");
    MultiChannelImage out = img;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> draw(lo, hi);
    for (double& v : out.data)
        if (coin(rng) < density) v = draw(rng);
    return out;
}

}  // namespace mmf
