#include "scout/dedup.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "scout/util.hpp"

namespace scout {

std::uint64_t dhash(const GrayImage& img) {
    if (img.width < 1 || img.height < 1 ||
        img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
        throw std::invalid_argument("dhash: empty or inconsistent image");

    // Box-filter resample to 9 wide x 8 tall. Cells that would collapse on
    // tiny images take a single source row/column instead.
    double cell[8][9];
    for (int r = 0; r < 8; ++r) {
        int r0 = r * img.height / 8;
        int r1 = (r + 1) * img.height / 8;
        if (r1 == r0) r1 = r0 + 1;
        for (int c = 0; c < 9; ++c) {
            int c0 = c * img.width / 9;
            int c1 = (c + 1) * img.width / 9;
            if (c1 == c0) c1 = c0 + 1;
            double sum = 0.0;
            for (int y = r0; y < r1; ++y)
                for (int x = c0; x < c1; ++x) sum += img.at(y, x);
            cell[r][c] = sum / (static_cast<double>(r1 - r0) * (c1 - c0));
        }
    }

    std::uint64_t bits = 0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            if (cell[r][c + 1] > cell[r][c]) bits |= std::uint64_t{1} << (r * 8 + c);
    return bits;
}

std::string CollisionReport::formatted() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu (%.2f%%)", count, fraction * 100.0);
    return buf;
}

CollisionReport count_collisions(std::span<const std::uint64_t> reference,
                                 std::span<const std::uint64_t> probes, int max_hamming) {
    if (max_hamming < 0 || max_hamming > 64)
        throw std::invalid_argument("count_collisions: max_hamming outside [0, 64]");
    CollisionReport rep;
    if (probes.empty()) {
        rep.empty_probe = true;
        return rep;
    }
    for (std::uint64_t p : probes) {
        for (std::uint64_t r : reference) {
            if (std::popcount(p ^ r) <= max_hamming) {
                ++rep.count;
                break;
            }
        }
    }
    rep.fraction = static_cast<double>(rep.count) / static_cast<double>(probes.size());
    return rep;
}

namespace {

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) throw ConfigError("pnm: truncated header");
    return tok;
}

double pnm_sample(std::istream& in, bool binary, int maxval) {
    if (binary) {
        int hi = in.get();
        if (hi == EOF) throw ConfigError("pnm: truncated pixel data");
        int v = hi;
        if (maxval > 255) {
            int lo = in.get();
            if (lo == EOF) throw ConfigError("pnm: truncated pixel data");
            v = (hi << 8) | lo;
        }
        return v * 255.0 / maxval;
    }
    return parse_double(pnm_token(in), "pnm pixel") * 255.0 / maxval;
}

} // namespace

GrayImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("pnm: cannot open '" + path + "'");
    std::string magic = pnm_token(in);
    bool color, binary;
    if (magic == "P2") color = false, binary = false;
    else if (magic == "P3") color = true, binary = false;
    else if (magic == "P5") color = false, binary = true;
    else if (magic == "P6") color = true, binary = true;
    else throw ConfigError("pnm: unsupported format '" + magic + "' in '" + path + "'");

    GrayImage img;
    img.width = static_cast<int>(parse_int(pnm_token(in), "pnm width"));
    img.height = static_cast<int>(parse_int(pnm_token(in), "pnm height"));
    int maxval = static_cast<int>(parse_int(pnm_token(in), "pnm maxval"));
    if (img.width < 1 || img.height < 1 || maxval < 1 || maxval > 65535)
        throw ConfigError("pnm: bad dimensions in '" + path + "'");
    // The single whitespace byte after maxval was already consumed by
    // pnm_token's terminator for binary variants.
    img.pixels.reserve(static_cast<std::size_t>(img.width) * img.height);
    for (std::size_t i = 0, n = static_cast<std::size_t>(img.width) * img.height; i < n; ++i) {
        if (color) {
            double r = pnm_sample(in, binary, maxval);
            double g = pnm_sample(in, binary, maxval);
            double b = pnm_sample(in, binary, maxval);
            img.pixels.push_back(0.299 * r + 0.587 * g + 0.114 * b);
        } else {
            img.pixels.push_back(pnm_sample(in, binary, maxval));
        }
    }
    return img;
}

std::vector<std::uint64_t> load_hash_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("hash list: cannot open '" + path + "'");
    std::vector<std::uint64_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v, 16);
        if (ec != std::errc{} || p != sv.data() + sv.size())
            throw ConfigError("hash list: bad hex at line " + std::to_string(lineno));
        out.push_back(v);
    }
    return out;
}

} // namespace scout
