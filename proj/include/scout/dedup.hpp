#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scout {

/// Row-major grayscale intensities, nominally in [0, 255]. Values are kept
/// as doubles so synthetic shifts need no clipping.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
};

/// Difference hash: box-filter the image to 9 columns x 8 rows, set
/// bit(r, c) = 1 iff cell(r, c+1) > cell(r, c), pack row-major with
/// bit 0 = (0, 0). Invariant to additive intensity shifts.
std::uint64_t dhash(const GrayImage& img);

struct CollisionReport {
    std::size_t count = 0;   // probes matching some reference hash
    double fraction = 0.0;   // count / |probes|
    bool empty_probe = false;

    /// Table-style cell: "21 (0.57%)".
    std::string formatted() const;
};

/// How many of `probes` fall within `max_hamming` bits of any `reference`
/// hash; fraction is relative to the probe set.
CollisionReport count_collisions(std::span<const std::uint64_t> reference,
                                 std::span<const std::uint64_t> probes, int max_hamming = 0);

/// Loads P2/P5 graymaps and P3/P6 pixmaps; color converts via Rec.601 luma.
GrayImage load_pnm(const std::string& path);

/// One hex hash per line; blank lines and '#' comments skipped.
std::vector<std::uint64_t> load_hash_list(const std::string& path);

} // namespace scout
