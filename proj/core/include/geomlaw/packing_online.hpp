#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geomlaw/density.hpp"
#include "geomlaw/point_process.hpp"

namespace geomlaw {

// Sequential (on-line) packing of equal balls of volume 1/n driven by
// arrival-time marks: a ball is kept iff it does not overlap any earlier
// kept ball. Overlap is closed, so centers at distance exactly 2*radius
// block each other.
struct RsaResult {
    std::vector<std::uint8_t> packed;  // per ball, in input index order
    std::size_t count = 0;             // number packed
    double radius = 0.0;               // common ball radius (n * omega_d)^(-1/d)
};

// Packs the arrival-marked points. Arrival ties are broken by point
// lexicographic order, then by index. Throws ConfigError when arrival marks
// are missing or n is zero.
RsaResult rsa_pack(const MarkedPointSet& marked, std::size_t n);

struct RsaRow {
    std::size_t n = 0;
    double mean = 0.0;     // mean packed fraction N/n across replicates
    double stderr_ = 0.0;  // standard error of that mean
    std::size_t replicates = 0;
};

// Packed-fraction table over an ascending n grid; replicates are independent
// draws from the density (points and arrival marks from derived streams).
std::vector<RsaRow> rsa_fraction_experiment(const DensitySpec& density,
                                            const std::vector<std::size_t>& n_grid,
                                            std::size_t replicates, std::uint64_t seed,
                                            unsigned threads = 1);

// CSV rows: n,mean,stderr,replicates (header included).
void write_rsa_csv(std::ostream& os, const std::vector<RsaRow>& rows);
void write_rsa_csv_file(const std::string& path, const std::vector<RsaRow>& rows);

}  // namespace geomlaw
