#include "geomlaw/packing_online.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "geomlaw/parallel.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

// open-addressing-friendly key for an integer grid cell; collisions are
// harmless because every candidate is distance-checked
std::uint64_t cell_key(std::span<const double> p, double cell) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (double x : p) {
        const auto c = static_cast<std::int64_t>(std::floor(x / cell));
        h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace

RsaResult rsa_pack(const MarkedPointSet& marked, std::size_t n) {
    if (!marked.has_arrival())
        throw ConfigError("sequential packing requires arrival marks");
    if (n == 0) throw ConfigError("sequential packing requires a positive volume count");
    const std::size_t m = marked.size();
    const int d = marked.points.dim();

    RsaResult out;
    out.radius = std::pow(static_cast<double>(n) * unit_ball_volume(d),
                          -1.0 / static_cast<double>(d));
    out.packed.assign(m, 0);
    if (m == 0) return out;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (marked.arrival[a] != marked.arrival[b])
            return marked.arrival[a] < marked.arrival[b];
        if (!coords_equal(marked.points[a], marked.points[b]))
            return lex_less(marked.points[a], marked.points[b]);
        return a < b;
    });

    const double block = 2.0 * out.radius;  // centers within this distance conflict
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    std::vector<std::int64_t> base(d), probe(d);
    for (std::size_t idx : order) {
        const auto p = marked.points[idx];
        for (int k = 0; k < d; ++k)
            base[k] = static_cast<std::int64_t>(std::floor(p[k] / block));
        bool blocked = false;
        // scan the 3^d neighborhood of the cell
        std::fill(probe.begin(), probe.end(), -1);
        while (!blocked) {
            std::uint64_t h = 0x9e3779b97f4a7c15ull;
            for (int k = 0; k < d; ++k) {
                const std::uint64_t c = static_cast<std::uint64_t>(base[k] + probe[k]);
                h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            if (auto it = grid.find(h); it != grid.end()) {
                for (std::size_t j : it->second) {
                    double s = 0.0;
                    const auto q = marked.points[j];
                    for (int k = 0; k < d; ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
                    if (std::sqrt(s) <= block) {
                        blocked = true;
                        break;
                    }
                }
            }
            int k = 0;
            while (k < d && probe[k] == 1) probe[k++] = -1;
            if (k == d) break;
            ++probe[k];
        }
        if (!blocked) {
            out.packed[idx] = 1;
            ++out.count;
            grid[cell_key(p, block)].push_back(idx);
        }
    }
    return out;
}

std::vector<RsaRow> rsa_fraction_experiment(const DensitySpec& density,
                                            const std::vector<std::size_t>& n_grid,
                                            std::size_t replicates, std::uint64_t seed,
                                            unsigned threads) {
    if (n_grid.empty()) throw ConfigError("packing experiment requires a size grid");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw ConfigError("packing experiment size grid must be ascending");
    for (std::size_t n : n_grid)
        if (n == 0) throw ConfigError("packing experiment sizes must be positive");
    if (replicates == 0) throw ConfigError("packing experiment requires replicates");

    std::vector<RsaRow> rows;
    rows.reserve(n_grid.size());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        std::vector<double> frac(replicates, 0.0);
        parallel_for_index(replicates, threads, [&](std::size_t rep) {
            const std::uint64_t pseed =
                derive_seed(seed, "rsa.points", gi * replicates + rep);
            const std::uint64_t mseed =
                derive_seed(seed, "rsa.marks", gi * replicates + rep);
            MarkedPointSet marked =
                attach_arrival_marks(sample_binomial(density, n, pseed), mseed);
            const RsaResult res = rsa_pack(marked, n);
            frac[rep] = static_cast<double>(res.count) / static_cast<double>(n);
        });
        RsaRow row;
        row.n = n;
        row.replicates = replicates;
        for (double v : frac) row.mean += v;
        row.mean /= static_cast<double>(replicates);
        if (replicates > 1) {
            double ss = 0.0;
            for (double v : frac) ss += (v - row.mean) * (v - row.mean);
            row.stderr_ = std::sqrt(ss / (static_cast<double>(replicates - 1) *
                                          static_cast<double>(replicates)));
        }
        rows.push_back(row);
    }
    return rows;
}

void write_rsa_csv(std::ostream& os, const std::vector<RsaRow>& rows) {
    os << "n,mean,stderr,replicates\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.mean) << ',' << format_double(r.stderr_)
           << ',' << r.replicates << '\n';
}

void write_rsa_csv_file(const std::string& path, const std::vector<RsaRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    write_rsa_csv(os, rows);
}

}  // namespace geomlaw
