#include "geomlaw/point_set.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "geomlaw/util.hpp"

namespace geomlaw {

PointSet::PointSet(int dim) : dim_(dim) {
    if (dim <= 0) throw std::invalid_argument("PointSet: dim must be >= 1");
}

PointSet::PointSet(int dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim <= 0) throw std::invalid_argument("PointSet: dim must be >= 1");
    if (coords_.size() % static_cast<std::size_t>(dim) != 0)
        throw std::invalid_argument("PointSet: coord count not divisible by dim");
}

std::size_t PointSet::size() const {
    return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_);
}

void PointSet::add(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim_)
        throw std::invalid_argument("PointSet::add: wrong dimension");
    coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointSet::add(std::initializer_list<double> p) {
    add(std::span<const double>(p.begin(), p.size()));
}

void PointSet::reserve(std::size_t n) {
    coords_.reserve(n * static_cast<std::size_t>(dim_));
}

PointSet PointSet::translated(std::span<const double> shift) const {
    if (static_cast<int>(shift.size()) != dim_)
        throw std::invalid_argument("translated: wrong shift dimension");
    PointSet out = *this;
    for (std::size_t i = 0; i < out.coords_.size(); ++i)
        out.coords_[i] += shift[i % static_cast<std::size_t>(dim_)];
    return out;
}

PointSet PointSet::scaled(double factor) const {
    PointSet out = *this;
    for (double& c : out.coords_) c *= factor;
    return out;
}

void PointSet::write_csv(std::ostream& os, bool header) const {
    if (header) {
        for (int j = 0; j < dim_; ++j) {
            if (j) os << ',';
            os << 'x' << j;
        }
        os << '\n';
    }
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        auto p = (*this)[i];
        for (int j = 0; j < dim_; ++j) {
            if (j) os << ',';
            os << format_double(p[static_cast<std::size_t>(j)]);
        }
        os << '\n';
    }
}

PointSet PointSet::read_csv(std::istream& is, int dim) {
    PointSet out(dim);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("x0", 0) == 0) continue;  // header row
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            std::string_view field(line.data() + start,
                                   (comma == std::string::npos ? line.size() : comma) - start);
            try {
                row.push_back(parse_double(field));
            } catch (const ConfigError&) {
                throw ConfigError("points csv line " + std::to_string(lineno) +
                                  ": invalid numeric field '" + std::string(field) + "'");
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (static_cast<int>(row.size()) != dim)
            throw ConfigError("points csv line " + std::to_string(lineno) + ": expected " +
                              std::to_string(dim) + " columns, got " +
                              std::to_string(row.size()));
        out.add(row);
    }
    return out;
}

PointSet PointSet::read_csv_file(const std::string& path, int dim) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open points file '" + path + "'");
    return read_csv(is, dim);
}

void PointSet::write_csv_file(const std::string& path, bool header) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write points file '" + path + "'");
    write_csv(os, header);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < b[j]) return true;
        if (a[j] > b[j]) return false;
    }
    return false;
}

bool coords_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] != b[j]) return false;
    return true;
}

Window Window::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("Window::box: lo/hi size mismatch");
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (!(lo[j] < hi[j]))
            throw std::invalid_argument("Window::box: lo must be < hi per axis");
    Window w;
    w.kind_ = Kind::box;
    w.dim_ = static_cast<int>(lo.size());
    w.lo_ = std::move(lo);
    w.hi_ = std::move(hi);
    return w;
}

Window Window::ball(std::vector<double> center, double radius) {
    if (center.empty())
        throw std::invalid_argument("Window::ball: empty center");
    if (!(radius > 0.0))
        throw std::invalid_argument("Window::ball: radius must be > 0");
    Window w;
    w.kind_ = Kind::ball;
    w.dim_ = static_cast<int>(center.size());
    w.center_ = std::move(center);
    w.radius_ = radius;
    return w;
}

double Window::volume() const {
    if (kind_ == Kind::box) {
        double v = 1.0;
        for (std::size_t j = 0; j < lo_.size(); ++j) v *= hi_[j] - lo_[j];
        return v;
    }
    return unit_ball_volume(dim_) * std::pow(radius_, dim_);
}

bool Window::contains(std::span<const double> p) const {
    if (kind_ == Kind::box) {
        for (std::size_t j = 0; j < lo_.size(); ++j)
            if (p[j] < lo_[j] || p[j] > hi_[j]) return false;
        return true;
    }
    return squared_distance(p, center_) <= radius_ * radius_;
}

Window Window::bounding_box() const {
    if (kind_ == Kind::box) return *this;
    std::vector<double> lo(center_), hi(center_);
    for (std::size_t j = 0; j < lo.size(); ++j) {
        lo[j] -= radius_;
        hi[j] += radius_;
    }
    return Window::box(std::move(lo), std::move(hi));
}

}  // namespace geomlaw
