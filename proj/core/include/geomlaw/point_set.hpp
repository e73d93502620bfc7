#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace geomlaw {

// Flat storage for a set of d-dimensional points.  Duplicates are allowed;
// index order is preserved.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(int dim);
    PointSet(int dim, std::vector<double> coords);

    int dim() const { return dim_; }
    std::size_t size() const;
    bool empty() const { return coords_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }

    void add(std::span<const double> p);
    void add(std::initializer_list<double> p);
    void reserve(std::size_t n);
    void clear() { coords_.clear(); }

    const std::vector<double>& raw() const { return coords_; }

    PointSet translated(std::span<const double> shift) const;
    PointSet scaled(double factor) const;

    // CSV: one point per row, comma-separated, '.' decimal, LF line ends.
    // The optional header row is "x0,...,x{d-1}".
    void write_csv(std::ostream& os, bool header = false) const;
    static PointSet read_csv(std::istream& is, int dim);
    static PointSet read_csv_file(const std::string& path, int dim);
    void write_csv_file(const std::string& path, bool header = false) const;

private:
    int dim_ = 0;
    std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

// Coordinatewise lexicographic order; the tie-breaker used everywhere.
bool lex_less(std::span<const double> a, std::span<const double> b);
bool coords_equal(std::span<const double> a, std::span<const double> b);

// Axis-aligned box or closed ball observation window.
class Window {
public:
    enum class Kind { box, ball };

    static Window box(std::vector<double> lo, std::vector<double> hi);
    static Window ball(std::vector<double> center, double radius);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double volume() const;
    bool contains(std::span<const double> p) const;
    Window bounding_box() const;

    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Kind kind_ = Kind::box;
    int dim_ = 0;
    std::vector<double> lo_, hi_;     // box
    std::vector<double> center_;      // ball
    double radius_ = 0.0;
};

}  // namespace geomlaw
