#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lppd {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a computation would exceed a configured size or retry cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Coord = std::int64_t;

struct Point {
    Coord x = 0;
    Coord y = 0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr auto operator<=>(const Point&, const Point&) = default;

    constexpr Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    constexpr Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    constexpr Point operator-() const { return {-x, -y}; }
    constexpr Coord sum() const { return x + y; }
};

inline constexpr Point e1{1, 0};
inline constexpr Point e2{0, 1};
inline constexpr Point diag{1, 1};

/// Componentwise order on Z^2.
constexpr bool leq(const Point& a, const Point& b) { return a.x <= b.x && a.y <= b.y; }

constexpr Point cmin(const Point& a, const Point& b) {
    return {a.x < b.x ? a.x : b.x, a.y < b.y ? a.y : b.y};
}
constexpr Point cmax(const Point& a, const Point& b) {
    return {a.x > b.x ? a.x : b.x, a.y > b.y ? a.y : b.y};
}

std::ostream& operator<<(std::ostream& os, const Point& p);
std::string to_string(const Point& p);

/// Inclusive integer rectangle [x_min, x_max] x [y_min, y_max].
struct Region {
    Coord x_min = 0;
    Coord y_min = 0;
    Coord x_max = 0;
    Coord y_max = 0;

    friend constexpr bool operator==(const Region&, const Region&) = default;

    static Region box(Point lo, Point hi) { return {lo.x, lo.y, hi.x, hi.y}; }

    constexpr Point lower() const { return {x_min, y_min}; }
    constexpr Point upper() const { return {x_max, y_max}; }
    constexpr Coord width() const { return x_max - x_min + 1; }
    constexpr Coord height() const { return y_max - y_min + 1; }
    constexpr bool contains(const Point& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    constexpr bool contains(const Region& r) const {
        return contains(r.lower()) && contains(r.upper());
    }

    /// Throws DomainError unless x_min <= x_max and y_min <= y_max.
    void validate() const;
    /// Number of sites; throws ResourceError if the count overflows.
    std::uint64_t area() const;
};

enum class Orientation { up_right, down_left };

/// Ordered lattice points joined by unit steps in one orientation.
struct LatticePath {
    std::vector<Point> points;
    Orientation orientation = Orientation::up_right;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    const Point& front() const { return points.front(); }
    const Point& back() const { return points.back(); }

    /// True when consecutive points differ by +e1/+e2 (or -e1/-e2 for down_left).
    bool is_valid() const;
};

/// Signed exit (or crossing) location on the positive axes: z > 0 is (z,0),
/// z < 0 is (0,-z). Zero is not a valid value.
class ExitPoint {
public:
    explicit ExitPoint(Coord z);
    static ExitPoint from_axis_point(const Point& p);

    Coord value() const { return z_; }
    Point point() const { return z_ > 0 ? Point{z_, 0} : Point{0, -z_}; }

    friend bool operator==(const ExitPoint&, const ExitPoint&) = default;
    friend auto operator<=>(const ExitPoint&, const ExitPoint&) = default;

private:
    Coord z_;
};

} // namespace lppd

template <>
struct std::hash<lppd::Point> {
    std::size_t operator()(const lppd::Point& p) const noexcept {
        return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL ^
                                          static_cast<std::uint64_t>(p.y));
    }
};
