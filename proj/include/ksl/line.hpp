#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ksl {

enum class Family : std::uint8_t { Finite, Real, Ordinal, Split };
enum class Side : std::uint8_t { Whole, Minus, Plus };

const char* family_name(Family f);

// A point of some line. Which fields matter depends on the family:
//   Finite  -> n (index)
//   Real    -> x
//   Ordinal -> q, n  (omega*q + n)
//   Split   -> x, side
struct Point {
    double x = 0.0;
    std::int64_t n = 0;
    std::int32_t q = 0;
    Family fam = Family::Real;
    Side side = Side::Whole;

    static Point finite(std::int64_t i) { return {0.0, i, 0, Family::Finite, Side::Whole}; }
    static Point real(double v) { return {v, 0, 0, Family::Real, Side::Whole}; }
    static Point ordinal(std::int32_t q, std::int64_t r) { return {0.0, r, q, Family::Ordinal, Side::Whole}; }
    static Point split(double v, Side s = Side::Whole) { return {v, 0, 0, Family::Split, s}; }
};

// throws UsageError when the families differ
std::strong_ordering compare(const Point& a, const Point& b);

inline bool operator==(const Point& a, const Point& b) { return compare(a, b) == 0; }
inline std::strong_ordering operator<=>(const Point& a, const Point& b) { return compare(a, b); }

std::string to_string(const Point& p);

struct IntervalSpec {
    Point left;
    bool left_closed = false;
    Point right;
    bool right_closed = true;

    bool operator==(const IntervalSpec&) const = default;
};

std::string to_string(const IntervalSpec& I);

class Line {
public:
    static Line finite(std::int64_t n);
    static Line real(double lo, double hi);
    static Line ordinal(std::int32_t Q, std::int64_t R);
    static Line split(double lo, double hi, std::vector<double> splits);

    Family family() const { return fam_; }
    std::int64_t size() const { return n_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::int32_t limit_count() const { return Q_; }
    std::int64_t tail_length() const { return R_; }
    const std::vector<double>& splits() const { return splits_; }

    Point zero() const;
    Point one() const;

    bool contains(const Point& p) const;
    void check(const Point& p) const;  // throws UsageError if !contains

    bool is_min(const Point& p) const { return p == zero(); }
    bool is_max(const Point& p) const { return p == one(); }
    bool is_left_isolated(const Point& p) const;
    bool is_right_isolated(const Point& p) const;
    // left-dense: not isolated and not the minimum
    bool is_left_dense(const Point& p) const { return !is_min(p) && !is_left_isolated(p); }
    bool is_right_dense(const Point& p) const { return !is_max(p) && !is_right_isolated(p); }
    bool is_limit(const Point& p) const;  // ordinal limit point (q,0), q >= 1

    Point predecessor(const Point& p) const;
    Point successor(const Point& p) const;
    std::optional<Point> between(const Point& a, const Point& b) const;

    Point left_approach(const Point& p, int k) const;
    Point right_approach(const Point& p, int k) const;

    // order-preserving continuous real coordinate; ordinals use q + r/(r+1)
    double coord(const Point& p) const;
    double coord_lo() const { return coord(zero()); }
    double coord_hi() const { return coord(one()); }
    bool is_split_value(double x) const;
    // real/split point at a coordinate; split values map to the given side
    Point at(double x, Side on_split = Side::Minus) const;

    // nested divisions 0_K = d_0 < ... < d_m = 1_K, finer as L grows
    std::vector<Point> division(int L) const;

    std::string describe() const;
    bool operator==(const Line& o) const;

private:
    Family fam_ = Family::Real;
    std::int64_t n_ = 0;
    double lo_ = 0.0, hi_ = 1.0;
    std::int32_t Q_ = 0;
    std::int64_t R_ = 0;
    std::vector<double> splits_;
};

bool contains(const Line& K, const IntervalSpec& I, const Point& p);
bool nonempty(const Line& K, const IntervalSpec& I);

// the canonical representation of an open interval of K
IntervalSpec canonicalize(const Line& K, const IntervalSpec& I);
bool is_canonical(const Line& K, const IntervalSpec& I);

}  // namespace ksl
