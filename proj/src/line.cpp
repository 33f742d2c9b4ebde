#include "ksl/line.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

int side_rank(Side s) {
    switch (s) {
        case Side::Minus: return 0;
        case Side::Whole: return 1;
        case Side::Plus: return 2;
    }
    return 1;
}

std::string num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::Finite: return "finite";
        case Family::Real: return "real";
        case Family::Ordinal: return "ordinal";
        case Family::Split: return "split";
    }
    return "?";
}

std::strong_ordering compare(const Point& a, const Point& b) {
    if (a.fam != b.fam)
        throw UsageError(std::string("cannot compare points of a ") + family_name(a.fam) + " line and a " +
                         family_name(b.fam) + " line");
    switch (a.fam) {
        case Family::Finite: return a.n <=> b.n;
        case Family::Real:
            return a.x < b.x ? std::strong_ordering::less
                 : b.x < a.x ? std::strong_ordering::greater
                             : std::strong_ordering::equal;
        case Family::Ordinal:
            if (a.q != b.q) return a.q <=> b.q;
            return a.n <=> b.n;
        case Family::Split:
            if (a.x < b.x) return std::strong_ordering::less;
            if (b.x < a.x) return std::strong_ordering::greater;
            return side_rank(a.side) <=> side_rank(b.side);
    }
    return std::strong_ordering::equal;
}

std::string to_string(const Point& p) {
    switch (p.fam) {
        case Family::Finite: return std::to_string(p.n);
        case Family::Real: return num(p.x);
        case Family::Ordinal: return "w*" + std::to_string(p.q) + "+" + std::to_string(p.n);
        case Family::Split:
            return num(p.x) + (p.side == Side::Minus ? "-" : p.side == Side::Plus ? "+" : "");
    }
    return "?";
}

std::string to_string(const IntervalSpec& I) {
    return std::string(I.left_closed ? "[" : "(") + to_string(I.left) + "," + to_string(I.right) +
           (I.right_closed ? "]" : ")");
}

Line Line::finite(std::int64_t n) {
    if (n < 2) throw UsageError("finite line needs at least 2 points");
    Line L;
    L.fam_ = Family::Finite;
    L.n_ = n;
    return L;
}

Line Line::real(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw UsageError("real line needs lo < hi");
    Line L;
    L.fam_ = Family::Real;
    L.lo_ = lo;
    L.hi_ = hi;
    return L;
}

Line Line::ordinal(std::int32_t Q, std::int64_t R) {
    if (Q < 0 || R < 0 || Q + R < 1) throw UsageError("ordinal line needs Q, R >= 0 and Q + R >= 1");
    Line L;
    L.fam_ = Family::Ordinal;
    L.Q_ = Q;
    L.R_ = R;
    return L;
}

Line Line::split(double lo, double hi, std::vector<double> splits) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw UsageError("split line needs lo < hi");
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (!(splits[i] > lo && splits[i] < hi)) throw UsageError("split points must lie strictly inside (lo,hi)");
        if (i > 0 && !(splits[i - 1] < splits[i])) throw UsageError("split points must be sorted and distinct");
    }
    Line L;
    L.fam_ = Family::Split;
    L.lo_ = lo;
    L.hi_ = hi;
    L.splits_ = std::move(splits);
    return L;
}

Point Line::zero() const {
    switch (fam_) {
        case Family::Finite: return Point::finite(0);
        case Family::Real: return Point::real(lo_);
        case Family::Ordinal: return Point::ordinal(0, 0);
        case Family::Split: return Point::split(lo_);
    }
    return {};
}

Point Line::one() const {
    switch (fam_) {
        case Family::Finite: return Point::finite(n_ - 1);
        case Family::Real: return Point::real(hi_);
        case Family::Ordinal: return Point::ordinal(Q_, R_);
        case Family::Split: return Point::split(hi_);
    }
    return {};
}

bool Line::is_split_value(double x) const { return std::binary_search(splits_.begin(), splits_.end(), x); }

bool Line::contains(const Point& p) const {
    if (p.fam != fam_) return false;
    switch (fam_) {
        case Family::Finite: return p.n >= 0 && p.n < n_;
        case Family::Real: return p.x >= lo_ && p.x <= hi_;
        case Family::Ordinal:
            if (p.q < 0 || p.n < 0) return false;
            return p.q < Q_ || (p.q == Q_ && p.n <= R_);
        case Family::Split:
            if (!(p.x >= lo_ && p.x <= hi_)) return false;
            return is_split_value(p.x) ? p.side != Side::Whole : p.side == Side::Whole;
    }
    return false;
}

void Line::check(const Point& p) const {
    if (!contains(p)) throw UsageError("point " + to_string(p) + " is not on line " + describe());
}

bool Line::is_left_isolated(const Point& p) const {
    check(p);
    switch (fam_) {
        case Family::Finite: return p.n > 0;
        case Family::Real: return false;
        case Family::Ordinal: return p.n > 0;
        case Family::Split: return p.side == Side::Plus;
    }
    return false;
}

bool Line::is_right_isolated(const Point& p) const {
    check(p);
    switch (fam_) {
        case Family::Finite: return p.n < n_ - 1;
        case Family::Real: return false;
        case Family::Ordinal: return !(p.q == Q_ && p.n == R_);
        case Family::Split: return p.side == Side::Minus;
    }
    return false;
}

bool Line::is_limit(const Point& p) const { return fam_ == Family::Ordinal && p.n == 0 && p.q >= 1; }

Point Line::predecessor(const Point& p) const {
    if (!is_left_isolated(p)) throw PreconditionError("predecessor: " + to_string(p) + " has no immediate predecessor");
    switch (fam_) {
        case Family::Finite: return Point::finite(p.n - 1);
        case Family::Ordinal: return Point::ordinal(p.q, p.n - 1);
        case Family::Split: return Point::split(p.x, Side::Minus);
        default: break;
    }
    throw PreconditionError("predecessor on a real line");
}

Point Line::successor(const Point& p) const {
    if (!is_right_isolated(p)) throw PreconditionError("successor: " + to_string(p) + " has no immediate successor");
    switch (fam_) {
        case Family::Finite: return Point::finite(p.n + 1);
        case Family::Ordinal: return Point::ordinal(p.q, p.n + 1);
        case Family::Split: return Point::split(p.x, Side::Plus);
        default: break;
    }
    throw PreconditionError("successor on a real line");
}

std::optional<Point> Line::between(const Point& a, const Point& b) const {
    check(a);
    check(b);
    if (!(a < b)) throw UsageError("between: need a < b, got " + to_string(a) + " and " + to_string(b));
    switch (fam_) {
        case Family::Finite:
            if (b.n - a.n >= 2) return Point::finite(a.n + (b.n - a.n) / 2);
            return std::nullopt;
        case Family::Real: {
            double m = a.x + (b.x - a.x) / 2;
            if (!(m > a.x && m < b.x)) return std::nullopt;
            return Point::real(m);
        }
        case Family::Split: {
            if (a.x == b.x) return std::nullopt;  // s- and s+
            double m = a.x + (b.x - a.x) / 2;
            if (!(m > a.x && m < b.x)) return std::nullopt;
            return Point::split(m, is_split_value(m) ? Side::Minus : Side::Whole);
        }
        case Family::Ordinal:
            if (a.q == b.q) {
                if (b.n - a.n >= 2) return Point::ordinal(a.q, a.n + (b.n - a.n) / 2);
                return std::nullopt;
            }
            if (b.n > 0) return Point::ordinal(b.q, 0);
            return Point::ordinal(a.q, a.n + 1);
    }
    return std::nullopt;
}

Point Line::left_approach(const Point& p, int k) const {
    if (!is_left_dense(p)) throw PreconditionError("left_approach: " + to_string(p) + " is not left-dense");
    if (k < 0) throw UsageError("left_approach: negative level");
    if (fam_ == Family::Ordinal) return Point::ordinal(p.q - 1, k);
    double floor = lo_;
    auto it = std::lower_bound(splits_.begin(), splits_.end(), p.x);
    if (it != splits_.begin()) floor = *(it - 1);
    double v = p.x - std::ldexp(p.x - floor, -k);
    if (!(v < p.x)) throw NonconvergenceError("left_approach: level " + std::to_string(k) + " exhausts binary64 near " + to_string(p), v);
    return at(v, Side::Plus);
}

Point Line::right_approach(const Point& p, int k) const {
    if (!is_right_dense(p)) throw PreconditionError("right_approach: " + to_string(p) + " is not right-dense");
    if (k < 0) throw UsageError("right_approach: negative level");
    double ceil = hi_;
    auto it = std::upper_bound(splits_.begin(), splits_.end(), p.x);
    if (it != splits_.end()) ceil = *it;
    double v = p.x + std::ldexp(ceil - p.x, -k);
    if (!(v > p.x)) throw NonconvergenceError("right_approach: level " + std::to_string(k) + " exhausts binary64 near " + to_string(p), v);
    return at(v, Side::Minus);
}

double Line::coord(const Point& p) const {
    switch (p.fam) {
        case Family::Finite: return static_cast<double>(p.n);
        case Family::Ordinal: return p.q + static_cast<double>(p.n) / static_cast<double>(p.n + 1);
        default: return p.x;
    }
}

Point Line::at(double x, Side on_split) const {
    if (fam_ == Family::Real) return Point::real(x);
    if (fam_ == Family::Split) return Point::split(x, is_split_value(x) ? on_split : Side::Whole);
    throw UsageError(std::string("no real coordinate points on a ") + family_name(fam_) + " line");
}

std::vector<Point> Line::division(int L) const {
    std::vector<Point> d;
    switch (fam_) {
        case Family::Finite:
            for (std::int64_t i = 0; i < n_; ++i) d.push_back(Point::finite(i));
            break;
        case Family::Real: {
            std::int64_t m = std::int64_t{1} << L;
            for (std::int64_t i = 0; i <= m; ++i)
                d.push_back(Point::real(i == m ? hi_ : lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(m)));
            break;
        }
        case Family::Split: {
            std::int64_t m = std::int64_t{1} << L;
            std::vector<double> xs;
            for (std::int64_t i = 0; i <= m; ++i)
                xs.push_back(i == m ? hi_ : lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(m));
            xs.insert(xs.end(), splits_.begin(), splits_.end());
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            for (double x : xs) {
                if (is_split_value(x)) {
                    d.push_back(Point::split(x, Side::Minus));
                    d.push_back(Point::split(x, Side::Plus));
                } else {
                    d.push_back(Point::split(x));
                }
            }
            break;
        }
        case Family::Ordinal: {
            std::int64_t m = std::int64_t{1} << L;
            for (std::int32_t q = 0; q < Q_; ++q)
                for (std::int64_t r = 0; r <= m; ++r) d.push_back(Point::ordinal(q, r));
            for (std::int64_t r = 0; r <= R_; ++r) d.push_back(Point::ordinal(Q_, r));
            break;
        }
    }
    return d;
}

std::string Line::describe() const {
    switch (fam_) {
        case Family::Finite: return "finite(n=" + std::to_string(n_) + ")";
        case Family::Real: return "real[" + num(lo_) + "," + num(hi_) + "]";
        case Family::Ordinal: return "ordinal(w*" + std::to_string(Q_) + "+" + std::to_string(R_) + ")";
        case Family::Split: {
            std::string s = "split[" + num(lo_) + "," + num(hi_) + "]{";
            for (std::size_t i = 0; i < splits_.size(); ++i) s += (i ? "," : "") + num(splits_[i]);
            return s + "}";
        }
    }
    return "?";
}

bool Line::operator==(const Line& o) const {
    return fam_ == o.fam_ && n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_ && Q_ == o.Q_ && R_ == o.R_ &&
           splits_ == o.splits_;
}

bool contains(const Line& K, const IntervalSpec& I, const Point& p) {
    K.check(p);
    bool left_ok = I.left_closed ? !(p < I.left) : I.left < p;
    bool right_ok = I.right_closed ? !(I.right < p) : p < I.right;
    return left_ok && right_ok;
}

bool nonempty(const Line& K, const IntervalSpec& I) {
    K.check(I.left);
    K.check(I.right);
    if (I.left < I.right) {
        if (I.left_closed || I.right_closed) return true;
        return K.between(I.left, I.right).has_value();
    }
    if (I.left == I.right) return I.left_closed && I.right_closed;
    return false;
}

IntervalSpec canonicalize(const Line& K, const IntervalSpec& I) {
    if (!nonempty(K, I)) throw RepresentationError("canonicalize: empty interval " + to_string(I));
    IntervalSpec out;
    if (I.left_closed) {
        if (K.is_min(I.left)) {
            out.left = I.left;
            out.left_closed = true;
        } else if (K.is_left_isolated(I.left)) {
            out.left = K.predecessor(I.left);
            out.left_closed = false;
        } else {
            throw RepresentationError("canonicalize: " + to_string(I) + " is not open (left endpoint is left-dense and included)");
        }
    } else {
        out.left = I.left;
        out.left_closed = false;
    }
    if (I.right_closed) {
        if (!(K.is_max(I.right) || K.is_right_isolated(I.right)))
            throw RepresentationError("canonicalize: " + to_string(I) + " is not open (right endpoint is right-dense and included)");
        out.right = I.right;
        out.right_closed = true;
    } else if (K.is_left_isolated(I.right)) {
        out.right = K.predecessor(I.right);
        out.right_closed = true;
    } else {
        out.right = I.right;
        out.right_closed = false;
    }
    if (!nonempty(K, out)) throw RepresentationError("canonicalize: " + to_string(I) + " collapses to an empty interval");
    return out;
}

bool is_canonical(const Line& K, const IntervalSpec& I) {
    if (!nonempty(K, I)) return false;
    if (I.left_closed && !K.is_min(I.left)) return false;
    if (!I.right_closed && (K.is_min(I.right) || K.is_left_isolated(I.right))) return false;
    return true;
}

}  // namespace ksl
