#include "ksl/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

bool point_less(const Point& a, const Point& b) { return a < b; }

void sort_unique(std::vector<Point>& v) {
    std::sort(v.begin(), v.end(), point_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool right_inside(const Point& b, const IntervalSpec& D) { return D.right_closed ? !(D.right < b) : b < D.right; }

}  // namespace

std::vector<Point> TaggedPartition::division() const {
    std::vector<Point> d;
    if (cells.empty()) return d;
    d.push_back(cells.front().left);
    for (const Cell& c : cells) d.push_back(c.right);
    return d;
}

bool halfopen_inside(const Line& K, const Point& a, const Point& b, const IntervalSpec& D) {
    if (a == b) return true;
    if (!right_inside(b, D)) return false;
    if (D.left_closed) {
        if (!(a < D.left)) return true;
        return K.is_right_isolated(a) && K.successor(a) == D.left;
    }
    return !(a < D.left);
}

bool closed_inside(const Line& K, const Point& a, const Point& b, const IntervalSpec& D) {
    return contains(K, D, a) && contains(K, D, b);
}

bool cell_is_fine(const Line& K, const Cell& c, const Gauge& delta) {
    if (c.tag < c.left || c.right < c.tag) return false;
    return halfopen_inside(K, c.left, c.right, delta.at(c.tag));
}

bool is_delta_fine(const Line& K, const TaggedPartition& P, const Gauge& delta) {
    for (const Cell& c : P.cells)
        if (!cell_is_fine(K, c, delta)) return false;
    return true;
}

bool is_delta_fine_closed(const Line& K, const TaggedPartition& P, const Gauge& delta) {
    for (const Cell& c : P.cells) {
        if (c.tag < c.left || c.right < c.tag) return false;
        if (!closed_inside(K, c.left, c.right, delta.at(c.tag))) return false;
    }
    return true;
}

bool is_valid_partition(const Line& K, const TaggedPartition& P) {
    if (P.cells.empty()) return false;
    if (!(P.cells.front().left == K.zero()) || !(P.cells.back().right == K.one())) return false;
    for (std::size_t i = 0; i < P.cells.size(); ++i) {
        const Cell& c = P.cells[i];
        if (c.right < c.left || c.tag < c.left || c.right < c.tag) return false;
        if (i > 0 && !(P.cells[i - 1].right == c.left)) return false;
    }
    return true;
}

namespace {

struct Cousin {
    const Line& K;
    const Gauge& delta;
    int max_depth;
    TagPolicy policy;
    const std::function<void(const Cell&)>& emit;
    std::vector<Point> anchors;

    bool fits(const Point& a, const Point& b, const Point& t) const {
        return halfopen_inside(K, a, b, delta.at(t));
    }

    void run(const Point& a, const Point& b, int depth) {
        if (depth > max_depth)
            throw NonconvergenceError("cousin_partition: depth limit reached on [" + to_string(a) + "," + to_string(b) +
                                      "]; the gauge may shrink too fast there");
        auto lo = std::upper_bound(anchors.begin(), anchors.end(), a, point_less);
        auto hi = std::lower_bound(anchors.begin(), anchors.end(), b, point_less);
        if (lo < hi) {
            const Point s = *(lo + (hi - lo) / 2);
            run(a, s, depth + 1);
            run(s, b, depth + 1);
            return;
        }
        if (policy == TagPolicy::MidpointFirst) {
            auto c = K.between(a, b);
            if (c && fits(a, b, *c)) return emit({a, b, *c});
        }
        if (fits(a, b, a)) return emit({a, b, a});
        if (fits(a, b, b)) return emit({a, b, b});
        if (K.family() == Family::Ordinal && b.q >= 1) {
            Point ell = Point::ordinal(b.q, 0);
            if (a < ell) {
                IntervalSpec D = delta.at(ell);
                Point start = D.left;
                if (D.left_closed && !K.is_min(D.left)) start = K.is_left_isolated(D.left) ? K.predecessor(D.left) : D.left;
                if (start < a) start = a;
                if (start < ell && fits(start, ell, ell)) {
                    if (a < start) run(a, start, depth + 1);
                    emit({start, ell, ell});
                    if (ell < b) run(ell, b, depth + 1);
                    return;
                }
            }
        }
        auto c = K.between(a, b);
        if (!c)
            throw NonconvergenceError("cousin_partition: adjacent cell [" + to_string(a) + "," + to_string(b) +
                                      "] fits neither endpoint's gauge");
        run(a, *c, depth + 1);
        run(*c, b, depth + 1);
    }
};

}  // namespace

void cousin_visit(const Line& K, const Gauge& delta, int max_depth, TagPolicy policy,
                  const std::function<void(const Cell&)>& emit) {
    Cousin c{K, delta, max_depth, policy, emit, delta.anchors};
    sort_unique(c.anchors);
    c.run(K.zero(), K.one(), 0);
}

TaggedPartition cousin_partition(const Line& K, const Gauge& delta, int max_depth, TagPolicy policy) {
    TaggedPartition P;
    cousin_visit(K, delta, max_depth, policy, [&](const Cell& c) { P.cells.push_back(c); });
    return P;
}

double riemann_sum(const PointFn& f, const Integrator& G, const TaggedPartition& P) {
    const Line& K = G.line();
    double s = f(K.zero()) * G(K.zero());
    for (const Cell& c : P.cells) s += f(c.tag) * (G(c.right) - G(c.left));
    return s;
}

Gauge whole_line_gauge(const Line& K) {
    IntervalSpec all{K.zero(), true, K.one(), true};
    return {[all](const Point&) { return all; }, "whole line", {}};
}

Gauge singleton_gauge(const Line& K) {
    if (K.family() == Family::Real || (K.family() == Family::Split))
        throw UsageError("singleton gauge needs every point isolated");
    return {[](const Point& p) { return IntervalSpec{p, true, p, true}; }, "singletons", {}};
}

Gauge radius_gauge(const Line& K, double r) {
    Gauge g;
    g.description = "radius " + std::to_string(r);
    g.at = [K, r](const Point& p) -> IntervalSpec {
        if (K.family() == Family::Finite || (K.family() == Family::Ordinal && !K.is_limit(p)))
            return {p, true, p, true};
        if (K.family() == Family::Ordinal) {
            auto m = static_cast<std::int64_t>(std::ceil(1.0 / r));
            return {Point::ordinal(p.q - 1, m), false, p, true};
        }
        IntervalSpec D;
        double lx = p.x - r, rx = p.x + r;
        if (lx < K.lo()) D.left = K.zero(), D.left_closed = true;
        else D.left = K.at(lx, Side::Plus), D.left_closed = false;
        if (rx > K.hi()) D.right = K.one(), D.right_closed = true;
        else D.right = K.at(rx, Side::Minus), D.right_closed = false;
        return D;
    };
    return g;
}

Gauge ladder_gauge(const Line& K, int level, std::vector<Point> critical, std::vector<double> singular) {
    Gauge g;
    g.description = "ladder level " + std::to_string(level);
    if (K.family() == Family::Finite) {
        g.at = [](const Point& p) { return IntervalSpec{p, true, p, true}; };
        return g;
    }
    if (K.family() == Family::Ordinal) {
        const std::int64_t m = std::int64_t{1} << std::min(level, 40);
        g.at = [K, m](const Point& p) -> IntervalSpec {
            if (!K.is_limit(p)) return {p, true, p, true};
            return {Point::ordinal(p.q - 1, m), false, p, true};
        };
        return g;
    }
    sort_unique(critical);
    std::sort(singular.begin(), singular.end());
    const double w = K.hi() - K.lo();
    const double rk = std::ldexp(w, -level);
    const double rc = std::ldexp(w, -2 * level);
    g.anchors = critical;
    g.at = [K, critical = std::move(critical), singular = std::move(singular), w, rk, rc, level](const Point& t) -> IntervalSpec {
        auto it = std::lower_bound(critical.begin(), critical.end(), t, point_less);
        bool is_crit = it != critical.end() && *it == t;
        double rho = rk;
        if (is_crit) {
            // tag-at-c cells cost |jump| * rho, so shrink faster than the mesh
            // but stay well above the spacing of doubles near c
            rho = std::max(std::ldexp(w, -3 * level), 64 * std::numeric_limits<double>::epsilon() * std::max(w, std::fabs(t.x)));
        } else if (!singular.empty()) {
            auto s = std::lower_bound(singular.begin(), singular.end(), t.x);
            double d = std::numeric_limits<double>::infinity();
            if (s != singular.end()) d = *s - t.x;
            if (s != singular.begin()) d = std::min(d, t.x - *(s - 1));
            rho = std::min(rk, std::max(rc, std::ldexp(d, -level)));
        }
        const Point* cp = it != critical.begin() ? &*(it - 1) : nullptr;
        const Point* cn = nullptr;
        if (is_crit) {
            if (it + 1 != critical.end()) cn = &*(it + 1);
        } else if (it != critical.end()) {
            cn = &*it;
        }
        IntervalSpec D;
        double lx = t.x - rho, rx = t.x + rho;
        if (cp && cp->x >= lx) D.left = *cp, D.left_closed = false;
        else if (lx < K.lo()) D.left = K.zero(), D.left_closed = true;
        else D.left = K.at(lx, Side::Plus), D.left_closed = false;
        if (cn && cn->x <= rx) D.right = *cn, D.right_closed = false;
        else if (rx > K.hi()) D.right = K.one(), D.right_closed = true;
        else D.right = K.at(rx, Side::Minus), D.right_closed = false;
        return D;
    };
    return g;
}

}  // namespace ksl
