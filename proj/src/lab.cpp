#include "ksl/lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

constexpr int kGridBits = 40;
constexpr std::int64_t kOrdinalCap = std::int64_t{1} << 40;

using Pred = std::function<bool(const Point&)>;

struct Crossing {
    Point below;  // last point seen with pred false (meaningful when !exact)
    Point at;     // first point with pred true
    bool exact;   // at is the true minimum, not a grid neighbour of it
};

bool less(const Point& a, const Point& b) { return a < b; }

// smallest y in (from, to] with pred(y); pred(from) false, pred(to) true
Crossing cross_finite(const Pred& pred, const Point& from, const Point& to) {
    std::int64_t lo = from.n, hi = to.n;
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (pred(Point::finite(mid)) ? hi : lo) = mid;
    }
    return {Point::finite(lo), Point::finite(hi), true};
}

Crossing cross_ordinal(const Pred& pred, const Point& from, const Point& to) {
    auto bsearch = [&](std::int32_t q, std::int64_t lo, std::int64_t hi) {
        // pred false at (q,lo), true at (q,hi)
        while (hi - lo > 1) {
            std::int64_t mid = lo + (hi - lo) / 2;
            (pred(Point::ordinal(q, mid)) ? hi : lo) = mid;
        }
        return Crossing{Point::ordinal(q, lo), Point::ordinal(q, hi), true};
    };
    Point last_false = from;
    for (std::int32_t q = from.q; q <= to.q; ++q) {
        std::int64_t r0 = q == from.q ? from.n : 0;
        if (q > from.q) {
            Point lim = Point::ordinal(q, 0);
            if (pred(lim)) return {last_false, lim, true};
        }
        if (q == to.q) return bsearch(q, r0, to.n);
        std::int64_t lo = r0, step = 1;
        while (lo + step < kOrdinalCap) {
            std::int64_t r = lo + step;
            if (pred(Point::ordinal(q, r))) return bsearch(q, lo, r);
            lo = r;
            step *= 2;
        }
        last_false = Point::ordinal(q, lo);
    }
    return {last_false, to, true};
}

Crossing cross_continuum(const Integrator& G, const Pred& pred, const Point& from, const Point& to) {
    const Line& K = G.line();
    const double base = K.lo();
    const double h = std::ldexp(K.hi() - K.lo(), -kGridBits);
    auto grid = [&](std::int64_t m) { return K.at(base + h * static_cast<double>(m), Side::Minus); };
    std::int64_t m_lo = static_cast<std::int64_t>(std::ceil((from.x - base) / h)) - 1;
    std::int64_t m_hi = static_cast<std::int64_t>(std::floor((to.x - base) / h)) + 1;
    Point a = from, b = to;
    while (m_hi - m_lo > 1) {
        std::int64_t mid = m_lo + (m_hi - m_lo) / 2;
        Point p = grid(mid);
        if (!(a < p)) {
            m_lo = mid;
        } else if (!(p < b)) {
            m_hi = mid;
        } else if (pred(p)) {
            m_hi = mid;
            b = p;
        } else {
            m_lo = mid;
            a = p;
        }
    }
    // jumps and split sides inside (a, b] decide exactly
    std::vector<Point> cand;
    for (const Point& t : G.atoms())
        if (a < t && !(b < t)) cand.push_back(t);
    if (K.family() == Family::Split) {
        for (double s : K.splits()) {
            for (Side sd : {Side::Minus, Side::Plus}) {
                Point t = Point::split(s, sd);
                if (a < t && !(b < t)) cand.push_back(t);
            }
        }
    }
    std::sort(cand.begin(), cand.end(), less);
    for (const Point& t : cand)
        if (pred(t)) return {a, t, true};
    return {a, b, false};
}

Crossing first_true(const Integrator& G, const Pred& pred, const Point& from, const Point& to) {
    switch (G.line().family()) {
        case Family::Finite: return cross_finite(pred, from, to);
        case Family::Ordinal: return cross_ordinal(pred, from, to);
        default: return cross_continuum(G, pred, from, to);
    }
}

Point lower_neighbour(const Line& K, const Point& s) {
    return K.is_left_isolated(s) ? K.predecessor(s) : s;
}

Limit settle(const Line& K, const Point& x, const std::vector<Point>& seq) {
    const int depth = static_cast<int>(seq.size());
    const Point& last = seq.back();
    if (depth >= 3 && seq[depth - 1] == seq[depth - 2] && seq[depth - 2] == seq[depth - 3]) return {last, depth, true};
    if (depth >= 4) {
        bool shrinking = true;
        for (int i = depth - 3; i < depth; ++i) {
            double g0 = std::fabs(K.coord(x) - K.coord(seq[i - 1]));
            double g1 = std::fabs(K.coord(x) - K.coord(seq[i]));
            if (!(g0 > 0) || !(g1 <= 0.75 * g0)) shrinking = false;
        }
        if (shrinking) return {x, depth, false};
    }
    return {last, depth, false};
}

}  // namespace

const char* reach_name(Reach r) {
    switch (r) {
        case Reach::Attained: return "attained";
        case Reach::Approached: return "approached";
        case Reach::Empty: return "empty";
    }
    return "?";
}

const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::A: return "A";
        case PointClass::B: return "B";
        case PointClass::C: return "C";
        case PointClass::Other: return "other";
    }
    return "?";
}

SupPoint u_n(const Integrator& G, const Point& x, int n) {
    if (!G.monotone()) throw PreconditionError("u_n needs a nondecreasing integrator; decompose first");
    const Line& K = G.line();
    K.check(x);
    const Point zero = K.zero();
    const double level = G(x) - std::ldexp(1.0, -n);
    Pred above = [&](const Point& y) { return G(y) > level; };
    if (x == zero || above(zero)) return {zero, Reach::Empty};
    Crossing c = first_true(G, above, zero, x);
    if (!c.exact) return {c.below, Reach::Attained};
    if (K.is_left_isolated(c.at)) return {lower_neighbour(K, c.at), Reach::Attained};
    return {c.at, Reach::Approached};
}

SupPoint v_n(const Integrator& G, const Point& x, int n) {
    if (!G.monotone()) throw PreconditionError("v_n needs a nondecreasing integrator; decompose first");
    const Line& K = G.line();
    K.check(x);
    const Point one = K.one();
    const double level = G(x) + std::ldexp(1.0, -n);
    Pred reached = [&](const Point& y) { return G(y) >= level; };
    if (x == one || !reached(one)) return {one, Reach::Empty};
    Crossing c = first_true(G, reached, x, one);
    return {c.at, Reach::Attained};
}

Limit big_U(const Integrator& G, const Point& x, int depth) {
    std::vector<Point> seq;
    for (int n = 1; n <= depth; ++n) seq.push_back(u_n(G, x, n).point);
    return settle(G.line(), x, seq);
}

Limit big_V(const Integrator& G, const Point& x, int depth) {
    std::vector<Point> seq;
    for (int n = 1; n <= depth; ++n) seq.push_back(v_n(G, x, n).point);
    return settle(G.line(), x, seq);
}

Classification classify(const Integrator& G, const Point& x, int depth) {
    Classification c{x, PointClass::Other, big_U(G, x, depth), big_V(G, x, depth)};
    bool u_at = c.U.point == x, v_at = c.V.point == x;
    if (u_at && x < c.V.point) c.cls = PointClass::A;
    else if (c.U.point < x && v_at) c.cls = PointClass::B;
    else if (u_at && v_at) c.cls = PointClass::C;
    return c;
}

DerivativeProbe f_n_probe(const Integrator& F, const Integrator& G, const Point& x, int n, const Classification& c) {
    DerivativeProbe p{n, u_n(G, x, n), v_n(G, x, n), 0.0, 0.0, 0.0, c.cls, 0.0};
    const Point& u = p.u.point;
    const Point& v = p.v.point;
    const double Gx = G(x), Gu = G(u), Gv = G(v);
    if (Gx > Gu) p.ell = (F(x) - F(u)) / (Gx - Gu);
    if (Gv > Gx) p.r = (F(v) - F(x)) / (Gv - Gx);
    if (Gv > Gu) p.q = (F(v) - F(u)) / (Gv - Gu);
    switch (c.cls) {
        case PointClass::A: p.f_n = p.ell; break;
        case PointClass::B: p.f_n = p.r; break;
        case PointClass::C: p.f_n = p.q; break;
        case PointClass::Other: p.f_n = 0.0; break;
    }
    return p;
}

DerivativeProbe f_n_probe(const Integrator& F, const Integrator& G, const Point& x, int n, int class_depth) {
    return f_n_probe(F, G, x, n, classify(G, x, class_depth));
}

std::vector<Point> interior_sample(const Line& K, std::size_t n) {
    std::vector<Point> out;
    switch (K.family()) {
        case Family::Finite:
            for (std::size_t i = 0; i < n; ++i) {
                auto idx = 1 + static_cast<std::int64_t>((static_cast<double>(i) + 0.5) / static_cast<double>(n) *
                                                         static_cast<double>(K.size() - 2));
                if (idx >= K.size() - 1) idx = K.size() - 2;
                if (idx >= 1 && (out.empty() || !(out.back() == Point::finite(idx)))) out.push_back(Point::finite(idx));
            }
            break;
        case Family::Ordinal: {
            const std::int32_t Q = K.limit_count();
            for (std::size_t i = 0; i < n; ++i) {
                if (Q == 0) {
                    if (K.tail_length() < 2) break;
                    out.push_back(Point::ordinal(0, 1 + static_cast<std::int64_t>(i) % (K.tail_length() - 1)));
                } else {
                    auto q = static_cast<std::int32_t>(i % static_cast<std::size_t>(Q));
                    out.push_back(Point::ordinal(q, 1 + static_cast<std::int64_t>(i / static_cast<std::size_t>(Q))));
                }
            }
            std::sort(out.begin(), out.end(), less);
            break;
        }
        default:
            for (std::size_t i = 0; i < n; ++i)
                out.push_back(K.at(K.lo() + (K.hi() - K.lo()) * (static_cast<double>(i) + 0.5) / static_cast<double>(n), Side::Minus));
    }
    return out;
}

ConvergenceReport convergence_report(const Integrand& f, IntegratorPtr G, std::size_t sample, int depth, double tol,
                                     const EngineConfig& cfg) {
    ConvergenceReport rep;
    rep.depth = depth;
    rep.tol = tol;
    EngineConfig ec = cfg;
    ec.tol = std::min(cfg.tol, std::ldexp(tol, -depth - 4));
    auto F = accumulator(f, G, ec);
    const std::vector<Point> atoms = G->atoms();
    const int class_depth = std::max(depth, 24);
    for (const Point& x : interior_sample(G->line(), sample)) {
        Classification c = classify(*G, x, class_depth);
        PointReport pr{x, c.cls, f(x), 0.0, 0.0, false, false};
        bool is_atom = std::find(atoms.begin(), atoms.end(), x) != atoms.end();
        if (is_atom) rep.atoms_seen.push_back(x);
        if (c.cls == PointClass::Other) rep.plateau_points.push_back(x);
        pr.exceptional = is_atom || c.cls == PointClass::Other;
        if (!pr.exceptional) {
            DerivativeProbe p = f_n_probe(*F, *G, x, depth, c);
            pr.f_n = p.f_n;
            pr.error = std::fabs(p.f_n - pr.f_value);
            pr.converged = pr.error < tol;
            ++rep.scored;
            if (pr.converged) ++rep.converged;
        }
        rep.points.push_back(pr);
    }
    if (rep.scored == 0) rep.note = "no sample point lies in A, B or C; convergence holds vacuously";
    return rep;
}

DerivativeCheck g_derivative_check(const Integrator& F, const Integrator& G, const Integrand& f, const Point& x, double tol,
                                   int levels) {
    const Line& K = G.line();
    const double jump = G(x) - G.l_g(x);
    if (jump != 0.0) {
        double quotient = (F(x) - F.l_g(x)) / jump;
        double res = std::fabs(quotient - f(x));
        return {"jump", res, 0, res < tol};
    }
    const double Fx = F(x), Gx = G(x), fx = f(x);
    std::optional<double> last;
    int last_level = 0;
    for (int j = 1; j <= levels; ++j) {
        std::vector<Point> ys;
        if (K.is_left_dense(x)) ys.push_back(K.left_approach(x, j));
        else if (!K.is_min(x)) ys.push_back(K.predecessor(x));
        if (K.is_right_dense(x)) ys.push_back(K.right_approach(x, j));
        else if (!K.is_max(x)) ys.push_back(K.successor(x));
        double worst = -1.0;
        for (const Point& y : ys) {
            double dG = G(y) - Gx;
            if (dG == 0.0) continue;
            worst = std::max(worst, std::fabs(F(y) - Fx - fx * dG) / std::fabs(dG));
        }
        if (worst >= 0.0) {
            last = worst;
            last_level = j;
        }
    }
    if (!last) return {"constant", 0.0, 0, false};
    return {"dense", *last, last_level, *last < tol};
}

}  // namespace ksl
