#include "ksl/improper.hpp"

#include <cmath>
#include <functional>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

bool stable(const std::vector<ApproachPoint>& pts, double tol) {
    std::size_t n = pts.size();
    if (n < 3) return false;
    double a = pts[n - 3].partial, b = pts[n - 2].partial, c = pts[n - 1].partial;
    return std::fabs(a - b) < tol && std::fabs(b - c) < tol && std::fabs(a - c) < tol;
}

bool runaway(const std::vector<ApproachPoint>& pts, double bound) {
    std::size_t n = pts.size();
    if (n < 3) return false;
    for (std::size_t i = n - 3; i < n; ++i) {
        double m = std::fabs(pts[i].partial);
        if (!(m > bound)) return false;
        if (i > n - 3 && !(m > std::fabs(pts[i - 1].partial))) return false;
    }
    return true;
}

// declared points of f and G other than the end being approached
std::vector<Point> declared(const Integrand& f, const Integrator& G, const HakeConfig& cfg, const Point& end) {
    const Line& K = G.line();
    std::vector<Point> out;
    auto add = [&](const Point& p) {
        if (!(p == end)) out.push_back(p);
    };
    for (const Point& p : G.atoms()) add(p);
    for (const Point& p : G.singular_hints()) add(p);
    for (const Point& p : f.breaks) add(p);
    for (const Point& p : cfg.engine.singular_points) add(p);
    for (double s : K.splits()) {
        add(Point::split(s, Side::Minus));
        add(Point::split(s, Side::Plus));
    }
    return out;
}

HakeResult run(const Integrand& f, const Integrator& G, const HakeConfig& cfg, const std::string& direction,
               const std::function<Point(int)>& approach, const std::function<IntervalSpec(const Point&)>& piece,
               const std::function<bool(const Point&)>& past_declared) {
    HakeResult r;
    r.direction = direction;
    for (int k = 1; k <= cfg.max_approach; ++k) {
        Point y;
        try {
            y = approach(k);
        } catch (const NonconvergenceError& e) {
            r.note = e.what();
            break;
        }
        EngineConfig ec = cfg.engine;
        ec.singular_points.push_back(y);
        IntegralResult part = integrate_indicator(f, G, piece(y), ec);
        r.approach_points.push_back({y, part.value, part.verdict});
        if (part.verdict == Verdict::Diverging) {
            r.verdict = Verdict::Diverging;
            r.note = "partial integral at y=" + to_string(y) + " diverges";
            return r;
        }
        if (part.verdict == Verdict::Nonconverged) {
            r.verdict = Verdict::Nonconverged;
            r.note = "partial integral at y=" + to_string(y) + " did not converge" + (part.note.empty() ? "" : ": " + part.note);
            return r;
        }
        r.limit_value = part.value;
        // partials cannot settle or run away before the last three approach
        // points have passed every declared point
        const std::size_t n = r.approach_points.size();
        if (n < 3 || !past_declared(r.approach_points[n - 3].y)) continue;
        if (runaway(r.approach_points, cfg.engine.divergence_bound)) {
            r.verdict = Verdict::Diverging;
            r.note = "partials exceed the divergence bound with growing magnitude";
            return r;
        }
        if (stable(r.approach_points, cfg.engine.tol)) {
            r.verdict = Verdict::Converged;
            return r;
        }
    }
    r.verdict = Verdict::Nonconverged;
    if (r.note.empty()) r.note = "partials did not stabilise within max_approach points";
    return r;
}

}  // namespace

HakeResult hake_forward(const Integrand& f, const Integrator& G, const HakeConfig& cfg) {
    const Line& K = G.line();
    const Point one = K.one();
    if (!K.is_left_dense(one)) throw PreconditionError("hake forward needs a left-dense 1_K; integrate directly instead");
    HakeResult r = run(
        f, G, cfg, "forward", [&](int k) { return K.left_approach(one, k); },
        [&](const Point& y) { return IntervalSpec{K.zero(), true, y, true}; },
        [&, pts = declared(f, G, cfg, one)](const Point& y) {
            for (const Point& p : pts)
                if (!(p < y)) return false;
            return true;
        });
    r.correction = f(one) * (G(one) - G.l_g(one));
    if (r.verdict == Verdict::Converged) r.total = r.limit_value + r.correction;
    return r;
}

HakeResult hake_backward(const Integrand& f, const Integrator& G, const HakeConfig& cfg) {
    const Line& K = G.line();
    const Point zero = K.zero();
    if (!K.is_right_dense(zero)) throw PreconditionError("hake backward needs a right-dense 0_K; integrate directly instead");
    HakeResult r = run(
        f, G, cfg, "backward", [&](int k) { return K.right_approach(zero, k); },
        [&](const Point& y) { return IntervalSpec{y, false, K.one(), true}; },
        [&, pts = declared(f, G, cfg, zero)](const Point& y) {
            for (const Point& p : pts)
                if (!(y < p)) return false;
            return true;
        });
    r.correction = f(zero) * G(zero);
    if (r.verdict == Verdict::Converged) r.total = r.limit_value + r.correction;
    return r;
}

ConverseReport hake_converse_check(const Integrand& f, const Integrator& G, const HakeConfig& cfg) {
    const Line& K = G.line();
    ConverseReport rep;
    rep.direct = integrate(f, G, cfg.engine);
    if (rep.direct.verdict != Verdict::Converged) return rep;
    const double I = rep.direct.value;
    if (K.is_left_dense(K.one())) {
        rep.forward = hake_forward(f, G, cfg);
        if (rep.forward->verdict == Verdict::Converged)
            rep.forward_residual = std::fabs(rep.forward->limit_value - (I - rep.forward->correction));
    }
    if (K.is_right_dense(K.zero())) {
        rep.backward = hake_backward(f, G, cfg);
        if (rep.backward->verdict == Verdict::Converged)
            rep.backward_residual = std::fabs(rep.backward->limit_value - (I - rep.backward->correction));
    }
    return rep;
}

}  // namespace ksl
