#include "ksl/engine.hpp"

#include <algorithm>
#include <cmath>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

bool point_less(const Point& a, const Point& b) { return a < b; }

struct Plan {
    std::vector<Point> critical;
    std::vector<double> singular;
    double min_gap = 0.0;  // smallest spacing among declared coordinates
};

Plan make_plan(const Integrand& f, const Integrator& G, const EngineConfig& cfg) {
    const Line& K = G.line();
    Plan p;
    for (const Point& a : G.atoms()) p.critical.push_back(a);
    for (const Point& b : f.breaks) p.critical.push_back(b);
    for (const Point& s : cfg.singular_points) p.critical.push_back(s);
    if (K.family() == Family::Split) {
        for (double s : K.splits()) {
            p.critical.push_back(Point::split(s, Side::Minus));
            p.critical.push_back(Point::split(s, Side::Plus));
        }
    }
    for (const Point& c : p.critical) K.check(c);
    if (K.family() == Family::Real || K.family() == Family::Split) {
        for (const Point& s : cfg.singular_points) p.singular.push_back(s.x);
        for (const Point& s : G.singular_hints()) p.singular.push_back(s.x);
        std::vector<double> xs{K.lo(), K.hi()};
        for (const Point& c : p.critical) xs.push_back(c.x);
        xs.insert(xs.end(), p.singular.begin(), p.singular.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        p.min_gap = K.hi() - K.lo();
        for (std::size_t i = 1; i < xs.size(); ++i) p.min_gap = std::min(p.min_gap, xs[i] - xs[i - 1]);
    }
    return p;
}

bool monotone_growth(const std::vector<LevelRecord>& d, double bound) {
    if (d.size() < 5) return false;
    const std::size_t n = d.size();
    double first = 0.0;
    for (std::size_t i = n - 4; i < n; ++i) {
        double prev = std::fabs(d[i - 1].value), cur = std::fabs(d[i].value);
        if (!(cur > prev)) return false;
        if (i == n - 4) first = cur - prev;
    }
    double last = std::fabs(d[n - 1].value) - std::fabs(d[n - 2].value);
    return last >= first / 2 && std::fabs(d[n - 1].value) > bound;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Nonconverged: return "nonconverged";
        case Verdict::Diverging: return "diverging";
    }
    return "?";
}

static double level_sum(const Integrand& f, const Integrator& G, const EngineConfig& cfg, const Plan& plan, int level,
                        std::size_t* cells) {
    const Line& K = G.line();
    Gauge delta = ladder_gauge(K, level, plan.critical, plan.singular);
    const Point zero = K.zero();
    double prevG = G(zero);
    double s = f(zero) * prevG;
    std::size_t count = 0;
    cousin_visit(K, delta, cfg.max_depth, cfg.policy, [&](const Cell& c) {
        double g = G(c.right);
        double term = f(c.tag) * (g - prevG);
        if (!std::isfinite(term))
            throw Error("non-finite Riemann term at tag " + to_string(c.tag) + "; declare it a singular point or fix the integrand");
        s += term;
        prevG = g;
        ++count;
    });
    if (!std::isfinite(s)) throw Error("non-finite Riemann sum");
    if (cells) *cells = count;
    return s;
}

double ladder_sum(const Integrand& f, const Integrator& G, const EngineConfig& cfg, int level, std::size_t* cells) {
    return level_sum(f, G, cfg, make_plan(f, G, cfg), level, cells);
}

IntegralResult integrate(const Integrand& f, const Integrator& G, const EngineConfig& cfg) {
    IntegralResult r;
    r.left_limit_mode = mode_name(G.left_limit_mode());
    const Plan plan = make_plan(f, G, cfg);
    for (int level = 1; level <= cfg.max_level; ++level) {
        LevelRecord rec{level, 0.0, std::numeric_limits<double>::quiet_NaN(), 0};
        try {
            rec.value = level_sum(f, G, cfg, plan, level, &rec.cells);
        } catch (const NonconvergenceError& e) {
            r.verdict = Verdict::Nonconverged;
            r.note = e.what();
            return r;
        }
        if (!r.diagnostics.empty()) rec.delta = std::fabs(rec.value - r.diagnostics.back().value);
        r.diagnostics.push_back(rec);
        r.value = rec.value;
        r.levels_used = level;
        r.error_estimate = std::isnan(rec.delta) ? std::numeric_limits<double>::infinity() : rec.delta;
        // coarse levels cannot see below the spacing of declared points:
        // their values can agree by accident or grow while resolving it
        const Line& K = G.line();
        const bool resolved = plan.min_gap == 0.0 || std::ldexp(K.hi() - K.lo(), -2 * level) <= plan.min_gap / 4;
        const std::size_t n = r.diagnostics.size();
        if (resolved && n >= 3) {
            double a = r.diagnostics[n - 3].value, b = r.diagnostics[n - 2].value, c = r.diagnostics[n - 1].value;
            if (std::fabs(a - b) < cfg.tol && std::fabs(b - c) < cfg.tol && std::fabs(a - c) < cfg.tol) {
                r.verdict = Verdict::Converged;
                return r;
            }
        }
        if (resolved && monotone_growth(r.diagnostics, cfg.divergence_bound)) {
            r.verdict = Verdict::Diverging;
            r.note = "level values grow monotonically past the divergence bound";
            return r;
        }
    }
    r.verdict = Verdict::Nonconverged;
    r.note = "no three consecutive levels agreed within tolerance";
    return r;
}

IntegralResult integrate_indicator(const Integrand& f, const Integrator& G, const IntervalSpec& I, const EngineConfig& cfg) {
    const Line& K = G.line();
    bool degenerate = I.left == I.right && I.left_closed && I.right_closed;
    if (!degenerate && !is_canonical(K, I))
        throw UsageError("integrate_indicator needs a canonical interval; got " + to_string(I) + " (run canonicalize first)");
    return integrate(restrict_to(K, f, I), G, cfg);
}

double integral_between(const Integrand& f, const Integrator& G, const Point& a, const Point& b, const EngineConfig& cfg) {
    if (b < a) throw UsageError("integral_between needs a <= b");
    double head = f(a) * G(a);
    if (a == b) return head;
    IntegralResult r = integrate_indicator(f, G, IntervalSpec{a, false, b, true}, cfg);
    if (r.verdict != Verdict::Converged)
        throw NonconvergenceError("subintegral over (" + to_string(a) + "," + to_string(b) + "] " + verdict_name(r.verdict),
                                  r.value, r.error_estimate);
    return head + r.value;
}

double saks_henstock_deviation(const Integrand& f, const Integrator& G, const SubIntegral& sub,
                               const std::vector<Cell>& system, const EngineConfig& cfg) {
    SubIntegral inner = sub;
    if (!inner) {
        inner = [&](const Point& y, const Point& z) {
            if (y == z) return 0.0;
            return integral_between(f, G, y, z, cfg) - f(y) * G(y);
        };
    }
    double total = 0.0;
    for (const Cell& c : system) {
        double riemann = f(c.tag) * (G(c.right) - G(c.left));
        total += std::fabs(riemann - inner(c.left, c.right));
    }
    return total;
}

// ---------------------------------------------------------------- accumulator

AccumulatorNBV::AccumulatorNBV(Integrand f, IntegratorPtr G, EngineConfig cfg)
    : Integrator(G->line()), f_(std::move(f)), G_(std::move(G)), cfg_(std::move(cfg)), memo_(point_less) {
    numeric_limit.tol = 4 * cfg_.tol;
}

double AccumulatorNBV::operator()(const Point& p) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(p);
        if (it != memo_.end()) return it->second;
    }
    IntegralResult r = integrate_indicator(f_, *G_, IntervalSpec{line().zero(), true, p, true}, cfg_);
    if (r.verdict != Verdict::Converged)
        throw NonconvergenceError("accumulator at " + to_string(p) + ": " + verdict_name(r.verdict) +
                                      (r.note.empty() ? "" : " (" + r.note + ")"),
                                  r.value, r.error_estimate);
    std::lock_guard<std::mutex> lock(mu_);
    memo_.emplace(p, r.value);
    return r.value;
}

std::size_t AccumulatorNBV::cached() const {
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.size();
}

std::shared_ptr<AccumulatorNBV> accumulator(Integrand f, IntegratorPtr G, EngineConfig cfg) {
    return std::make_shared<AccumulatorNBV>(std::move(f), std::move(G), std::move(cfg));
}

}  // namespace ksl
