// Acceptance runner: one PASS/FAIL line per criterion, with wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ksl/builtins.hpp"
#include "ksl/engine.hpp"
#include "ksl/errors.hpp"
#include "ksl/improper.hpp"
#include "ksl/integrator.hpp"
#include "ksl/lab.hpp"
#include "ksl/oracle.hpp"
#include "support.hpp"

using namespace ksl;
using namespace ksl::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.ok) o.detail = why;
    o.ok = false;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Integrand table_integrand(const std::vector<double>& v) {
    Integrand f;
    f.eval = [v](const Point& p) { return v.at(static_cast<std::size_t>(p.n)); };
    f.description = "table";
    return f;
}

Integrand one() { return Integrand::constant(1.0); }

// a + b x + c x^2 in the line coordinate
Integrand poly(const Line& K, double a, double b, double c) {
    Integrand f;
    f.eval = [K, a, b, c](const Point& p) {
        double x = K.coord(p);
        return a + x * (b + c * x);
    };
    f.bound = std::fabs(a) + std::fabs(b) + std::fabs(c);
    f.description = "poly";
    return f;
}

// piecewise constant on [b_i, b_{i+1}) with breaks at multiples of 1/8
Integrand random_step_density(Rng& rng, const Line& K) {
    std::vector<double> cuts{0.0};
    for (int i = 1; i < 8; ++i)
        if (uniform(rng, 0, 3) == 0) cuts.push_back(i / 8.0);
    std::vector<double> vals;
    for (std::size_t i = 0; i < cuts.size(); ++i) vals.push_back(eighth(rng, -16, 16));
    Integrand h;
    h.eval = [K, cuts, vals](const Point& p) {
        double x = K.coord(p);
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
        return vals[i == 0 ? 0 : i - 1];
    };
    double m = 0;
    for (double v : vals) m = std::max(m, std::fabs(v));
    h.bound = m;
    h.description = "step density";
    for (std::size_t i = 1; i < cuts.size(); ++i) h.breaks.push_back(Point::real(cuts[i]));
    return h;
}

IntervalSpec random_canonical(Rng& rng, const Line& K, const std::vector<Point>& pts) {
    for (;;) {
        std::size_t i = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pts.size()) - 1));
        std::size_t j = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pts.size()) - 1));
        if (i > j) std::swap(i, j);
        IntervalSpec I{pts[i], uniform(rng, 0, 1) == 1, pts[j], uniform(rng, 0, 1) == 1};
        if (is_canonical(K, I)) return I;
        try {
            return canonicalize(K, I);
        } catch (const RepresentationError&) {
        }
    }
}

// ---- criteria ----

Outcome finite_oracle() {
    Outcome o;
    Rng rng(101);
    EngineConfig cfg;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = uniform(rng, 2, 10);
        oracle::FiniteScenario s;
        for (int i = 0; i < n; ++i) {
            s.G.push_back(eighth(rng));
            s.f.push_back(eighth(rng));
        }
        auto G = StepNBV::table(n, s.G);
        auto r = integrate(table_integrand(s.f), *G, cfg);
        double want = oracle::finite_line_integral(s);
        if (r.verdict != Verdict::Converged || r.value != want) {
            fail(o, fmt("trial got %.17g want %.17g", r.value, want));
            break;
        }
    }
    if (o.ok) o.detail = "1000 random finite lines match exactly";
    return o;
}

Outcome classical_and_constant() {
    Outcome o;
    Line K = Line::real(0.0, 1.0);
    SmoothSpec sq;
    sq.g = [](double x) { return x * x; };
    sq.dg = [](double x) { return 2 * x; };
    sq.monotone = true;
    sq.name = "x^2";
    SmoothNBV G(K, sq);
    EngineConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_level = 30;
    auto r = integrate(poly(K, 0, 1, 0), G, cfg);
    double err = std::fabs(r.value - 2.0 / 3.0);
    if (r.verdict != Verdict::Converged || err >= 1e-8) fail(o, fmt("int x d(x^2) = %.15g, error %.3g", r.value, err));

    Rng rng(202);
    for (int trial = 0; trial < 100 && o.ok; ++trial) {
        Line L = random_line(rng);
        auto S = random_step(rng, L);
        auto c = integrate(one(), *S, EngineConfig{});
        double want = (*S)(L.one());
        if (c.verdict != Verdict::Converged || c.value != want)
            fail(o, "int 1 dG on " + L.describe() + fmt(": %.17g vs G(1) = %.17g", c.value, want));
    }
    if (o.ok) o.detail = fmt("int x d(x^2) error %.2e; 100 step integrators give G(1_K) exactly", err);
    return o;
}

Outcome hake_remark() {
    Outcome o;
    Line K = Line::real(0.0, 1.0);
    auto G = builtin_integrator("indicator_max", K);
    auto f = builtin_integrand("indicator_max", K);
    HakeConfig cfg;
    auto direct = integrate(f, *G, cfg.engine);
    auto h = hake_forward(f, *G, cfg);
    if (direct.verdict != Verdict::Converged || direct.value != 1.0) fail(o, fmt("direct = %.17g", direct.value));
    if (h.verdict != Verdict::Converged || h.limit_value != 0.0 || !h.total || *h.total != 1.0)
        fail(o, fmt("A = %.17g, total = %.17g", h.limit_value, h.total.value_or(NAN)));
    if (o.ok) o.detail = "direct 1, A = 0, A + correction = 1";
    return o;
}

Outcome worked_example() {
    Outcome o;
    Line K = Line::real(0.0, 1.0);
    auto f = builtin_integrand("recip_sq", K);
    HakeConfig cfg;
    cfg.engine.tol = 1e-6;
    cfg.engine.max_level = 24;
    cfg.engine.singular_points = {K.zero()};
    auto G = builtin_integrator("sin_inv_sq_primitive", K);
    auto b = hake_backward(f, *G, cfg);
    double target = oracle::worked_example_target();
    double err = b.total ? std::fabs(*b.total - target) : INFINITY;
    if (b.verdict != Verdict::Converged || err >= 1e-5) fail(o, fmt("B total error %.3g", err));

    auto T = builtin_integrator("variation_of sin_inv_sq_primitive", K);
    auto t = hake_backward(f, *T, cfg);
    bool over = false;
    double worst = 0;
    for (const auto& a : t.approach_points) {
        double y = K.coord(a.y);
        if (y >= 1e-6 && std::fabs(a.partial) > 5.0) over = true;
        worst = std::max(worst, std::fabs(a.partial - 0.5 * oracle::abs_sin_over_u(1.0 / (y * y))));
    }
    if (t.verdict != Verdict::Diverging) fail(o, std::string("T_G verdict ") + verdict_name(t.verdict));
    if (!over) fail(o, "T_G partials stay below 5 down to y = 1e-6");
    if (worst > 1e-4) fail(o, fmt("T_G partials differ from the oracle by %.3g", worst));
    if (o.ok) o.detail = fmt("B error %.2e; T_G diverging, partials within %.1e of the oracle", err, worst);
    return o;
}

Outcome measure_equality() {
    Outcome o;
    Rng rng(505);
    std::size_t rows = 0;
    for (int trial = 0; trial < 100 && o.ok; ++trial) {
        Line K = trial % 2 ? random_split_line(rng) : Line::finite(uniform(rng, 2, 10));
        auto G = random_step(rng, K, 4);
        auto pts = sorted_sample(K, 6, rng);
        std::vector<IntervalSpec> Is;
        for (int i = 0; i < 20; ++i) Is.push_back(random_canonical(rng, K, pts));
        for (const auto& r : total_variation_measure_check(G, Is)) {
            ++rows;
            if (!r.equal || r.abs_mu_g != r.mu_t) {
                fail(o, K.describe() + " " + to_string(r.interval) + fmt(": |mu_G| %.17g mu_T %.17g", r.abs_mu_g, r.mu_t));
                break;
            }
        }
    }
    if (o.ok) o.detail = std::to_string(rows) + " intervals, |mu_G| = mu_T exactly";
    return o;
}

Outcome jordan() {
    Outcome o;
    Rng rng(606);
    for (int trial = 0; trial < 100 && o.ok; ++trial) {
        IntegratorPtr G;
        bool smooth = trial % 2 == 1;
        if (smooth)
            G = random_smooth(rng);
        else
            G = random_step(rng, random_line(rng));
        const Line& K = G->line();
        double slack = smooth ? 1e-12 : 0.0;
        auto J = jordan_decompose(G);
        if (!J.G1->monotone() || !J.G2->monotone()) fail(o, "parts not declared monotone");
        auto pts = sorted_sample(K, 1000, rng);
        double prev1 = -INFINITY, prev2 = -INFINITY;
        for (const auto& p : pts) {
            double a = (*J.G1)(p), b = (*J.G2)(p), g = (*G)(p);
            double scale = std::max(1.0, std::fabs(a));
            if (std::fabs(a - b - g) > slack * scale) {
                fail(o, G->describe() + fmt(": G1 - G2 - G = %.3g", a - b - g));
                break;
            }
            if (a < prev1 - slack * scale || b < prev2 - slack * scale) {
                fail(o, G->describe() + " at " + to_string(p) + fmt(": a part decreases by %.3g / %.3g", prev1 - a, prev2 - b));
                break;
            }
            prev1 = a;
            prev2 = b;
        }
    }
    if (o.ok) o.detail = "100 specimens, G1 - G2 = G and both parts nondecreasing";
    return o;
}

Outcome substitution() {
    Outcome o;
    Rng rng(707);
    Line K = Line::real(0.0, 1.0);
    auto T = builtin_integrator("variation_of tent", K);
    EngineConfig cfg;
    EngineConfig inner = cfg;
    inner.tol = cfg.tol / 10;
    double worst = 0;
    for (int pair = 0; pair < 20 && o.ok; ++pair) {
        auto h = random_step_density(rng, K);
        auto f = poly(K, eighth(rng), eighth(rng), eighth(rng));
        auto H = accumulator(h, T, inner);
        auto lhs = integrate(f, *H, cfg);
        auto rhs = integrate(product(f, h), *T, cfg);
        double d = std::fabs(lhs.value - rhs.value);
        worst = std::max(worst, d);
        if (lhs.verdict != Verdict::Converged || rhs.verdict != Verdict::Converged)
            fail(o, std::string("not converged: ") + verdict_name(lhs.verdict) + "/" + verdict_name(rhs.verdict));
        else if (d >= 3 * cfg.tol)
            fail(o, fmt("|int f dH - int fh dT| = %.3g", d));
    }
    if (o.ok) o.detail = fmt("20 pairs, worst difference %.2e", worst);
    return o;
}

Outcome step_approx() {
    Outcome o;
    Line K = Line::real(0.0, 1.0);
    double worst = 0;
    for (const char* name : {"identity", "tent", "sin_inv_sq_primitive"}) {
        auto G = builtin_integrator(name, K);
        for (double eps : {0.1, 0.01, 0.001}) {
            auto a = step_approximation(*G, eps);
            double d = sup_distance(*G, a.S, 10000);
            worst = std::max(worst, d / eps);
            if (d >= eps) fail(o, std::string(name) + fmt(": eps %.3g sup %.3g", eps, d));
        }
    }
    if (o.ok) o.detail = fmt("9 approximations, worst sup/eps %.3f", worst);
    return o;
}

Outcome lab() {
    Outcome o;
    Line K = Line::real(0.0, 1.0);
    Rng rng(909);
    SmoothSpec sq;
    sq.g = [](double x) { return x * x; };
    sq.dg = [](double x) { return 2 * x; };
    sq.monotone = true;
    sq.name = "x^2";
    std::vector<IntegratorPtr> Gs{builtin_integrator("identity", K), std::make_shared<SmoothNBV>(K, sq)};
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::vector<Point> xs;
    for (int i = 0; i < 100; ++i) xs.push_back(Point::real(u(rng)));
    std::sort(xs.begin(), xs.end());
    const int depth = 20;
    for (const auto& G : Gs) {
        std::vector<std::vector<Point>> U(xs.size()), V(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (int n = 1; n <= depth; ++n) {
                U[i].push_back(u_n(*G, xs[i], n).point);
                V[i].push_back(v_n(*G, xs[i], n).point);
            }
        for (std::size_t i = 0; i < xs.size() && o.ok; ++i) {
            for (int n = 0; n < depth; ++n) {
                if (!(U[i][n] < xs[i] && xs[i] < V[i][n])) fail(o, G->describe() + " sandwich at " + to_string(xs[i]));
                if (n + 1 < depth && !(U[i][n] <= U[i][n + 1] && V[i][n + 1] <= V[i][n]))
                    fail(o, G->describe() + " not monotone in n at " + to_string(xs[i]));
                if (i + 1 < xs.size() && !(U[i][n] <= U[i + 1][n] && V[i][n] <= V[i + 1][n]))
                    fail(o, G->describe() + " not monotone in x at " + to_string(xs[i]));
            }
            auto Ul = big_U(*G, xs[i], depth), Vl = big_V(*G, xs[i], depth);
            if (std::fabs(Ul.point.x - xs[i].x) > 1e-4 || std::fabs(Vl.point.x - xs[i].x) > 1e-4)
                fail(o, G->describe() + " U/V do not reach " + to_string(xs[i]));
        }
    }
    auto rep = convergence_report(poly(K, 0, 1, 0), Gs[0], 512, 12, 1e-3);
    if (rep.fraction() < 0.99) fail(o, fmt("f_n -> f on %.4f of the sample", rep.fraction()));
    if (o.ok) o.detail = fmt("order, sandwich and limits hold; f_n within 1e-3 on %.1f%% of 512 points", 100 * rep.fraction());
    return o;
}

Outcome converse_hake() {
    Outcome o;
    Rng rng(1010);
    Line K = Line::real(0.0, 1.0);
    HakeConfig cfg;
    int done = 0, tried = 0;
    double worst = 0;
    while (done < 20 && tried < 60 && o.ok) {
        ++tried;
        Integrand f = poly(K, eighth(rng), eighth(rng), eighth(rng));
        IntegratorPtr G;
        switch (tried % 4) {
            case 0: G = builtin_integrator("identity", K); break;
            case 1: G = builtin_integrator("tent", K); break;
            case 2: G = random_step(rng, K, 3); break;
            default: G = StepNBV::from_jumps(K, {Point::real(0.25), K.one()}, {eighth(rng), eighth(rng)}, 0.0,
                                             builtin_integrator("identity", K));
        }
        auto direct = integrate(f, *G, cfg.engine);
        if (direct.verdict != Verdict::Converged) continue;
        ++done;
        auto h = hake_forward(f, *G, cfg);
        if (h.verdict != Verdict::Converged || !h.total) {
            fail(o, G->describe() + std::string(": forward ") + verdict_name(h.verdict));
            break;
        }
        double d = std::fabs(*h.total - direct.value);
        worst = std::max(worst, d);
        if (d >= 3 * cfg.engine.tol) fail(o, G->describe() + fmt(": |total - direct| = %.3g", d));
    }
    if (o.ok && done < 20) fail(o, "fewer than 20 converged scenarios");
    if (o.ok) o.detail = fmt("20 scenarios, worst |A + correction - direct| %.2e", worst);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    // optional criterion ids to run a subset
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    struct Criterion {
        int id;
        double budget;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, 5, finite_oracle},     {2, 5, classical_and_constant}, {3, 1, hake_remark},  {4, 30, worked_example},
        {5, 10, measure_equality}, {6, 10, jordan},                {7, 20, substitution}, {8, 10, step_approx},
        {9, 30, lab},              {10, 60, converse_hake},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.ok && secs > c.budget) {
            out.ok = false;
            out.detail += fmt(" (over the %.0f s budget)", c.budget);
        }
        if (!out.ok) ++failures;
        std::printf("%s criterion %d (%.2f s): %s\n", out.ok ? "PASS" : "FAIL", c.id, secs, out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
