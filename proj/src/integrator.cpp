#include "ksl/integrator.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

void sort_unique(std::vector<Point>& v) {
    std::sort(v.begin(), v.end(), [](const Point& a, const Point& b) { return a < b; });
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool has_coordinate_continuum(const Line& K) { return K.family() == Family::Real || K.family() == Family::Split; }

struct GslQuiet {
    GslQuiet() { gsl_set_error_handler_off(); }
};
const GslQuiet gsl_quiet;

// int_a^b |h(x)| dx with the given interior breakpoints
double integrate_abs(const std::function<double(double)>& h, double a, double b, std::vector<double> pts, double tol) {
    if (!(a < b)) return 0.0;
    pts.push_back(a);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double v) { return v < a || v > b; }), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    struct Ctx {
        const std::function<double(double)>* h;
    } ctx{&h};
    gsl_function F;
    F.function = [](double x, void* p) -> double { return std::fabs((*static_cast<Ctx*>(p)->h)(x)); };
    F.params = &ctx;
    const std::size_t limit = 4000;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
    double result = 0, abserr = 0;
    int status = gsl_integration_qagp(&F, pts.data(), pts.size(), std::max(tol, 1e-15), 1e-13, limit, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS && abserr > std::max(1e3 * tol, 1e-9))
        throw NonconvergenceError(std::string("variation quadrature failed: ") + gsl_strerror(status), result, abserr);
    return result;
}

}  // namespace

// ---------------------------------------------------------------- Integrand

Integrand Integrand::constant(double c) {
    Integrand f;
    f.eval = [c](const Point&) { return c; };
    f.bound = std::fabs(c);
    f.description = "const " + std::to_string(c);
    return f;
}

Integrand restrict_to(const Line& K, const Integrand& f, const IntervalSpec& I) {
    Integrand g;
    auto inner = f.eval;
    g.eval = [K, I, inner](const Point& p) { return contains(K, I, p) ? inner(p) : 0.0; };
    g.bound = f.bound;
    g.description = f.description + " on " + to_string(I);
    g.breaks = f.breaks;
    g.breaks.push_back(I.left);
    g.breaks.push_back(I.right);
    sort_unique(g.breaks);
    return g;
}

Integrand product(const Integrand& f, const Integrand& g) {
    Integrand h;
    auto a = f.eval, b = g.eval;
    h.eval = [a, b](const Point& p) { return a(p) * b(p); };
    if (f.bound && g.bound) h.bound = *f.bound * *g.bound;
    h.description = "(" + f.description + ")*(" + g.description + ")";
    h.breaks = f.breaks;
    h.breaks.insert(h.breaks.end(), g.breaks.begin(), g.breaks.end());
    sort_unique(h.breaks);
    return h;
}

Integrand combine(double alpha, const Integrand& f, double beta, const Integrand& g) {
    Integrand h;
    auto a = f.eval, b = g.eval;
    h.eval = [alpha, beta, a, b](const Point& p) { return alpha * a(p) + beta * b(p); };
    if (f.bound && g.bound) h.bound = std::fabs(alpha) * *f.bound + std::fabs(beta) * *g.bound;
    h.description = std::to_string(alpha) + "*(" + f.description + ")+" + std::to_string(beta) + "*(" + g.description + ")";
    h.breaks = f.breaks;
    h.breaks.insert(h.breaks.end(), g.breaks.begin(), g.breaks.end());
    sort_unique(h.breaks);
    return h;
}

const char* mode_name(LeftLimitMode m) {
    switch (m) {
        case LeftLimitMode::Analytic: return "analytic";
        case LeftLimitMode::Numeric: return "numeric";
        case LeftLimitMode::Structural: return "structural";
    }
    return "?";
}

// ---------------------------------------------------------------- Integrator

double Integrator::l_g(const Point& x) const {
    line_.check(x);
    if (line_.is_min(x)) return 0.0;
    if (line_.is_left_isolated(x)) return (*this)(line_.predecessor(x));
    return dense_left_limit(x);
}

double Integrator::dense_left_limit(const Point& x) const { return numeric_left_limit(x); }

double Integrator::numeric_left_limit(const Point& x) const {
    double v[3] = {0, 0, 0};
    int top = std::min(numeric_limit.max_level, 50);
    for (int k = 1; k <= top; ++k) {
        Point y;
        try {
            y = line_.left_approach(x, k);
        } catch (const NonconvergenceError&) {
            break;
        }
        v[0] = v[1];
        v[1] = v[2];
        v[2] = (*this)(y);
        if (k >= 3) {
            double spread = std::max({std::fabs(v[2] - v[1]), std::fabs(v[2] - v[0]), std::fabs(v[1] - v[0])});
            if (spread < numeric_limit.tol / 4) return v[2];
        }
    }
    throw NonconvergenceError("left limit at " + to_string(x) + " did not stabilise", v[2], std::fabs(v[2] - v[1]));
}

double Integrator::variation(const Point& a, const Point& b, double tol) const {
    switch (var_kind()) {
        case VarKind::Jumps:
        case VarKind::AcJumps: return ac_jump_variation(a, b, tol);
        default: return numeric_variation(a, b, tol);
    }
}

double Integrator::ac_jump_variation(const Point& a, const Point& b, double tol) const {
    if (!(a < b)) return 0.0;
    double jumps = 0.0;
    std::vector<double> cuts;
    for (const Point& c : atoms()) {
        if (a < c && !(b < c)) jumps += std::fabs((*this)(c) - l_g(c));
        cuts.push_back(line_.coord(c));
    }
    if (!has_continuous_part()) return jumps;
    for (const Point& s : singular_hints()) cuts.push_back(line_.coord(s));
    for (double z : slope_zeros()) cuts.push_back(z);
    auto h = [this](double x) { return slope(x); };
    return jumps + integrate_abs(h, line_.coord(a), line_.coord(b), cuts, tol);
}

double Integrator::numeric_variation(const Point& a, const Point& b, double tol) const {
    if (!(a < b)) return 0.0;
    double prev = -1.0, val = 0.0;
    std::vector<Point> extra = atoms();
    for (int L = 4; L <= 20; ++L) {
        std::vector<Point> D{a, b};
        for (const Point& p : line_.division(L))
            if (a < p && p < b) D.push_back(p);
        for (const Point& p : extra)
            if (a < p && p < b) D.push_back(p);
        sort_unique(D);
        val = variation_on_division(*this, D);
        if (line_.family() == Family::Finite) return val;
        if (prev >= 0 && val - prev <= std::max(tol, 1e-10 * std::max(1.0, val))) return val;
        prev = val;
    }
    return val;
}

// ---------------------------------------------------------------- StepNBV

StepNBV::StepNBV(Line line, std::vector<Point> points, std::vector<double> levels, double before, IntegratorPtr base)
    : Integrator(std::move(line)), points_(std::move(points)), levels_(std::move(levels)), before_(before),
      base_(std::move(base)) {
    if (points_.size() != levels_.size()) throw UsageError("step integrator: points and values differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        this->line().check(points_[i]);
        if (i > 0 && !(points_[i - 1] < points_[i])) throw UsageError("step integrator: points must be strictly increasing");
    }
    if (base_) {
        if (!(base_->line() == this->line())) throw UsageError("step integrator: base lives on another line");
        if (!base_->atoms().empty()) throw UsageError("step integrator: base must be continuous");
    }
}

std::shared_ptr<StepNBV> StepNBV::from_jumps(Line line, std::vector<Point> points, const std::vector<double>& jumps,
                                             double before, IntegratorPtr base) {
    if (points.size() != jumps.size()) throw UsageError("step integrator: points and jumps differ in length");
    std::vector<double> levels;
    double acc = before;
    for (double j : jumps) {
        acc += j;
        levels.push_back(acc);
    }
    return std::make_shared<StepNBV>(std::move(line), std::move(points), std::move(levels), before, std::move(base));
}

std::shared_ptr<StepNBV> StepNBV::table(std::int64_t n, const std::vector<double>& values) {
    if (static_cast<std::int64_t>(values.size()) != n) throw UsageError("table needs one value per point");
    std::vector<Point> pts;
    for (std::int64_t i = 0; i < n; ++i) pts.push_back(Point::finite(i));
    return std::make_shared<StepNBV>(Line::finite(n), std::move(pts), values, 0.0);
}

double StepNBV::level_at(const Point& p, bool strict) const {
    auto less = [](const Point& a, const Point& b) { return a < b; };
    auto it = strict ? std::lower_bound(points_.begin(), points_.end(), p, less)
                     : std::upper_bound(points_.begin(), points_.end(), p, less);
    if (it == points_.begin()) return before_;
    return levels_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double StepNBV::operator()(const Point& p) const {
    double v = level_at(p, false);
    return base_ ? v + (*base_)(p) : v;
}

double StepNBV::dense_left_limit(const Point& x) const {
    double v = level_at(x, true);
    return base_ ? v + base_->l_g(x) : v;
}

LeftLimitMode StepNBV::left_limit_mode() const {
    if (base_ && base_->left_limit_mode() == LeftLimitMode::Numeric) return LeftLimitMode::Numeric;
    return LeftLimitMode::Structural;
}

std::vector<Point> StepNBV::singular_hints() const { return base_ ? base_->singular_hints() : std::vector<Point>{}; }

std::vector<double> StepNBV::jumps() const {
    std::vector<double> j;
    double prev = before_;
    for (double v : levels_) {
        j.push_back(v - prev);
        prev = v;
    }
    return j;
}

bool StepNBV::monotone() const {
    for (double j : jumps())
        if (j < 0) return false;
    return !base_ || base_->monotone();
}

VarKind StepNBV::var_kind() const {
    if (!base_) return VarKind::Jumps;
    VarKind k = base_->var_kind();
    return k == VarKind::Jumps ? VarKind::Jumps : k;
}

double StepNBV::variation(const Point& a, const Point& b, double tol) const {
    if (!(a < b)) return 0.0;
    // jump part and continuous base are mutually singular, so variations add
    double s = 0.0;
    double prev = before_;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (a < points_[i] && !(b < points_[i])) s += std::fabs(levels_[i] - prev);
        prev = levels_[i];
    }
    if (base_) s += base_->variation(a, b, tol);
    return s;
}

std::string StepNBV::describe() const {
    std::string s = "step{";
    for (std::size_t i = 0; i < points_.size() && i < 8; ++i) s += (i ? "," : "") + to_string(points_[i]);
    if (points_.size() > 8) s += ",...";
    s += "}";
    if (base_) s += "+" + base_->describe();
    return s;
}

// ---------------------------------------------------------------- SmoothNBV

SmoothNBV::SmoothNBV(Line line, SmoothSpec spec) : Integrator(std::move(line)), spec_(std::move(spec)) {
    if (!spec_.g) throw UsageError("smooth integrator needs a value function");
    if (spec_.name.empty()) spec_.name = "smooth";
}

std::vector<Point> SmoothNBV::singular_hints() const {
    std::vector<Point> out;
    if (!has_coordinate_continuum(line())) return out;
    for (double x : spec_.singular)
        if (x >= line().lo() && x <= line().hi()) out.push_back(line().at(x));
    return out;
}

VarKind SmoothNBV::var_kind() const {
    if (spec_.abs_primitive && has_coordinate_continuum(line())) return VarKind::Closed;
    if (spec_.dg && has_coordinate_continuum(line())) return VarKind::AcJumps;
    return VarKind::Numeric;
}

std::vector<double> SmoothNBV::slope_zeros() const {
    std::call_once(zeros_->once, [this] {
        if (!spec_.dg || !has_coordinate_continuum(line())) return;
        const int cells = 4096;
        double lo = line().coord_lo(), w = line().coord_hi() - lo;
        double xa = lo, da = spec_.dg(xa);
        for (int i = 1; i <= cells; ++i) {
            double xb = lo + w * i / cells, db = spec_.dg(xb);
            if (std::isfinite(da) && std::isfinite(db) && (da < 0) != (db < 0)) {
                double l = xa, r = xb;
                for (int k = 0; k < 80 && l < r; ++k) {
                    double m = 0.5 * (l + r);
                    if (m <= l || m >= r) break;
                    ((spec_.dg(m) < 0) == (da < 0) ? l : r) = m;
                }
                zeros_->zeros.push_back(0.5 * (l + r));
            }
            xa = xb;
            da = db;
        }
    });
    return zeros_->zeros;
}

double SmoothNBV::variation(const Point& a, const Point& b, double tol) const {
    if (!(a < b)) return 0.0;
    switch (var_kind()) {
        case VarKind::Closed: return spec_.abs_primitive(line().coord(b)) - spec_.abs_primitive(line().coord(a));
        case VarKind::AcJumps: return ac_jump_variation(a, b, tol);
        default: return numeric_variation(a, b, tol);
    }
}

// ---------------------------------------------------------------- LinearNBV

LinearNBV::LinearNBV(double alpha, IntegratorPtr A, double beta, IntegratorPtr B, std::string name)
    : Integrator(A->line()), alpha_(alpha), beta_(beta), A_(std::move(A)), B_(std::move(B)), name_(std::move(name)) {
    if (!(A_->line() == B_->line())) throw UsageError("linear combination of integrators on different lines");
    if (name_.empty()) name_ = std::to_string(alpha_) + "*(" + A_->describe() + ")+" + std::to_string(beta_) + "*(" + B_->describe() + ")";
}

double LinearNBV::operator()(const Point& p) const { return alpha_ * (*A_)(p) + beta_ * (*B_)(p); }

double LinearNBV::dense_left_limit(const Point& x) const { return alpha_ * A_->l_g(x) + beta_ * B_->l_g(x); }

LeftLimitMode LinearNBV::left_limit_mode() const {
    auto a = A_->left_limit_mode(), b = B_->left_limit_mode();
    if (a == LeftLimitMode::Numeric || b == LeftLimitMode::Numeric) return LeftLimitMode::Numeric;
    if (a == LeftLimitMode::Structural || b == LeftLimitMode::Structural) return LeftLimitMode::Structural;
    return LeftLimitMode::Analytic;
}

std::vector<Point> LinearNBV::atoms() const {
    auto v = A_->atoms();
    auto w = B_->atoms();
    v.insert(v.end(), w.begin(), w.end());
    sort_unique(v);
    return v;
}

std::vector<Point> LinearNBV::singular_hints() const {
    auto v = A_->singular_hints();
    auto w = B_->singular_hints();
    v.insert(v.end(), w.begin(), w.end());
    sort_unique(v);
    return v;
}

static bool slope_known(const Integrator& G) {
    VarKind k = G.var_kind();
    return k == VarKind::Jumps || k == VarKind::AcJumps || k == VarKind::Closed;
}

VarKind LinearNBV::var_kind() const {
    auto a = A_->var_kind(), b = B_->var_kind();
    if (a == VarKind::Jumps && b == VarKind::Jumps) return VarKind::Jumps;
    if (has_coordinate_continuum(line()) && slope_known(*A_) && slope_known(*B_)) return VarKind::AcJumps;
    return VarKind::Numeric;
}

double LinearNBV::slope(double x) const { return alpha_ * A_->slope(x) + beta_ * B_->slope(x); }

IntegratorPtr difference(IntegratorPtr A, IntegratorPtr B) {
    std::string name = "difference(" + A->describe() + "," + B->describe() + ")";
    return std::make_shared<LinearNBV>(1.0, std::move(A), -1.0, std::move(B), name);
}

// ---------------------------------------------------------------- VariationNBV

VariationNBV::VariationNBV(IntegratorPtr G, double tol) : Integrator(G->line()), G_(std::move(G)), tol_(tol) {}

double VariationNBV::operator()(const Point& p) const {
    return std::fabs((*G_)(line().zero())) + G_->variation(line().zero(), p, tol_);
}

double VariationNBV::dense_left_limit(const Point& x) const {
    return (*this)(x) - std::fabs((*G_)(x) - G_->l_g(x));
}

VarKind VariationNBV::var_kind() const {
    return G_->var_kind() == VarKind::Jumps ? VarKind::Jumps : VarKind::Closed;
}

double VariationNBV::slope(double x) const { return std::fabs(G_->slope(x)); }

double VariationNBV::variation(const Point& a, const Point& b, double) const {
    if (!(a < b)) return 0.0;
    return (*this)(b) - (*this)(a);
}

// ---------------------------------------------------------------- NumericNBV

NumericNBV::NumericNBV(Line line, PointFn g, std::string name, std::vector<std::pair<Point, double>> declared_left,
                       bool monotone)
    : Integrator(std::move(line)), g_(std::move(g)), name_(std::move(name)), declared_(std::move(declared_left)),
      monotone_(monotone) {
    for (auto& d : declared_) this->line().check(d.first);
}

std::vector<Point> NumericNBV::atoms() const {
    std::vector<Point> v;
    for (auto& d : declared_) v.push_back(d.first);
    sort_unique(v);
    return v;
}

double NumericNBV::dense_left_limit(const Point& x) const {
    for (auto& d : declared_)
        if (d.first == x) return d.second;
    return numeric_left_limit(x);
}

// ---------------------------------------------------------------- operations

double variation_on_division(const Integrator& G, const std::vector<Point>& D) {
    for (std::size_t i = 1; i < D.size(); ++i)
        if (D[i] < D[i - 1]) throw UsageError("variation_on_division: division is not sorted");
    double s = 0.0;
    for (std::size_t i = 1; i < D.size(); ++i) s += std::fabs(G(D[i]) - G(D[i - 1]));
    return s;
}

double total_variation(const Integrator& G, double tol) {
    return G.variation(G.line().zero(), G.line().one(), tol);
}

std::shared_ptr<VariationNBV> variation_function(IntegratorPtr G) { return std::make_shared<VariationNBV>(std::move(G)); }

Jordan jordan_decompose(IntegratorPtr G) {
    auto T = variation_function(G);
    auto G2 = std::make_shared<LinearNBV>(1.0, T, -1.0, G, "T_G - " + G->describe());
    G2->declare_monotone(true);
    return {T, G2};
}

double measure_interval(const Integrator& G, const IntervalSpec& I) {
    const Line& K = G.line();
    if (I.left_closed && I.right_closed && I.left == I.right) {
        K.check(I.left);
        return G(I.left) - G.l_g(I.left);
    }
    if (!is_canonical(K, I))
        throw UsageError("measure_interval: " + to_string(I) + " is not in canonical form; canonicalize it first");
    double right = I.right_closed ? G(I.right) : G.l_g(I.right);
    double left = I.left_closed ? 0.0 : G(I.left);
    return right - left;
}

BoundCheck variation_bound_check(const Integrator& G, const IntervalSpec& I, double tol) {
    double mu = std::fabs(measure_interval(G, I));
    double var = G.variation(I.left, I.right, tol);
    if (I.left_closed) var += std::fabs(G(G.line().zero()));
    return {mu, var, mu <= var + tol};
}

std::vector<MeasureCheckRow> total_variation_measure_check(IntegratorPtr G, const std::vector<IntervalSpec>& intervals) {
    if (G->var_kind() != VarKind::Jumps)
        throw PreconditionError("total_variation_measure_check needs a pure-jump integrator (exact arithmetic)");
    const Line& K = G->line();
    auto T = variation_function(G);
    std::vector<MeasureCheckRow> rows;
    auto atoms = G->atoms();
    for (const IntervalSpec& I : intervals) {
        if (!is_canonical(K, I)) throw UsageError("total_variation_measure_check: " + to_string(I) + " is not canonical");
        const Point& a = I.left;
        const Point& b = I.right;
        auto inside = [&](const Point& p) { return (I.left_closed ? !(p < a) : a < p) && p < b; };
        std::vector<Point> cand;
        if (I.left_closed) cand.push_back(K.zero());
        Point lower = a;
        for (const Point& c : atoms) {
            bool in_range = I.left_closed ? !(c < a) : a < c;
            if (!in_range || b < c) continue;
            if (c < b) cand.push_back(c);
            if (K.is_min(c)) continue;
            if (K.is_left_isolated(c)) {
                Point p = K.predecessor(c);
                if (inside(p)) cand.push_back(p);
            } else if (lower < c) {
                if (auto m = K.between(lower, c); m && inside(*m)) cand.push_back(*m);
            }
            lower = c;
        }
        sort_unique(cand);
        if (cand.size() > 12)
            throw CapacityError("total_variation_measure_check: " + std::to_string(cand.size()) +
                                " cut candidates exceed the exhaustive limit of 12");
        const std::size_t m = cand.size();
        std::vector<double> gc(m);
        for (std::size_t i = 0; i < m; ++i) gc[i] = (*G)(cand[i]);
        const double g_end = I.right_closed ? (*G)(b) : G->l_g(b);
        const double g_start = I.left_closed ? 0.0 : (*G)(a);
        double best = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            double s = 0.0, prev = g_start;
            for (std::size_t i = 0; i < m; ++i) {
                if (!(mask & (1u << i))) continue;
                s += std::fabs(gc[i] - prev);
                prev = gc[i];
            }
            s += std::fabs(g_end - prev);
            best = std::max(best, s);
        }
        double mt = measure_interval(*T, I);
        rows.push_back({I, best, mt, static_cast<int>(m), best == mt});
    }
    return rows;
}

// ---------------------------------------------------------------- step approximation

double StepFunction::operator()(const Point& p) const {
    auto less = [](const Point& a, const Point& b) { return a < b; };
    auto it = std::lower_bound(division.begin(), division.end(), p, less);
    if (it != division.end() && *it == p) return at_points[static_cast<std::size_t>(it - division.begin())];
    if (it == division.begin() || it == division.end()) throw UsageError("step function evaluated off its line");
    return on_gaps[static_cast<std::size_t>(it - division.begin()) - 1];
}

namespace {

// oscillation of G on the open real gap (s,t), by sampling plus the one-sided limits
double gap_oscillation(const Integrator& G, double s, double t, const Point& right_end, bool right_is_hard) {
    const Line& K = G.line();
    double lo = G(K.at(s, Side::Plus)), hi = lo;
    auto take = [&](double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (int k = 0; k < 32; ++k) take(G(K.at(s + (t - s) * (k + 0.5) / 32.0)));
    take(right_is_hard ? G.l_g(right_end) : G(right_end));
    return hi - lo;
}

}  // namespace

StepApprox step_approximation(const Integrator& G, double eps, std::size_t max_divisions) {
    const Line& K = G.line();
    StepApprox out{};
    StepFunction& S = out.S;
    auto push_point = [&](const Point& p) {
        S.division.push_back(p);
        S.at_points.push_back(G(p));
    };
    if (K.family() == Family::Finite) {
        for (const Point& p : K.division(0)) push_point(p);
        S.on_gaps.assign(S.division.size() - 1, 0.0);
        for (std::size_t k = 0; k + 1 < S.division.size(); ++k) S.on_gaps[k] = S.at_points[k + 1];
        out.divisions = S.division.size();
        return out;
    }
    if (K.family() == Family::Ordinal) {
        // isolated points are division points; only the tail below each limit needs a witness
        for (std::int32_t q = 0; q < K.limit_count(); ++q) {
            Point limit = Point::ordinal(q + 1, 0);
            double Lv = G.l_g(limit);
            std::int64_t m = 1;
            int level = 0;
            for (;; m *= 2, ++level) {
                double lo = Lv, hi = Lv;
                for (std::int64_t d = 1; d <= (std::int64_t{1} << 30); d *= 2) {
                    double v = G(Point::ordinal(q, m + d));
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                if (hi - lo < eps / 2) break;
                if (S.division.size() + static_cast<std::size_t>(m) > max_divisions)
                    throw NonconvergenceError("step_approximation: tail below " + to_string(limit) + " keeps oscillating");
            }
            out.levels_used = std::max(out.levels_used, level);
            for (std::int64_t r = 0; r <= m; ++r) push_point(Point::ordinal(q, r));
        }
        for (std::int64_t r = 0; r <= K.tail_length(); ++r) push_point(Point::ordinal(K.limit_count(), r));
        for (std::size_t k = 0; k + 1 < S.division.size(); ++k) {
            const Point& a = S.division[k];
            const Point& b = S.division[k + 1];
            // the only nonempty gaps are ((q,m), (q+1,0))
            if (K.is_limit(b) && a.q + 1 == b.q) S.on_gaps.push_back(G(Point::ordinal(a.q, a.n + 1)));
            else S.on_gaps.push_back(S.at_points[k + 1]);
        }
        out.divisions = S.division.size();
        return out;
    }
    // real and split lines
    std::vector<Point> hard{K.zero(), K.one()};
    for (const Point& c : G.atoms()) hard.push_back(c);
    for (double s : K.splits()) {
        hard.push_back(Point::split(s, Side::Minus));
        hard.push_back(Point::split(s, Side::Plus));
    }
    sort_unique(hard);
    const double w = K.hi() - K.lo();
    push_point(hard.front());
    for (std::size_t i = 0; i + 1 < hard.size(); ++i) {
        const Point& h0 = hard[i];
        const Point& h1 = hard[i + 1];
        double x0 = h0.x, x1 = h1.x;
        if (x0 == x1) {  // s- then s+: empty gap
            S.on_gaps.push_back(G(h1));
            push_point(h1);
            continue;
        }
        double s = x0;
        int j = 0;
        while (s < x1) {
            double t = std::min(x1, s + std::ldexp(x1 - x0, -j));
            bool last = (t >= x1);
            Point tp = last ? h1 : K.at(t);
            double osc = gap_oscillation(G, s, t, tp, last);
            if (osc < eps / 2) {
                S.on_gaps.push_back(G(K.at(s + (t - s) / 2)));
                push_point(tp);
                s = t;
                out.levels_used = std::max(out.levels_used, j);
                if (j > 0) --j;
            } else {
                ++j;
                if (std::ldexp(x1 - x0, -j) < 1e-15 * w)
                    throw NonconvergenceError("step_approximation: oscillation near " + std::to_string(s) + " does not fall below eps/2");
            }
            if (S.division.size() > max_divisions)
                throw NonconvergenceError("step_approximation: more than " + std::to_string(max_divisions) + " division points needed");
        }
    }
    out.divisions = S.division.size();
    return out;
}

double sup_distance(const Integrator& G, const StepFunction& S, std::size_t n) {
    const Line& K = G.line();
    std::vector<Point> pts = S.division;
    for (const Point& c : G.atoms()) pts.push_back(c);
    switch (K.family()) {
        case Family::Finite: {
            auto all = K.division(0);
            pts.insert(pts.end(), all.begin(), all.end());
            break;
        }
        case Family::Ordinal: {
            std::size_t per = n / static_cast<std::size_t>(K.limit_count() + 1) + 1;
            for (std::int32_t q = 0; q < K.limit_count(); ++q) {
                for (std::size_t r = 0; r < per; ++r) pts.push_back(Point::ordinal(q, static_cast<std::int64_t>(r)));
                for (std::int64_t r = 1; r <= (std::int64_t{1} << 30); r *= 2) pts.push_back(Point::ordinal(q, r));
            }
            for (std::int64_t r = 0; r <= K.tail_length(); ++r) pts.push_back(Point::ordinal(K.limit_count(), r));
            break;
        }
        default: {
            for (std::size_t i = 0; i < n; ++i) {
                double x = K.lo() + (K.hi() - K.lo()) * static_cast<double>(i) / static_cast<double>(n - 1);
                if (i == n - 1) x = K.hi();
                if (K.is_split_value(x)) {
                    pts.push_back(Point::split(x, Side::Minus));
                    pts.push_back(Point::split(x, Side::Plus));
                } else {
                    pts.push_back(K.at(x));
                }
            }
            for (double s : K.splits()) {
                pts.push_back(Point::split(s, Side::Minus));
                pts.push_back(Point::split(s, Side::Plus));
            }
        }
    }
    double d = 0.0;
    for (const Point& p : pts) d = std::max(d, std::fabs(G(p) - S(p)));
    return d;
}

}  // namespace ksl
