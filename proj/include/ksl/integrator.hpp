#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksl/line.hpp"

namespace ksl {

using PointFn = std::function<double(const Point&)>;

struct Integrand {
    PointFn eval;
    std::optional<double> bound;
    std::string description;
    std::vector<Point> breaks;  // points where f may jump; the engine cuts there

    double operator()(const Point& p) const { return eval(p); }

    static Integrand constant(double c);
};

// f * chi_I
Integrand restrict_to(const Line& K, const Integrand& f, const IntervalSpec& I);
Integrand product(const Integrand& f, const Integrand& g);
Integrand combine(double a, const Integrand& f, double b, const Integrand& g);

enum class LeftLimitMode { Analytic, Numeric, Structural };
const char* mode_name(LeftLimitMode m);

// how Var(G|[a,b]) can be obtained
enum class VarKind {
    Jumps,     // pure jump function: sum of |jumps|, exact
    AcJumps,   // jumps plus an absolutely continuous part with known slope
    Closed,    // closed-form variation supplied by the representation
    Numeric,   // sup over refining divisions
};

struct NumericLimit {
    double tol = 1e-10;
    int max_level = 60;
};

class Integrator {
public:
    explicit Integrator(Line line) : line_(std::move(line)) {}
    virtual ~Integrator() = default;

    const Line& line() const { return line_; }
    virtual double operator()(const Point& p) const = 0;

    // L_G: 0 at 0_K, G(x^-) at left-isolated x, the left limit at left-dense x
    double l_g(const Point& x) const;

    virtual LeftLimitMode left_limit_mode() const { return LeftLimitMode::Numeric; }
    // points where G may jump (G != L_G); every jump must be listed for
    // Jumps/AcJumps representations
    virtual std::vector<Point> atoms() const { return {}; }
    virtual std::vector<Point> singular_hints() const { return {}; }
    virtual bool monotone() const { return false; }
    virtual VarKind var_kind() const { return VarKind::Numeric; }
    // derivative of the continuous part w.r.t. the line coordinate
    virtual double slope(double) const { return 0.0; }
    // coordinates where slope() changes sign; quadrature of |slope| cuts there
    virtual std::vector<double> slope_zeros() const { return {}; }
    virtual bool has_continuous_part() const { return var_kind() != VarKind::Jumps; }

    // Var(G|[a,b]), a <= b
    virtual double variation(const Point& a, const Point& b, double tol = 1e-12) const;
    virtual std::string describe() const = 0;

    NumericLimit numeric_limit;

protected:
    virtual double dense_left_limit(const Point& x) const;
    double numeric_left_limit(const Point& x) const;
    double numeric_variation(const Point& a, const Point& b, double tol) const;
    double ac_jump_variation(const Point& a, const Point& b, double tol) const;

private:
    Line line_;
};

using IntegratorPtr = std::shared_ptr<const Integrator>;

// G = before on [0_K, c_0); levels[i] on [c_i, c_{i+1}); plus an optional
// continuous base
class StepNBV : public Integrator {
public:
    StepNBV(Line line, std::vector<Point> points, std::vector<double> levels, double before = 0.0,
            IntegratorPtr base = nullptr);
    static std::shared_ptr<StepNBV> from_jumps(Line line, std::vector<Point> points, const std::vector<double>& jumps,
                                               double before = 0.0, IntegratorPtr base = nullptr);
    // table of values at every point of a finite line
    static std::shared_ptr<StepNBV> table(std::int64_t n, const std::vector<double>& values);

    double operator()(const Point& p) const override;
    LeftLimitMode left_limit_mode() const override;
    std::vector<Point> atoms() const override { return points_; }
    std::vector<Point> singular_hints() const override;
    bool monotone() const override;
    VarKind var_kind() const override;
    double slope(double x) const override { return base_ ? base_->slope(x) : 0.0; }
    std::vector<double> slope_zeros() const override { return base_ ? base_->slope_zeros() : std::vector<double>{}; }
    double variation(const Point& a, const Point& b, double tol = 1e-12) const override;
    std::string describe() const override;

    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& levels() const { return levels_; }
    double before() const { return before_; }
    std::vector<double> jumps() const;
    const IntegratorPtr& base() const { return base_; }

protected:
    double dense_left_limit(const Point& x) const override;

private:
    std::vector<Point> points_;
    std::vector<double> levels_;
    double before_;
    IntegratorPtr base_;
    double level_at(const Point& p, bool strict) const;
};

struct SmoothSpec {
    std::function<double(double)> g;
    std::function<double(double)> dg;             // required for variation
    std::function<double(double)> abs_primitive;  // optional: x -> int |g'|
    bool monotone = false;
    std::vector<double> singular;  // coordinates where g' misbehaves
    std::string name;
};

// continuous function of the line coordinate
class SmoothNBV : public Integrator {
public:
    SmoothNBV(Line line, SmoothSpec spec);
    double operator()(const Point& p) const override { return spec_.g(line().coord(p)); }
    LeftLimitMode left_limit_mode() const override { return LeftLimitMode::Analytic; }
    std::vector<Point> singular_hints() const override;
    bool monotone() const override { return spec_.monotone; }
    VarKind var_kind() const override;
    double slope(double x) const override { return spec_.dg ? spec_.dg(x) : 0.0; }
    std::vector<double> slope_zeros() const override;
    double variation(const Point& a, const Point& b, double tol = 1e-12) const override;
    std::string describe() const override { return spec_.name; }
    const SmoothSpec& spec() const { return spec_; }

protected:
    double dense_left_limit(const Point& x) const override { return (*this)(x); }

private:
    SmoothSpec spec_;
    struct ZeroCache {
        std::once_flag once;
        std::vector<double> zeros;
    };
    std::shared_ptr<ZeroCache> zeros_ = std::make_shared<ZeroCache>();
};

// alpha*A + beta*B; DifferenceNBV is the (1, -1) case
class LinearNBV : public Integrator {
public:
    LinearNBV(double alpha, IntegratorPtr A, double beta, IntegratorPtr B, std::string name = "");
    double operator()(const Point& p) const override;
    LeftLimitMode left_limit_mode() const override;
    std::vector<Point> atoms() const override;
    std::vector<Point> singular_hints() const override;
    bool monotone() const override { return monotone_; }
    VarKind var_kind() const override;
    double slope(double x) const override;
    std::string describe() const override { return name_; }
    void declare_monotone(bool m) { monotone_ = m; }
    const IntegratorPtr& first() const { return A_; }
    const IntegratorPtr& second() const { return B_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

protected:
    double dense_left_limit(const Point& x) const override;

private:
    double alpha_, beta_;
    IntegratorPtr A_, B_;
    std::string name_;
    bool monotone_ = false;
};

IntegratorPtr difference(IntegratorPtr A, IntegratorPtr B);

// T_G
class VariationNBV : public Integrator {
public:
    explicit VariationNBV(IntegratorPtr G, double tol = 1e-12);
    double operator()(const Point& p) const override;
    LeftLimitMode left_limit_mode() const override { return G_->left_limit_mode(); }
    std::vector<Point> atoms() const override { return G_->atoms(); }
    std::vector<Point> singular_hints() const override { return G_->singular_hints(); }
    bool monotone() const override { return true; }
    VarKind var_kind() const override;
    double slope(double x) const override;
    double variation(const Point& a, const Point& b, double tol = 1e-12) const override;
    std::string describe() const override { return "variation_of " + G_->describe(); }
    const IntegratorPtr& source() const { return G_; }

protected:
    double dense_left_limit(const Point& x) const override;

private:
    IntegratorPtr G_;
    double tol_;
};

// arbitrary function with numeric left limits, plus optional declared
// left limits at known jump points
class NumericNBV : public Integrator {
public:
    NumericNBV(Line line, PointFn g, std::string name, std::vector<std::pair<Point, double>> declared_left = {},
               bool monotone = false);
    double operator()(const Point& p) const override { return g_(p); }
    LeftLimitMode left_limit_mode() const override { return LeftLimitMode::Numeric; }
    std::vector<Point> atoms() const override;
    bool monotone() const override { return monotone_; }
    std::string describe() const override { return name_; }

protected:
    double dense_left_limit(const Point& x) const override;

private:
    PointFn g_;
    std::string name_;
    std::vector<std::pair<Point, double>> declared_;
    bool monotone_;
};

// ---- operations ----

double variation_on_division(const Integrator& G, const std::vector<Point>& D);
double total_variation(const Integrator& G, double tol = 1e-12);
std::shared_ptr<VariationNBV> variation_function(IntegratorPtr G);

struct Jordan {
    IntegratorPtr G1;  // T_G
    IntegratorPtr G2;  // T_G - G
};
Jordan jordan_decompose(IntegratorPtr G);

// I must be canonical, or a degenerate [x,x] (atom)
double measure_interval(const Integrator& G, const IntervalSpec& I);

struct BoundCheck {
    double abs_measure;
    double variation;
    bool ok;
};
BoundCheck variation_bound_check(const Integrator& G, const IntervalSpec& I, double tol = 1e-12);

struct MeasureCheckRow {
    IntervalSpec interval;
    double abs_mu_g;  // |mu_G|(I) by exhaustive canonical subdivision
    double mu_t;      // mu_{T_G}(I)
    int cut_candidates;
    bool equal;
};
std::vector<MeasureCheckRow> total_variation_measure_check(IntegratorPtr G, const std::vector<IntervalSpec>& intervals);

struct StepFunction {
    std::vector<Point> division;  // 0_K = s_0 < ... < s_n = 1_K
    std::vector<double> at_points;
    std::vector<double> on_gaps;  // value on (s_{k-1}, s_k), size n
    double operator()(const Point& p) const;
};

struct StepApprox {
    StepFunction S;
    int levels_used;
    std::size_t divisions;
};
StepApprox step_approximation(const Integrator& G, double eps, std::size_t max_divisions = std::size_t{1} << 20);
// sup |G - S| on an n-point grid plus every division/jump/split point
double sup_distance(const Integrator& G, const StepFunction& S, std::size_t n = 10000);

}  // namespace ksl
