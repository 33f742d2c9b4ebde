#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ksl/gauge.hpp"
#include "ksl/integrator.hpp"

namespace ksl {

struct EngineConfig {
    double tol = 1e-6;
    int max_level = 20;
    std::vector<Point> singular_points;
    double divergence_bound = 5.0;
    int max_depth = 256;
    TagPolicy policy = TagPolicy::MidpointFirst;
};

enum class Verdict { Converged, Nonconverged, Diverging };
const char* verdict_name(Verdict v);

struct LevelRecord {
    int level;
    double value;
    double delta;  // |value - previous value|, NaN on the first level
    std::size_t cells;
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = std::numeric_limits<double>::infinity();
    int levels_used = 0;
    Verdict verdict = Verdict::Nonconverged;
    std::vector<LevelRecord> diagnostics;
    std::string left_limit_mode;
    std::string note;
};

// Riemann sum over the level-k ladder partition (used by integrate)
double ladder_sum(const Integrand& f, const Integrator& G, const EngineConfig& cfg, int level, std::size_t* cells = nullptr);

IntegralResult integrate(const Integrand& f, const Integrator& G, const EngineConfig& cfg);
IntegralResult integrate_indicator(const Integrand& f, const Integrator& G, const IntervalSpec& I, const EngineConfig& cfg);

// int_a^b f dG = f(a)G(a) + int f chi_(a,b] dG
double integral_between(const Integrand& f, const Integrator& G, const Point& a, const Point& b, const EngineConfig& cfg);

// sum over cells of |f(t)(G(z)-G(y)) + f(y)G(y) - int_y^z f dG|; `sub` returns
// int f chi_(y,z] dG and defaults to the engine
using SubIntegral = std::function<double(const Point& y, const Point& z)>;
double saks_henstock_deviation(const Integrand& f, const Integrator& G, const SubIntegral& sub,
                               const std::vector<Cell>& system, const EngineConfig& cfg);

// F(x) = int f chi_[0_K,x] dG, memoised
class AccumulatorNBV : public Integrator {
public:
    AccumulatorNBV(Integrand f, IntegratorPtr G, EngineConfig cfg);
    double operator()(const Point& p) const override;
    std::vector<Point> atoms() const override { return G_->atoms(); }
    std::vector<Point> singular_hints() const override { return G_->singular_hints(); }
    std::string describe() const override { return "accumulator(" + f_.description + ", " + G_->describe() + ")"; }
    const Integrand& integrand() const { return f_; }
    const IntegratorPtr& integrator() const { return G_; }
    std::size_t cached() const;

private:
    Integrand f_;
    IntegratorPtr G_;
    EngineConfig cfg_;
    mutable std::mutex mu_;
    mutable std::map<Point, double, bool (*)(const Point&, const Point&)> memo_;
};

std::shared_ptr<AccumulatorNBV> accumulator(Integrand f, IntegratorPtr G, EngineConfig cfg);

}  // namespace ksl
