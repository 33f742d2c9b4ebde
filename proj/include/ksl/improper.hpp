#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksl/engine.hpp"

namespace ksl {

struct HakeConfig {
    EngineConfig engine;
    int max_approach = 30;
};

struct ApproachPoint {
    Point y;
    double partial;
    Verdict engine_verdict;
};

struct HakeResult {
    std::string direction;
    double limit_value = 0.0;  // A or B
    double correction = 0.0;
    std::optional<double> total;  // absent unless converged
    std::vector<ApproachPoint> approach_points;
    Verdict verdict = Verdict::Nonconverged;
    std::string note;
};

// A = lim int f chi_[0_K,y] dG as y -> 1_K; total = A + f(1_K)(G(1_K) - L_G(1_K))
HakeResult hake_forward(const Integrand& f, const Integrator& G, const HakeConfig& cfg);
// B = lim int f chi_(y,1_K] dG as y -> 0_K; total = B + f(0_K)G(0_K)
HakeResult hake_backward(const Integrand& f, const Integrator& G, const HakeConfig& cfg);

struct ConverseReport {
    IntegralResult direct;
    std::optional<HakeResult> forward, backward;
    std::optional<double> forward_residual;   // |A - (int f dG - f(1)(G(1) - L_G(1)))|
    std::optional<double> backward_residual;  // |B - (int f dG - f(0)G(0))|
};
ConverseReport hake_converse_check(const Integrand& f, const Integrator& G, const HakeConfig& cfg);

}  // namespace ksl
