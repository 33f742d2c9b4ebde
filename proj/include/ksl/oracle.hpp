#pragma once

#include <cstddef>
#include <vector>

// Reference computations that share no code with the engine.
namespace ksl::oracle {

struct FiniteScenario {
    std::vector<double> G;
    std::vector<double> f;
};

// f(p0)G(p0) + sum_{i>=1} f(p_i)(G(p_i) - G(p_{i-1}))
double finite_line_integral(const FiniteScenario& s);

// max of Var(G, D) over every division of the points; at most 12 points
double exhaustive_variation(const std::vector<double>& values);
constexpr std::size_t kMaxExhaustive = 12;

double sine_integral(double t);
double cosine_integral(double t);

// int_1^N |sin u| / u du from the Fourier series of |sin|
double abs_sin_over_u(double N);

// (pi/2 - Si(1)) / 2
double worked_example_target();

}  // namespace ksl::oracle
