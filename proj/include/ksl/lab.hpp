#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksl/engine.hpp"

namespace ksl {

enum class Reach { Attained, Approached, Empty };
const char* reach_name(Reach r);

struct SupPoint {
    Point point;
    Reach reach;
};

// sup{y < x : G(x) - G(y) >= 2^-n}, 0_K when empty; G nondecreasing
SupPoint u_n(const Integrator& G, const Point& x, int n);
// inf{y > x : G(y) - G(x) >= 2^-n}, 1_K when empty
SupPoint v_n(const Integrator& G, const Point& x, int n);

struct Limit {
    Point point;
    int levels;
    bool stabilized;  // false: the value is a heuristic extrapolation
};
Limit big_U(const Integrator& G, const Point& x, int depth);
Limit big_V(const Integrator& G, const Point& x, int depth);

enum class PointClass { A, B, C, Other };
const char* class_name(PointClass c);

struct Classification {
    Point point;
    PointClass cls;
    Limit U, V;
};
Classification classify(const Integrator& G, const Point& x, int depth);

struct DerivativeProbe {
    int n;
    SupPoint u, v;
    double ell, r, q;
    PointClass cls;
    double f_n;
};
DerivativeProbe f_n_probe(const Integrator& F, const Integrator& G, const Point& x, int n, int class_depth = 40);
DerivativeProbe f_n_probe(const Integrator& F, const Integrator& G, const Point& x, int n, const Classification& c);

struct PointReport {
    Point x;
    PointClass cls;
    double f_value;
    double f_n;
    double error;
    bool converged;
    bool exceptional;  // atom of G or outside A, B, C
};

struct ConvergenceReport {
    int depth;
    double tol;
    std::vector<PointReport> points;
    std::size_t scored = 0, converged = 0;
    std::vector<Point> atoms_seen;
    std::vector<Point> plateau_points;
    double fraction() const { return scored ? static_cast<double>(converged) / static_cast<double>(scored) : 1.0; }
    std::string note;
};

// evenly spread interior sample of the line
std::vector<Point> interior_sample(const Line& K, std::size_t n);

ConvergenceReport convergence_report(const Integrand& f, IntegratorPtr G, std::size_t sample, int depth, double tol,
                                     const EngineConfig& cfg = {});

struct DerivativeCheck {
    std::string mode;  // "jump", "dense", "constant"
    double residual;
    int level;
    bool ok;
};
DerivativeCheck g_derivative_check(const Integrator& F, const Integrator& G, const Integrand& f, const Point& x, double tol,
                                   int levels = 20);

}  // namespace ksl
