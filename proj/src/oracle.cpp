#include "ksl/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ksl/errors.hpp"

namespace ksl::oracle {

double finite_line_integral(const FiniteScenario& s) {
    if (s.G.size() != s.f.size() || s.G.size() < 2) throw UsageError("finite scenario needs matching G and f with n >= 2");
    double sum = s.f[0] * s.G[0];
    for (std::size_t i = 1; i < s.G.size(); ++i) sum += s.f[i] * (s.G[i] - s.G[i - 1]);
    return sum;
}

double exhaustive_variation(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n > kMaxExhaustive) throw CapacityError("exhaustive_variation is capped at 12 points");
    if (n < 2) return 0.0;
    const std::size_t inner = n - 2;
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << inner); ++mask) {
        double var = 0.0;
        std::size_t prev = 0;
        for (std::size_t i = 1; i < n; ++i) {
            bool keep = i == n - 1 || (mask >> (i - 1) & 1U);
            if (!keep) continue;
            var += std::fabs(v[i] - v[prev]);
            prev = i;
        }
        best = std::max(best, var);
    }
    return best;
}

namespace {

constexpr double kEuler = 0.57721566490153286061;

// Si and Ci together; t > 0
void si_ci(double t, double& si, double& ci) {
    if (t <= 4.0) {
        double t2 = t * t;
        double term = t, s = t;  // term = (-1)^k t^(2k+1)/(2k+1)!
        for (int k = 1; k < 60; ++k) {
            term *= -t2 / ((2.0 * k) * (2.0 * k + 1));
            double add = term / (2.0 * k + 1);
            s += add;
            if (std::fabs(add) < 1e-18 * std::fabs(s)) break;
        }
        double c = 0.0;
        term = 1.0;  // (-1)^k t^(2k)/(2k)!
        for (int k = 1; k < 60; ++k) {
            term *= -t2 / ((2.0 * k - 1) * (2.0 * k));
            double add = term / (2.0 * k);
            c += add;
            if (std::fabs(add) < 1e-18) break;
        }
        si = s;
        ci = kEuler + std::log(t) + c;
        return;
    }
    // E1(it) by Lentz's continued fraction
    using C = std::complex<double>;
    const double tiny = 1e-300;
    C b(1.0, t), c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 2; i < 1000; ++i) {
        double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        C del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    h *= C(std::cos(t), -std::sin(t));
    ci = -h.real();
    si = std::numbers::pi / 2 + h.imag();
}

}  // namespace

double sine_integral(double t) {
    if (t == 0.0) return 0.0;
    double si, ci;
    si_ci(std::fabs(t), si, ci);
    return t < 0 ? -si : si;
}

double cosine_integral(double t) {
    if (!(t > 0.0)) throw UsageError("cosine_integral needs t > 0");
    double si, ci;
    si_ci(t, si, ci);
    return ci;
}

double abs_sin_over_u(double N) {
    if (!(N >= 1.0)) throw UsageError("abs_sin_over_u needs N >= 1");
    // |sin u| = 2/pi - (4/pi) sum_j cos(2ju)/(4j^2-1)
    double s = 0.0;
    for (int j = 1; j <= 20000; ++j) {
        double w = 1.0 / (4.0 * j * j - 1.0);
        s += w * (cosine_integral(2.0 * j * N) - cosine_integral(2.0 * j));
    }
    return 2.0 / std::numbers::pi * std::log(N) - 4.0 / std::numbers::pi * s;
}

double worked_example_target() { return (std::numbers::pi / 2 - sine_integral(1.0)) / 2; }

}  // namespace ksl::oracle
