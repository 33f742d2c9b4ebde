#include "ksl/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>
#include <gsl/gsl_sf_psi.h>

#include <cmath>
#include <numbers>

namespace ksl::special {

namespace {

constexpr double pi = std::numbers::pi;

// trigamma; asymptotic series once z is large enough that the first
// omitted term is below 1e-17 relative
double trigamma(double z) {
    if (z < 20.0) return gsl_sf_psi_1(z);
    double w = 1.0 / z, w2 = w * w;
    return w + w2 * (0.5 + w * (1.0 / 6 + w2 * (-1.0 / 30 + w2 * (1.0 / 42 + w2 * (-1.0 / 30)))));
}

const gsl_integration_glfixed_table* gl_table() {
    static const gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(24);
    return t;
}

// gsl_sf_Ci loses its argument reduction somewhere above 1e15; past 1e8
// the asymptotic series is already exact to rounding
double Ci(double u) {
    if (u < 1e8) return gsl_sf_Ci(u);
    double w = 1.0 / u, w2 = w * w;
    return std::sin(u) * w * (1.0 - 2.0 * w2) - std::cos(u) * w2 * (1.0 - 6.0 * w2);
}

// antiderivative of sin(u)/u^2
double phi(double u) { return Ci(u) - std::sin(u) / u; }

}  // namespace

double sin_inv_sq_density(double x) {
    if (x == 0.0) return 0.0;
    return x * std::sin(1.0 / (x * x));
}

double sin_inv_sq_primitive(double x) {
    double ax = std::fabs(x);
    if (ax < 1e-100) return 0.0;
    double u = 1.0 / (ax * ax);
    return 0.5 * (ax * ax * std::sin(u) - Ci(u));
}

double abs_sin_over_u2_tail(double a) {
    // head: a up to the next multiple of pi, where sin keeps one sign
    double m = std::ceil(a / pi);
    if (m < 1) m = 1;
    double head = std::fabs(phi(m * pi) - phi(a));
    // tail: sum_k>=m int_0^pi sin v/(v+k pi)^2 dv = pi^-2 int_0^pi sin v psi1(m + v/pi) dv
    gsl_function F;
    F.function = [](double v, void* p) -> double {
        double mm = *static_cast<double*>(p);
        return std::sin(v) * trigamma(mm + v / pi);
    };
    F.params = &m;
    double tail = gsl_integration_glfixed(&F, 0.0, pi, gl_table()) / (pi * pi);
    return head + tail;
}

double sin_inv_sq_abs_primitive(double x) {
    double ax = std::fabs(x);
    double s = x < 0 ? -1.0 : 1.0;
    if (ax == 0.0) return 0.0;
    if (ax < 1e-100) return s * ax * ax / pi;
    return s * 0.5 * abs_sin_over_u2_tail(1.0 / (ax * ax));
}

}  // namespace ksl::special
