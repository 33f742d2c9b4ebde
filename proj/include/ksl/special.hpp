#pragma once

namespace ksl::special {

// G(x) = int_0^x t sin(1/t^2) dt, closed form via the cosine integral
double sin_inv_sq_primitive(double x);
// G'(x) = x sin(1/x^2), 0 at 0
double sin_inv_sq_density(double x);
// int_0^x |t sin(1/t^2)| dt
double sin_inv_sq_abs_primitive(double x);

// int_a^inf |sin u| / u^2 du, a > 0
double abs_sin_over_u2_tail(double a);

}  // namespace ksl::special
