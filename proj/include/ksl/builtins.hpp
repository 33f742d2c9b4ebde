#pragma once

#include <string>
#include <vector>

#include "ksl/integrator.hpp"

namespace ksl {

// "identity", "tent", "step", "sin_inv_sq_primitive", "indicator_max",
// "variation_of <name>"
IntegratorPtr builtin_integrator(const std::string& name, const Line& K);
// the integrator names plus "recip_sq"
Integrand builtin_integrand(const std::string& name, const Line& K);
bool is_builtin_integrator(const std::string& name);
bool is_builtin_integrand(const std::string& name);
const std::vector<std::string>& builtin_names();

// continuous function of the coordinate, as the right representation for the family
IntegratorPtr coordinate_integrator(const Line& K, SmoothSpec spec);

}  // namespace ksl
