#include "ksl/builtins.hpp"

#include <algorithm>
#include <cmath>

#include "ksl/errors.hpp"
#include "ksl/special.hpp"

namespace ksl {

namespace {

const std::string kVariationOf = "variation_of ";

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

SmoothSpec identity_spec(const Line& K) {
    double c0 = K.coord_lo();
    SmoothSpec s;
    s.g = [](double x) { return x; };
    s.dg = [](double) { return 1.0; };
    s.abs_primitive = [c0](double x) { return x - c0; };
    s.monotone = true;
    s.name = "identity";
    return s;
}

SmoothSpec tent_spec(const Line& K) {
    double c0 = K.coord_lo(), c1 = K.coord_hi(), m = (c0 + c1) / 2;
    SmoothSpec s;
    s.g = [c0, c1, m](double x) { return x <= m ? x - c0 : c1 - x; };
    s.dg = [m](double x) { return x < m ? 1.0 : -1.0; };
    s.abs_primitive = [c0](double x) { return x - c0; };
    s.name = "tent";
    return s;
}

SmoothSpec sin_inv_sq_spec(const Line& K) {
    if (K.family() != Family::Real && K.family() != Family::Split)
        throw UsageError("sin_inv_sq_primitive needs a real or split line");
    SmoothSpec s;
    s.g = special::sin_inv_sq_primitive;
    s.dg = special::sin_inv_sq_density;
    s.abs_primitive = special::sin_inv_sq_abs_primitive;
    s.singular = {0.0};
    s.name = "sin_inv_sq_primitive";
    return s;
}

Point middle(const Line& K) {
    auto m = K.between(K.zero(), K.one());
    return m ? *m : K.one();
}

}  // namespace

IntegratorPtr coordinate_integrator(const Line& K, SmoothSpec spec) {
    if (K.family() == Family::Finite) {
        std::vector<double> v;
        for (std::int64_t i = 0; i < K.size(); ++i) v.push_back(spec.g(static_cast<double>(i)));
        return StepNBV::table(K.size(), v);
    }
    return std::make_shared<SmoothNBV>(K, std::move(spec));
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"identity", "tent", "step", "sin_inv_sq_primitive", "recip_sq", "indicator_max"};
    return names;
}

bool is_builtin_integrator(const std::string& name) {
    if (starts_with(name, kVariationOf)) return is_builtin_integrator(name.substr(kVariationOf.size()));
    return name == "identity" || name == "tent" || name == "step" || name == "sin_inv_sq_primitive" || name == "indicator_max";
}

bool is_builtin_integrand(const std::string& name) {
    return name == "recip_sq" || (is_builtin_integrator(name) && !starts_with(name, kVariationOf));
}

IntegratorPtr builtin_integrator(const std::string& name, const Line& K) {
    if (starts_with(name, kVariationOf)) return variation_function(builtin_integrator(name.substr(kVariationOf.size()), K));
    if (name == "identity") return coordinate_integrator(K, identity_spec(K));
    if (name == "tent") return coordinate_integrator(K, tent_spec(K));
    if (name == "sin_inv_sq_primitive") return coordinate_integrator(K, sin_inv_sq_spec(K));
    if (name == "step") return StepNBV::from_jumps(K, {middle(K)}, {1.0});
    if (name == "indicator_max") return StepNBV::from_jumps(K, {K.one()}, {1.0});
    if (name == "recip_sq") throw UsageError("recip_sq is not of bounded variation; it is only available as an integrand");
    throw UsageError("unknown builtin integrator '" + name + "'");
}

Integrand builtin_integrand(const std::string& name, const Line& K) {
    Integrand f;
    f.description = name;
    if (name == "recip_sq") {
        f.eval = [K](const Point& p) {
            double x = K.coord(p);
            return x == 0.0 ? 0.0 : 1.0 / (x * x);
        };
        return f;
    }
    if (name == "step") {
        Point m = middle(K);
        f.eval = [m](const Point& p) { return p < m ? 0.0 : 1.0; };
        f.bound = 1.0;
        f.breaks = {m};
        return f;
    }
    if (name == "indicator_max") {
        Point one = K.one();
        f.eval = [one](const Point& p) { return p == one ? 1.0 : 0.0; };
        f.bound = 1.0;
        f.breaks = {one};
        return f;
    }
    if (!is_builtin_integrand(name)) throw UsageError("unknown builtin integrand '" + name + "'");
    IntegratorPtr G = builtin_integrator(name, K);
    f.eval = [G](const Point& p) { return (*G)(p); };
    if (name == "identity") f.bound = std::max(std::fabs(K.coord_lo()), std::fabs(K.coord_hi()));
    if (name == "tent") f.bound = (K.coord_hi() - K.coord_lo()) / 2;
    for (const Point& s : G->singular_hints()) f.breaks.push_back(s);
    return f;
}

}  // namespace ksl
