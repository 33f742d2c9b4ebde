#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksl/engine.hpp"
#include "ksl/integrator.hpp"
#include "ksl/line.hpp"

namespace ksl {

struct LineSpec {
    Family family = Family::Real;
    std::int64_t n = 0;
    double lo = 0.0, hi = 1.0;
    std::int32_t Q = 0;
    std::int64_t R = 0;
    std::vector<double> splits;

    Line build() const;
    bool operator==(const LineSpec&) const = default;
};

struct PieceSpec {
    IntervalSpec interval;
    std::string expr;
    bool operator==(const PieceSpec&) const = default;
};

struct IntegrandSpec {
    enum class Kind { Builtin, Expression, Piecewise, Table };
    Kind kind = Kind::Expression;
    std::string text;  // builtin name or expression
    std::vector<PieceSpec> pieces;
    std::vector<double> table;
    bool operator==(const IntegrandSpec&) const = default;
};

struct IntegratorSpec {
    enum class Kind { Builtin, Expression, Step, Table, Difference, Variation };
    Kind kind = Kind::Builtin;
    std::string text;        // builtin name or expression
    std::string derivative;  // expression, may be empty
    std::vector<std::pair<Point, double>> left_limits;
    bool monotone = false;
    std::vector<Point> points;
    std::vector<double> values;  // levels, or jumps when jumps_form
    bool jumps_form = false;
    double before = 0.0;
    std::vector<double> table;
    std::vector<IntegratorSpec> parts;  // step base (0 or 1), difference (2), variation (1)
    bool operator==(const IntegratorSpec&) const = default;
};

struct EngineSpec {
    double tol = 1e-6;
    int max_level = 20;
    std::vector<Point> singular_points;
    double divergence_bound = 5.0;
    int max_depth = 256;

    EngineConfig config() const;
    bool operator==(const EngineSpec&) const = default;
};

struct Scenario {
    LineSpec line;
    IntegrandSpec integrand;
    IntegratorSpec integrator;
    EngineSpec engine;
    std::optional<IntervalSpec> interval;
    nlohmann::json options = nlohmann::json::object();  // command specific

    bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::string& text);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
std::string serialize(const Scenario& s, int indent = 2);

Point parse_point(const Line& K, const nlohmann::json& j);
nlohmann::json point_json(const Point& p);
IntervalSpec parse_interval(const Line& K, const nlohmann::json& j);
nlohmann::json interval_json(const IntervalSpec& I);

Integrand build_integrand(const Scenario& s, const Line& K);
IntegratorPtr build_integrator(const IntegratorSpec& spec, const Line& K, const EngineSpec& engine);

}  // namespace ksl
