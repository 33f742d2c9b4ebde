#include "ksl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ksl/builtins.hpp"
#include "ksl/errors.hpp"
#include "ksl/expr.hpp"

namespace ksl {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) { throw UsageError(field + ": " + msg); }

std::string short_num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where, std::string("missing field '") + key + "'");
    return j.at(key);
}

double num(const json& j, const std::string& field) {
    if (!j.is_number()) bad(field, "expected a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& field) {
    if (!j.is_number_integer() && !(j.is_number() && std::floor(j.get<double>()) == j.get<double>()))
        bad(field, "expected an integer");
    return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& field) {
    if (!j.is_string()) bad(field, "expected a string");
    return j.get<std::string>();
}

template <class F>
auto in_field(const std::string& field, F&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        std::string what = e.what();
        if (what.rfind(field, 0) == 0) throw;
        throw UsageError(field + ": " + what);
    }
}

LineSpec parse_line(const json& j) {
    const std::string w = "line";
    LineSpec s;
    std::string fam = text(need(j, "family", w), "line.family");
    if (fam == "finite") {
        s.family = Family::Finite;
        s.n = integer(need(j, "n", w), "line.n");
    } else if (fam == "real") {
        s.family = Family::Real;
        s.lo = num(need(j, "lo", w), "line.lo");
        s.hi = num(need(j, "hi", w), "line.hi");
    } else if (fam == "ordinal") {
        s.family = Family::Ordinal;
        s.Q = static_cast<std::int32_t>(integer(need(j, "limit_count", w), "line.limit_count"));
        s.R = integer(need(j, "tail_length", w), "line.tail_length");
    } else if (fam == "split") {
        s.family = Family::Split;
        s.lo = num(need(j, "lo", w), "line.lo");
        s.hi = num(need(j, "hi", w), "line.hi");
        const json& sp = need(j, "splits", w);
        if (!sp.is_array()) bad("line.splits", "expected an array");
        for (const json& v : sp) s.splits.push_back(num(v, "line.splits"));
    } else {
        bad("line.family", "unknown family '" + fam + "' (finite, real, ordinal, split)");
    }
    in_field("line", [&] { return s.build(); });
    return s;
}

json line_json(const LineSpec& s) {
    switch (s.family) {
        case Family::Finite: return {{"family", "finite"}, {"n", s.n}};
        case Family::Real: return {{"family", "real"}, {"lo", s.lo}, {"hi", s.hi}};
        case Family::Ordinal: return {{"family", "ordinal"}, {"limit_count", s.Q}, {"tail_length", s.R}};
        case Family::Split: return {{"family", "split"}, {"lo", s.lo}, {"hi", s.hi}, {"splits", s.splits}};
    }
    return {};
}

IntegrandSpec parse_integrand(const Line& K, const json& j) {
    IntegrandSpec s;
    if (j.is_number()) {
        s.kind = IntegrandSpec::Kind::Expression;
        s.text = short_num(j.get<double>());
    } else if (j.is_string()) {
        s.text = j.get<std::string>();
        s.kind = is_builtin_integrand(s.text) ? IntegrandSpec::Kind::Builtin : IntegrandSpec::Kind::Expression;
        if (s.kind == IntegrandSpec::Kind::Expression) in_field("integrand", [&] { return Expression::parse(s.text); });
    } else if (j.is_object() && j.contains("piecewise")) {
        s.kind = IntegrandSpec::Kind::Piecewise;
        const json& arr = j.at("piecewise");
        if (!arr.is_array() || arr.empty()) bad("integrand.piecewise", "expected a non-empty array");
        for (const json& p : arr) {
            PieceSpec ps;
            ps.interval = in_field("integrand.piecewise.interval", [&] { return parse_interval(K, need(p, "interval", "integrand.piecewise")); });
            ps.expr = text(need(p, "expr", "integrand.piecewise"), "integrand.piecewise.expr");
            in_field("integrand.piecewise.expr", [&] { return Expression::parse(ps.expr); });
            s.pieces.push_back(ps);
        }
    } else if (j.is_object() && j.contains("table")) {
        s.kind = IntegrandSpec::Kind::Table;
        if (K.family() != Family::Finite) bad("integrand.table", "tables need a finite line");
        for (const json& v : j.at("table")) s.table.push_back(num(v, "integrand.table"));
        if (static_cast<std::int64_t>(s.table.size()) != K.size()) bad("integrand.table", "needs one value per point");
    } else {
        bad("integrand", "expected a builtin name, an expression, {\"piecewise\":[...]} or {\"table\":[...]}");
    }
    return s;
}

json integrand_json(const IntegrandSpec& s) {
    switch (s.kind) {
        case IntegrandSpec::Kind::Builtin:
        case IntegrandSpec::Kind::Expression: return s.text;
        case IntegrandSpec::Kind::Piecewise: {
            json arr = json::array();
            for (const PieceSpec& p : s.pieces) arr.push_back({{"interval", interval_json(p.interval)}, {"expr", p.expr}});
            return {{"piecewise", arr}};
        }
        case IntegrandSpec::Kind::Table: return {{"table", s.table}};
    }
    return {};
}

IntegratorSpec parse_integrator(const Line& K, const json& j, const std::string& where) {
    IntegratorSpec s;
    if (j.is_string()) {
        s.kind = IntegratorSpec::Kind::Builtin;
        s.text = j.get<std::string>();
        if (!is_builtin_integrator(s.text)) {
            if (s.text == "recip_sq") bad(where, "recip_sq is not of bounded variation and cannot be an integrator");
            bad(where, "unknown builtin '" + s.text + "' (use {\"expr\": ...} for expressions)");
        }
        return s;
    }
    if (!j.is_object()) bad(where, "expected a builtin name or an object");
    if (j.contains("expr")) {
        s.kind = IntegratorSpec::Kind::Expression;
        s.text = text(j.at("expr"), where + ".expr");
        in_field(where + ".expr", [&] { return Expression::parse(s.text); });
        if (j.contains("derivative")) {
            s.derivative = text(j.at("derivative"), where + ".derivative");
            in_field(where + ".derivative", [&] { return Expression::parse(s.derivative); });
        }
        if (j.contains("left_limits")) {
            for (const json& e : j.at("left_limits")) {
                if (!e.is_array() || e.size() != 2) bad(where + ".left_limits", "expected [point, value] pairs");
                Point p = in_field(where + ".left_limits", [&] { return parse_point(K, e[0]); });
                s.left_limits.emplace_back(p, num(e[1], where + ".left_limits"));
            }
        }
        if (j.contains("monotone")) s.monotone = j.at("monotone").get<bool>();
        return s;
    }
    if (j.contains("step")) {
        const json& st = j.at("step");
        const std::string w = where + ".step";
        s.kind = IntegratorSpec::Kind::Step;
        for (const json& p : need(st, "points", w)) s.points.push_back(in_field(w + ".points", [&] { return parse_point(K, p); }));
        if (st.contains("jumps")) {
            s.jumps_form = true;
            for (const json& v : st.at("jumps")) s.values.push_back(num(v, w + ".jumps"));
        } else {
            for (const json& v : need(st, "values", w)) s.values.push_back(num(v, w + ".values"));
        }
        if (s.values.size() != s.points.size()) bad(w, "points and values/jumps differ in length");
        for (std::size_t i = 1; i < s.points.size(); ++i)
            if (!(s.points[i - 1] < s.points[i])) bad(w + ".points", "must be strictly increasing");
        if (st.contains("before")) s.before = num(st.at("before"), w + ".before");
        if (st.contains("base")) s.parts.push_back(parse_integrator(K, st.at("base"), w + ".base"));
        return s;
    }
    if (j.contains("table")) {
        s.kind = IntegratorSpec::Kind::Table;
        if (K.family() != Family::Finite) bad(where + ".table", "tables need a finite line");
        for (const json& v : j.at("table")) s.table.push_back(num(v, where + ".table"));
        if (static_cast<std::int64_t>(s.table.size()) != K.size()) bad(where + ".table", "needs one value per point");
        return s;
    }
    if (j.contains("difference")) {
        s.kind = IntegratorSpec::Kind::Difference;
        const json& d = j.at("difference");
        if (!d.is_array() || d.size() != 2) bad(where + ".difference", "expected [A, B]");
        s.parts.push_back(parse_integrator(K, d[0], where + ".difference[0]"));
        s.parts.push_back(parse_integrator(K, d[1], where + ".difference[1]"));
        return s;
    }
    if (j.contains("variation_of")) {
        s.kind = IntegratorSpec::Kind::Variation;
        s.parts.push_back(parse_integrator(K, j.at("variation_of"), where + ".variation_of"));
        return s;
    }
    bad(where, "expected \"expr\", \"step\", \"table\", \"difference\" or \"variation_of\"");
}

json integrator_json(const IntegratorSpec& s) {
    switch (s.kind) {
        case IntegratorSpec::Kind::Builtin: return s.text;
        case IntegratorSpec::Kind::Expression: {
            json j{{"expr", s.text}};
            if (!s.derivative.empty()) j["derivative"] = s.derivative;
            if (!s.left_limits.empty()) {
                json arr = json::array();
                for (const auto& [p, v] : s.left_limits) arr.push_back({point_json(p), v});
                j["left_limits"] = arr;
            }
            if (s.monotone) j["monotone"] = true;
            return j;
        }
        case IntegratorSpec::Kind::Step: {
            json pts = json::array();
            for (const Point& p : s.points) pts.push_back(point_json(p));
            json st{{"points", pts}, {s.jumps_form ? "jumps" : "values", s.values}};
            if (s.before != 0.0) st["before"] = s.before;
            if (!s.parts.empty()) st["base"] = integrator_json(s.parts[0]);
            return {{"step", st}};
        }
        case IntegratorSpec::Kind::Table: return {{"table", s.table}};
        case IntegratorSpec::Kind::Difference:
            return {{"difference", json::array({integrator_json(s.parts[0]), integrator_json(s.parts[1])})}};
        case IntegratorSpec::Kind::Variation: return {{"variation_of", integrator_json(s.parts[0])}};
    }
    return {};
}

EngineSpec parse_engine(const Line& K, const json& j) {
    EngineSpec e;
    if (!j.is_object()) bad("engine", "expected an object");
    if (j.contains("tol")) e.tol = num(j.at("tol"), "engine.tol");
    if (j.contains("max_level")) e.max_level = static_cast<int>(integer(j.at("max_level"), "engine.max_level"));
    if (j.contains("divergence_bound")) e.divergence_bound = num(j.at("divergence_bound"), "engine.divergence_bound");
    if (j.contains("max_depth")) e.max_depth = static_cast<int>(integer(j.at("max_depth"), "engine.max_depth"));
    if (j.contains("singular_points"))
        for (const json& p : j.at("singular_points"))
            e.singular_points.push_back(in_field("engine.singular_points", [&] { return parse_point(K, p); }));
    if (!(e.tol > 0)) bad("engine.tol", "must be positive");
    if (e.max_level < 1 || e.max_level > 40) bad("engine.max_level", "must be in 1..40");
    return e;
}

json engine_json(const EngineSpec& e) {
    json j{{"tol", e.tol}, {"max_level", e.max_level}, {"divergence_bound", e.divergence_bound}, {"max_depth", e.max_depth}};
    json sp = json::array();
    for (const Point& p : e.singular_points) sp.push_back(point_json(p));
    j["singular_points"] = sp;
    return j;
}

std::pair<std::size_t, std::size_t> line_col(const std::string& s, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < s.size(); ++i) {
        if (s[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Line LineSpec::build() const {
    switch (family) {
        case Family::Finite: return Line::finite(n);
        case Family::Real: return Line::real(lo, hi);
        case Family::Ordinal: return Line::ordinal(Q, R);
        case Family::Split: return Line::split(lo, hi, splits);
    }
    throw UsageError("bad family");
}

EngineConfig EngineSpec::config() const {
    EngineConfig c;
    c.tol = tol;
    c.max_level = max_level;
    c.singular_points = singular_points;
    c.divergence_bound = divergence_bound;
    c.max_depth = max_depth;
    return c;
}

Point parse_point(const Line& K, const json& j) {
    Point p;
    switch (K.family()) {
        case Family::Finite:
            p = Point::finite(integer(j, "point"));
            break;
        case Family::Real:
            p = Point::real(num(j, "point"));
            break;
        case Family::Ordinal:
            if (j.is_array() && j.size() == 2) {
                p = Point::ordinal(static_cast<std::int32_t>(integer(j[0], "point")), integer(j[1], "point"));
            } else if (j.is_number()) {
                p = Point::ordinal(0, integer(j, "point"));
            } else {
                bad("point", "ordinal points are [q, r]");
            }
            break;
        case Family::Split:
            if (j.is_number()) {
                double x = num(j, "point");
                if (K.is_split_value(x)) bad("point", "split value " + short_num(x) + " needs a side: \"" + short_num(x) + "-\" or \"" + short_num(x) + "+\"");
                p = Point::split(x);
            } else if (j.is_string()) {
                std::string t = j.get<std::string>();
                if (t.empty()) bad("point", "empty string");
                Side side = Side::Whole;
                if (t.back() == '-' || t.back() == '+') {
                    side = t.back() == '-' ? Side::Minus : Side::Plus;
                    t.pop_back();
                }
                double x = 0;
                auto res = std::from_chars(t.data(), t.data() + t.size(), x);
                if (res.ec != std::errc() || res.ptr != t.data() + t.size()) bad("point", "cannot read '" + j.get<std::string>() + "'");
                if ((side != Side::Whole) != K.is_split_value(x)) bad("point", "side tags are only for split values");
                p = Point::split(x, side);
            } else {
                bad("point", "expected a number or a string like \"0.5-\"");
            }
            break;
    }
    K.check(p);
    return p;
}

json point_json(const Point& p) {
    switch (p.fam) {
        case Family::Finite: return p.n;
        case Family::Real: return p.x;
        case Family::Ordinal: return json::array({p.q, p.n});
        case Family::Split:
            if (p.side == Side::Whole) return p.x;
            return short_num(p.x) + (p.side == Side::Minus ? "-" : "+");
    }
    return {};
}

IntervalSpec parse_interval(const Line& K, const json& j) {
    IntervalSpec I;
    I.left = parse_point(K, need(j, "left", "interval"));
    I.right = parse_point(K, need(j, "right", "interval"));
    I.left_closed = j.value("left_closed", false);
    I.right_closed = j.value("right_closed", true);
    if (!nonempty(K, I)) bad("interval", "empty interval " + to_string(I));
    return I;
}

json interval_json(const IntervalSpec& I) {
    return {{"left", point_json(I.left)}, {"left_closed", I.left_closed}, {"right", point_json(I.right)}, {"right_closed", I.right_closed}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) bad("scenario", "top level must be an object");
    Scenario s;
    s.line = parse_line(need(j, "line", "scenario"));
    const Line K = s.line.build();
    if (j.contains("engine")) s.engine = parse_engine(K, j.at("engine"));
    s.integrand = j.contains("integrand") ? parse_integrand(K, j.at("integrand")) : IntegrandSpec{IntegrandSpec::Kind::Expression, "1", {}, {}};
    s.integrator = parse_integrator(K, need(j, "integrator", "scenario"), "integrator");
    if (j.contains("interval")) s.interval = in_field("interval", [&] { return parse_interval(K, j.at("interval")); });
    if (j.contains("options")) {
        if (!j.at("options").is_object()) bad("options", "expected an object");
        s.options = j.at("options");
    }
    static const std::vector<std::string> known{"line", "integrand", "integrator", "engine", "interval", "options"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) bad(it.key(), "unknown top-level field");
    // fail early on things only visible once built
    in_field("integrand", [&] { return build_integrand(s, K); });
    in_field("integrator", [&] { return build_integrator(s.integrator, K, s.engine); });
    return s;
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw UsageError("scenario syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw UsageError(std::string("scenario: ") + e.what());
    }
}

json to_json(const Scenario& s) {
    json j{{"line", line_json(s.line)},
           {"integrand", integrand_json(s.integrand)},
           {"integrator", integrator_json(s.integrator)},
           {"engine", engine_json(s.engine)}};
    if (s.interval) j["interval"] = interval_json(*s.interval);
    if (!s.options.empty()) j["options"] = s.options;
    return j;
}

std::string serialize(const Scenario& s, int indent) { return to_json(s).dump(indent); }

// ---------------------------------------------------------------- builders

namespace {

Point coord_point(const Line& K, double c) {
    if (K.family() == Family::Real) return Point::real(c);
    return K.at(c, Side::Minus);
}

std::vector<Point> expression_breaks(const Line& K, const Expression& e) {
    std::vector<Point> out;
    if (K.family() != Family::Real && K.family() != Family::Split) return out;
    for (double b : e.breaks())
        if (b > K.lo() && b < K.hi()) out.push_back(coord_point(K, b));
    return out;
}

}  // namespace

Integrand build_integrand(const Scenario& s, const Line& K) {
    const IntegrandSpec& spec = s.integrand;
    Integrand f;
    switch (spec.kind) {
        case IntegrandSpec::Kind::Builtin: return builtin_integrand(spec.text, K);
        case IntegrandSpec::Kind::Expression: {
            Expression e = Expression::parse(spec.text);
            std::vector<Point> sing = s.engine.singular_points;
            f.eval = [K, e, sing](const Point& p) {
                double v = e(K.coord(p));
                if (!std::isfinite(v) && std::find(sing.begin(), sing.end(), p) != sing.end()) return 0.0;
                return v;
            };
            f.description = spec.text;
            f.breaks = expression_breaks(K, e);
            if (!e.uses_x()) f.bound = std::fabs(e(0.0));
            return f;
        }
        case IntegrandSpec::Kind::Piecewise: {
            std::vector<std::pair<IntervalSpec, Expression>> parts;
            for (const PieceSpec& p : spec.pieces) {
                parts.emplace_back(p.interval, Expression::parse(p.expr));
                f.breaks.push_back(p.interval.left);
                f.breaks.push_back(p.interval.right);
            }
            // pieces must cover K: check every endpoint and a point between neighbours
            std::vector<Point> probe = f.breaks;
            probe.push_back(K.zero());
            probe.push_back(K.one());
            std::sort(probe.begin(), probe.end());
            probe.erase(std::unique(probe.begin(), probe.end()), probe.end());
            std::vector<Point> mids;
            for (std::size_t i = 1; i < probe.size(); ++i)
                if (auto m = K.between(probe[i - 1], probe[i])) mids.push_back(*m);
            probe.insert(probe.end(), mids.begin(), mids.end());
            for (const Point& p : probe) {
                bool hit = std::any_of(parts.begin(), parts.end(), [&](const auto& pr) { return contains(K, pr.first, p); });
                if (!hit) bad("integrand.piecewise", "pieces do not cover " + to_string(p));
            }
            f.eval = [K, parts](const Point& p) {
                for (const auto& [I, e] : parts)
                    if (contains(K, I, p)) return e(K.coord(p));
                return 0.0;
            };
            f.description = "piecewise";
            return f;
        }
        case IntegrandSpec::Kind::Table: {
            std::vector<double> t = spec.table;
            f.eval = [t](const Point& p) { return t.at(static_cast<std::size_t>(p.n)); };
            double m = 0;
            for (double v : t) m = std::max(m, std::fabs(v));
            f.bound = m;
            f.description = "table";
            return f;
        }
    }
    throw UsageError("integrand: bad kind");
}

IntegratorPtr build_integrator(const IntegratorSpec& spec, const Line& K, const EngineSpec& engine) {
    switch (spec.kind) {
        case IntegratorSpec::Kind::Builtin: return builtin_integrator(spec.text, K);
        case IntegratorSpec::Kind::Expression: {
            Expression g = Expression::parse(spec.text);
            if (K.family() == Family::Finite) {
                std::vector<double> v;
                for (std::int64_t i = 0; i < K.size(); ++i) v.push_back(g(static_cast<double>(i)));
                return StepNBV::table(K.size(), v);
            }
            if (!spec.left_limits.empty() || spec.derivative.empty()) {
                return std::make_shared<NumericNBV>(K, [K, g](const Point& p) { return g(K.coord(p)); }, spec.text,
                                                    spec.left_limits, spec.monotone);
            }
            Expression dg = Expression::parse(spec.derivative);
            SmoothSpec ss;
            ss.g = [g](double x) { return g(x); };
            ss.dg = [dg](double x) { return dg(x); };
            ss.monotone = spec.monotone;
            for (const Point& p : engine.singular_points)
                if (p.fam == Family::Real || p.fam == Family::Split) ss.singular.push_back(p.x);
            ss.name = spec.text;
            return std::make_shared<SmoothNBV>(K, ss);
        }
        case IntegratorSpec::Kind::Step: {
            IntegratorPtr base = spec.parts.empty() ? nullptr : build_integrator(spec.parts[0], K, engine);
            if (spec.jumps_form) return StepNBV::from_jumps(K, spec.points, spec.values, spec.before, base);
            return std::make_shared<StepNBV>(K, spec.points, spec.values, spec.before, base);
        }
        case IntegratorSpec::Kind::Table: return StepNBV::table(K.size(), spec.table);
        case IntegratorSpec::Kind::Difference:
            return difference(build_integrator(spec.parts[0], K, engine), build_integrator(spec.parts[1], K, engine));
        case IntegratorSpec::Kind::Variation: return variation_function(build_integrator(spec.parts[0], K, engine));
    }
    throw UsageError("integrator: bad kind");
}

}  // namespace ksl
