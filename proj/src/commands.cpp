#include "ksl/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ksl/errors.hpp"
#include "ksl/gauge.hpp"
#include "ksl/improper.hpp"
#include "ksl/lab.hpp"
#include "ksl/oracle.hpp"

namespace ksl {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const Scenario& need_scenario(const std::optional<Scenario>& s, const std::string& cmd) {
    if (!s) throw UsageError(cmd + " needs --scenario FILE");
    return *s;
}

EngineSpec engine_with(const Scenario& s, const CliOptions& o) {
    EngineSpec e = s.engine;
    if (o.tol) e.tol = *o.tol;
    if (o.max_level) e.max_level = *o.max_level;
    if (o.divergence_bound) e.divergence_bound = *o.divergence_bound;
    if (!(e.tol > 0)) throw UsageError("--tol must be positive");
    if (e.max_level < 1 || e.max_level > 40) throw UsageError("--max-level must be in 1..40");
    return e;
}

json base(const std::string& command) { return {{"schema", "1"}, {"command", command}}; }

CommandOutput cmd_integrate(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = engine_with(s, o);
    Integrand f = build_integrand(s, K);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    IntegralResult r = s.interval ? integrate_indicator(f, *G, *s.interval, es.config()) : integrate(f, *G, es.config());
    CommandOutput out;
    out.result = base("integrate");
    out.result["value"] = r.value;
    out.result["error_estimate"] = finite_or_null(r.error_estimate);
    out.result["levels_used"] = r.levels_used;
    out.result["verdict"] = verdict_name(r.verdict);
    out.result["left_limit_mode"] = r.left_limit_mode;
    if (s.interval) out.result["interval"] = to_string(*s.interval);
    if (!r.note.empty()) out.result["note"] = r.note;
    json diag = json::array();
    out.csv_header = {"level", "value", "delta", "cells"};
    for (const LevelRecord& d : r.diagnostics) {
        diag.push_back({{"level", d.level}, {"value", d.value}, {"delta", finite_or_null(d.delta)}, {"cells", d.cells}});
        out.csv_rows.push_back({std::to_string(d.level), fmt(d.value), std::isnan(d.delta) ? "" : fmt(d.delta), std::to_string(d.cells)});
    }
    out.result["diagnostics"] = diag;
    out.exit_code = exit_code_for(r.verdict);
    return out;
}

CommandOutput cmd_hake(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = engine_with(s, o);
    Integrand f = build_integrand(s, K);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    HakeConfig hc;
    hc.engine = es.config();
    hc.max_approach = s.options.value("max_approach", hc.max_approach);
    std::string dir = o.direction ? *o.direction : s.options.value("direction", std::string("forward"));
    if (dir != "forward" && dir != "backward") throw UsageError("--direction must be forward or backward");
    HakeResult r = dir == "forward" ? hake_forward(f, *G, hc) : hake_backward(f, *G, hc);
    CommandOutput out;
    out.result = base("hake");
    out.result["direction"] = dir;
    out.result["limit_value"] = r.limit_value;
    out.result["correction"] = r.correction;
    out.result["total"] = r.total ? json(*r.total) : json(nullptr);
    out.result["value"] = r.total ? json(*r.total) : json(nullptr);
    out.result["verdict"] = verdict_name(r.verdict);
    if (!r.note.empty()) out.result["note"] = r.note;
    if (dir == "backward")
        out.result["sign_note"] = "total = B + f(0_K)G(0_K); this sign agrees with the converse identity and with f = 1";
    json pts = json::array();
    out.csv_header = {"k", "y", "partial", "engine_verdict"};
    int k = 1;
    for (const ApproachPoint& p : r.approach_points) {
        pts.push_back({{"k", k}, {"y", to_string(p.y)}, {"partial", p.partial}, {"engine_verdict", verdict_name(p.engine_verdict)}});
        out.csv_rows.push_back({std::to_string(k), to_string(p.y), fmt(p.partial), verdict_name(p.engine_verdict)});
        ++k;
    }
    out.result["approach_points"] = pts;
    out.exit_code = exit_code_for(r.verdict);
    return out;
}

std::vector<Point> sample_with_ends(const Line& K, std::size_t n) {
    std::vector<Point> pts = interior_sample(K, n);
    pts.push_back(K.zero());
    pts.push_back(K.one());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

CommandOutput cmd_decompose(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = engine_with(s, o);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    Jordan J = jordan_decompose(G);
    std::size_t n = static_cast<std::size_t>(o.sample.value_or(s.options.value("sample", 9)));
    CommandOutput out;
    out.result = base("decompose");
    out.result["total_variation"] = total_variation(*G);
    json rows = json::array();
    double worst = 0.0;
    bool mono = true;
    double p1 = -INFINITY, p2 = -INFINITY;
    out.csv_header = {"x", "G", "G1", "G2"};
    for (const Point& x : sample_with_ends(K, n)) {
        double g = (*G)(x), g1 = (*J.G1)(x), g2 = (*J.G2)(x);
        worst = std::max(worst, std::fabs(g1 - g2 - g));
        if (g1 < p1 - 1e-12 || g2 < p2 - 1e-12) mono = false;
        p1 = g1;
        p2 = g2;
        rows.push_back({{"x", to_string(x)}, {"G", g}, {"G1", g1}, {"G2", g2}});
        out.csv_rows.push_back({to_string(x), fmt(g), fmt(g1), fmt(g2)});
    }
    out.result["samples"] = rows;
    out.result["identity_max_error"] = worst;
    out.result["monotone"] = mono;
    out.result["G1"] = J.G1->describe();
    out.result["G2"] = "T_G - G";
    return out;
}

CommandOutput cmd_measure(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = engine_with(s, o);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    std::vector<IntervalSpec> intervals;
    if (s.options.contains("intervals")) {
        for (const json& j : s.options.at("intervals")) intervals.push_back(parse_interval(K, j));
    } else if (s.interval) {
        intervals.push_back(*s.interval);
    } else {
        intervals.push_back({K.zero(), true, K.one(), true});
    }
    const bool exact = G->var_kind() == VarKind::Jumps && (K.family() == Family::Finite || K.family() == Family::Split);
    CommandOutput out;
    out.result = base("measure");
    json rows = json::array();
    out.csv_header = {"interval", "canonical", "mu_G", "variation", "bound_ok"};
    for (const IntervalSpec& I : intervals) {
        bool degenerate = I.left == I.right && I.left_closed && I.right_closed;
        IntervalSpec C = degenerate || is_canonical(K, I) ? I : canonicalize(K, I);
        json row{{"interval", to_string(I)}, {"canonical", to_string(C)}, {"mu_G", measure_interval(*G, C)}};
        if (!degenerate) {
            BoundCheck b = variation_bound_check(*G, C);
            row["variation"] = b.variation;
            row["bound_ok"] = b.ok;
            if (exact) {
                try {
                    MeasureCheckRow m = total_variation_measure_check(G, {C}).front();
                    row["abs_mu_G"] = m.abs_mu_g;
                    row["mu_T_G"] = m.mu_t;
                    row["abs_equals_mu_T"] = m.equal;
                } catch (const CapacityError& e) {
                    row["abs_mu_G"] = nullptr;
                    row["note"] = e.what();
                }
            }
        }
        out.csv_rows.push_back({to_string(I), to_string(C), fmt(row["mu_G"].get<double>()),
                                row.contains("variation") ? fmt(row["variation"].get<double>()) : "",
                                row.contains("bound_ok") ? (row["bound_ok"].get<bool>() ? "1" : "0") : ""});
        rows.push_back(row);
    }
    out.result["intervals"] = rows;
    return out;
}

CommandOutput cmd_approx(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = engine_with(s, o);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    std::vector<double> eps = s.options.value("eps", std::vector<double>{0.1, 0.01, 0.001});
    std::size_t grid = s.options.value("grid", std::size_t{10000});
    CommandOutput out;
    out.result = base("approx");
    json rows = json::array();
    bool all = true;
    out.csv_header = {"eps", "divisions", "sup_distance", "ok"};
    for (double e : eps) {
        if (!(e > 0)) throw UsageError("options.eps values must be positive");
        StepApprox a = step_approximation(*G, e);
        double d = sup_distance(*G, a.S, grid);
        bool ok = d < e;
        all = all && ok;
        rows.push_back({{"eps", e}, {"divisions", a.divisions}, {"levels_used", a.levels_used}, {"sup_distance", d}, {"ok", ok}});
        out.csv_rows.push_back({fmt(e), std::to_string(a.divisions), fmt(d), ok ? "1" : "0"});
    }
    out.result["approximations"] = rows;
    out.result["ok"] = all;
    out.exit_code = all ? kExitOk : kExitNonconverged;
    return out;
}

CommandOutput cmd_lab(const Scenario& s, const CliOptions& o) {
    const Line K = s.line.build();
    EngineSpec es = s.engine;
    if (o.max_level) es.max_level = *o.max_level;
    Integrand f = build_integrand(s, K);
    IntegratorPtr G = build_integrator(s.integrator, K, es);
    if (!G->monotone())
        throw PreconditionError("lab needs a nondecreasing integrator; use {\"variation_of\": ...} or the decompose command");
    int depth = o.depth.value_or(s.options.value("depth", 12));
    int sample = o.sample.value_or(s.options.value("sample", 512));
    double tol = o.tol.value_or(s.options.value("tol", 1e-3));
    if (depth < 1 || depth > 40) throw UsageError("--depth must be in 1..40");
    if (sample < 1) throw UsageError("--sample must be positive");
    ConvergenceReport rep = convergence_report(f, G, static_cast<std::size_t>(sample), depth, tol, es.config());
    CommandOutput out;
    out.result = base("lab");
    out.result["depth"] = depth;
    out.result["tol"] = tol;
    out.result["sample"] = rep.points.size();
    out.result["scored"] = rep.scored;
    out.result["converged"] = rep.converged;
    out.result["fraction"] = rep.fraction();
    json atoms = json::array(), plateau = json::array();
    for (const Point& p : rep.atoms_seen) atoms.push_back(to_string(p));
    for (const Point& p : rep.plateau_points) plateau.push_back(to_string(p));
    out.result["atoms"] = atoms;
    out.result["outside_abc"] = plateau;
    if (!rep.note.empty()) out.result["note"] = rep.note;
    std::size_t counts[4] = {0, 0, 0, 0};
    out.csv_header = {"x", "class", "f", "f_n", "error", "converged", "exceptional"};
    for (const PointReport& p : rep.points) {
        ++counts[static_cast<int>(p.cls)];
        out.csv_rows.push_back({to_string(p.x), class_name(p.cls), fmt(p.f_value), fmt(p.f_n), fmt(p.error),
                                p.converged ? "1" : "0", p.exceptional ? "1" : "0"});
    }
    out.result["classes"] = {{"A", counts[0]}, {"B", counts[1]}, {"C", counts[2]}, {"other", counts[3]}};
    return out;
}

CommandOutput cmd_selftest() {
    CommandOutput out;
    out.result = base("selftest");
    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        all = all && ok;
        checks.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
        out.csv_rows.push_back({name, ok ? "1" : "0", detail});
    };
    out.csv_header = {"check", "ok", "detail"};

    double si1 = oracle::sine_integral(1.0);
    add("sine_integral(1)", std::fabs(si1 - 0.946083070367183) < 1e-12, fmt(si1));
    double si100 = oracle::sine_integral(100.0);
    add("sine_integral(100) near pi/2", std::fabs(si100 - 1.5707963267948966) < 0.01, fmt(si100));
    add("exhaustive_variation zigzag", oracle::exhaustive_variation({0, 1, 0, 1}) == 3.0, "3");

    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> val(-16, 16), len(2, 10);
    int mismatches = 0, var_mismatch = 0;
    EngineConfig cfg;
    for (int t = 0; t < 200; ++t) {
        int n = len(rng);
        oracle::FiniteScenario fs;
        for (int i = 0; i < n; ++i) {
            fs.G.push_back(val(rng) / 8.0);
            fs.f.push_back(val(rng) / 8.0);
        }
        auto G = StepNBV::table(n, fs.G);
        std::vector<double> fv = fs.f;
        Integrand f;
        f.eval = [fv](const Point& p) { return fv[static_cast<std::size_t>(p.n)]; };
        IntegralResult r = integrate(f, *G, cfg);
        if (r.verdict != Verdict::Converged || r.value != oracle::finite_line_integral(fs)) ++mismatches;
        if (total_variation(*G) != oracle::exhaustive_variation(fs.G)) ++var_mismatch;
    }
    add("finite-line engine vs closed form (200 cases)", mismatches == 0, std::to_string(mismatches) + " mismatches");
    add("step variation vs exhaustive divisions (200 cases)", var_mismatch == 0, std::to_string(var_mismatch) + " mismatches");

    auto G = StepNBV::table(3, {0, 1, 3});
    TaggedPartition P = cousin_partition(G->line(), singleton_gauge(G->line()));
    std::vector<double> fv{2, 5, 7};
    double rs = riemann_sum([&](const Point& p) { return fv[static_cast<std::size_t>(p.n)]; }, *G, P);
    add("riemann_sum finite example", rs == 19.0, fmt(rs));

    out.result["checks"] = checks;
    out.result["ok"] = all;
    out.exit_code = all ? kExitOk : kExitNonconverged;
    return out;
}

void write_csv(const std::string& path, const CommandOutput& out) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write CSV to " + path);
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) f << ',';
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                f << '"';
                for (char ch : c) f << (ch == '"' ? "\"\"" : std::string(1, ch));
                f << '"';
            } else {
                f << c;
            }
        }
        f << '\n';
    };
    line(out.csv_header);
    for (const auto& r : out.csv_rows) line(r);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"integrate", "hake", "decompose", "measure", "approx", "lab", "selftest"};
    return names;
}

int exit_code_for(Verdict v) {
    switch (v) {
        case Verdict::Converged: return kExitOk;
        case Verdict::Nonconverged: return kExitNonconverged;
        case Verdict::Diverging: return kExitDiverging;
    }
    return kExitUsage;
}

CommandOutput run(const std::string& command, const std::optional<Scenario>& scenario, const CliOptions& opts) {
    if (command == "selftest") return cmd_selftest();
    const Scenario& s = need_scenario(scenario, command);
    try {
        if (command == "integrate") return cmd_integrate(s, opts);
        if (command == "hake") return cmd_hake(s, opts);
        if (command == "decompose") return cmd_decompose(s, opts);
        if (command == "measure") return cmd_measure(s, opts);
        if (command == "approx") return cmd_approx(s, opts);
        if (command == "lab") return cmd_lab(s, opts);
    } catch (const json::exception& e) {
        throw UsageError(std::string("options: ") + e.what());
    }
    throw UsageError("unknown command '" + command + "'");
}

int cli_main(int argc, char** argv) {
    CLI::App app{"ksl: gauge (Kurzweil-Stieltjes) integration on compact lines"};
    std::string command, scenario_path, csv_path, direction;
    double tol = 0, divergence = 0;
    int max_level = 0, depth = 0, sample = 0, indent = 2;
    app.add_option("command", command, "integrate | hake | decompose | measure | approx | lab | selftest")->required();
    auto* o_scen = app.add_option("--scenario", scenario_path, "scenario JSON file");
    auto* o_tol = app.add_option("--tol", tol, "engine tolerance (lab: convergence tolerance)");
    auto* o_lvl = app.add_option("--max-level", max_level, "deepest gauge level");
    app.add_option("--csv", csv_path, "write the convergence table here");
    auto* o_dir = app.add_option("--direction", direction, "hake direction: forward | backward");
    auto* o_depth = app.add_option("--depth", depth, "lab level n");
    auto* o_sample = app.add_option("--sample", sample, "sample size (lab, decompose)");
    auto* o_div = app.add_option("--divergence-bound", divergence, "magnitude that counts as runaway growth");
    app.add_option("--json-indent", indent, "JSON indent, -1 for one line");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }
    auto emit_error = [&](const std::string& kind, const std::string& msg, int code) {
        json j = base(command);
        j["error"] = kind;
        j["message"] = msg;
        std::cout << j.dump(indent) << '\n';
        std::cerr << "ksl: " << msg << '\n';
        return code;
    };
    try {
        if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
            throw UsageError("unknown command '" + command + "'");
        CliOptions opts;
        if (*o_tol) opts.tol = tol;
        if (*o_lvl) opts.max_level = max_level;
        if (*o_dir) opts.direction = direction;
        if (*o_depth) opts.depth = depth;
        if (*o_sample) opts.sample = sample;
        if (*o_div) opts.divergence_bound = divergence;
        std::optional<Scenario> scen;
        if (*o_scen) {
            std::ifstream in(scenario_path);
            if (!in) throw UsageError("cannot read scenario file " + scenario_path);
            std::stringstream buf;
            buf << in.rdbuf();
            scen = parse_scenario(buf.str());
        }
        CommandOutput out = run(command, scen, opts);
        if (!csv_path.empty()) write_csv(csv_path, out);
        std::cout << out.result.dump(indent) << '\n';
        return out.exit_code;
    } catch (const NonconvergenceError& e) {
        return emit_error("nonconverged", e.what(), kExitNonconverged);
    } catch (const UsageError& e) {
        return emit_error("usage", e.what(), kExitUsage);
    } catch (const PreconditionError& e) {
        return emit_error("precondition", e.what(), kExitUsage);
    } catch (const RepresentationError& e) {
        return emit_error("representation", e.what(), kExitUsage);
    } catch (const CapacityError& e) {
        return emit_error("capacity", e.what(), kExitUsage);
    } catch (const Error& e) {
        return emit_error("error", e.what(), kExitUsage);
    }
}

}  // namespace ksl
