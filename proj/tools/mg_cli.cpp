#include "mg/config.hpp"
#include "mg/coupled.hpp"
#include "mg/errors.hpp"
#include "mg/gauge.hpp"
#include "mg/gauged.hpp"
#include "mg/models.hpp"
#include "mg/solver.hpp"
#include "mg/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

using namespace mg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, ConfigFailure = 1, Obstruction = 2, ToleranceFailure = 3, SolverFailure = 4 };

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<double> tolerance;
    std::optional<int> dims;
    std::string family;
};

struct ObstructionError {
    std::string message;
};

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotIntegrable:
    case ErrorKind::NonConservingModel:
    case ErrorKind::CurlObstruction:
    case ErrorKind::PeriodicityViolation: return Obstruction;
    case ErrorKind::BlowUp:
    case ErrorKind::FloorBreach:
    case ErrorKind::AllBelowFloor: return SolverFailure;
    default: return ConfigFailure;
    }
}

std::optional<double> env_floor()
{
    const char* v = std::getenv("MG_FLOOR");
    if (!v || !*v)
        return std::nullopt;
    char* end = nullptr;
    const double f = std::strtod(v, &end);
    if (*end != '\0' || !(f > 0))
        throw Error(ErrorKind::ConfigError, std::string("MG_FLOOR must be a positive number, got '") + v + "'");
    return f;
}

double density_floor() { return env_floor().value_or(default_floor); }

RunConfig load_config(const Options& o)
{
    if (o.config.empty())
        throw Error(ErrorKind::ConfigError, "--config is required");
    return RunConfig::load(o.config);
}

std::set<std::string> merge(std::initializer_list<std::set<std::string>> sets, std::initializer_list<std::string> extra = {})
{
    std::set<std::string> out(extra);
    for (const auto& s : sets)
        out.insert(s.begin(), s.end());
    return out;
}

// unknown keys are rejected; keys with the target_ prefix describe an alternative transformed model
void check_keys(const RunConfig& c, const std::set<std::string>& allowed, bool allow_target = false)
{
    for (const auto& k : c.keys()) {
        if (allowed.count(k))
            continue;
        if (allow_target && k.rfind("target_", 0) == 0 && model_keys().count(k.substr(7)))
            continue;
        throw Error(ErrorKind::ConfigError, "unknown key '" + k + "'");
    }
}

// one config file can drive transform, equiv, simulate and verify
std::set<std::string> run_keys() { return merge({model_keys(), grid_keys(), solver_keys()}, {"dims", "check"}); }

fs::path out_dir(const Options& o)
{
    fs::path p(o.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw Error(ErrorKind::ConfigError, "cannot create output directory " + o.out);
    return p;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream f(path);
    if (!f)
        throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
    f << j.dump(2) << "\n";
}

void write_plot(const fs::path& path, const std::string& label, const std::vector<std::pair<double, double>>& rows)
{
    std::FILE* fp = std::fopen(path.string().c_str(), "w");
    if (!fp)
        throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
    std::fprintf(fp, "# t %s\n", label.c_str());
    for (const auto& [t, v] : rows)
        std::fprintf(fp, "%.10g %.17g\n", t, v);
    std::fclose(fp);
}

std::string snapshot_name(const std::string& stem, std::size_t k)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem.c_str(), k);
    return buf;
}

void write_trajectory(const fs::path& dir, const std::string& stem, const Trajectory& tr, double floor,
                      const std::string& diagnostics_name)
{
    for (std::size_t k = 0; k < tr.states.size(); ++k)
        write_csv(tr.states[k], (dir / snapshot_name(stem, k)).string(), floor);
    std::FILE* fp = std::fopen((dir / diagnostics_name).string().c_str(), "w");
    if (!fp)
        throw Error(ErrorKind::ConfigError, "cannot write diagnostics");
    std::fprintf(fp, "t,N,continuity_residual\n");
    for (const auto& d : tr.diagnostics)
        std::fprintf(fp, "%.10g,%.17g,%.17g\n", d.t, d.N, d.continuity_residual);
    std::fclose(fp);
}

struct Check {
    std::string name;
    double value, tolerance;
    bool ok() const { return value <= tolerance; }
};

json checks_json(const std::vector<Check>& cs)
{
    json j = json::array();
    for (const auto& c : cs)
        j.push_back({{"quantity", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"ok", c.ok()}});
    return j;
}

void print_checks(const std::vector<Check>& cs, std::FILE* to)
{
    std::fprintf(to, "%-28s %-12s %-12s %s\n", "quantity", "value", "tolerance", "status");
    for (const auto& c : cs)
        std::fprintf(to, "%-28s %-12.4e %-12.4e %s\n", c.name.c_str(), c.value, c.tolerance, c.ok() ? "ok" : "FAIL");
}

int finish_checks(const std::vector<Check>& cs)
{
    const bool all = std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.ok(); });
    if (all) {
        print_checks(cs, stdout);
        return Ok;
    }
    std::fprintf(stderr, "tolerance exceeded\n");
    print_checks(cs, stderr);
    return ToleranceFailure;
}

json rmat_json(const RMat& m)
{
    json j = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& v : row)
            r.push_back(v.str());
        j.push_back(r);
    }
    return j;
}

// catalog

struct CatalogEntry {
    std::string name, params, canonical, generator;
};

const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> c{
        {"dnls", "b1, b2, b3, b4 (or wave form a1..a4)", "canonical iff b3=-2b4", "sigma = (b4/2) int rho dx"},
        {"doebner-goldin", "c1..c5, D", "canonical iff c1=-c4=D, c3=0, c2=-2c5", "sigma = (D/2) ln rho"},
        {"eip", "kappa", "canonical", "sigma = kappa int rho S_x dx (one dimension only)"},
        {"entropic", "kappa(rho), D, G(rho)", "canonical", "sigma = -(D/2) ln kappa(rho)"},
        {"five-function", "f1..f5 as functions of rho", "general", "sigma = int f5/rho drho"},
        {"gauged-anomalous", "q, D, alpha", "canonical",
         "sigma = (D/2)(q rho^(q-1) - 1)/(q-1), sigma = (D/2) ln rho at q=1"},
        {"eip-real", "kappa", "real nonlinearity", "identity"},
        {"entropic-real", "kappa(rho), D, G(rho)", "real nonlinearity", "identity"},
        {"anomalous-real", "q, beta", "real nonlinearity", "identity"}};
    return c;
}

int cmd_catalog(const Options& o)
{
    bool found = o.family.empty();
    for (const auto& e : catalog()) {
        if (!o.family.empty() && e.name != o.family)
            continue;
        found = true;
        std::printf("%s: %s; %s\n", e.name.c_str(), e.params.c_str(), e.canonical.c_str());
        if (!o.family.empty())
            std::printf("  generator: %s\n", e.generator.c_str());
    }
    if (!found) {
        std::fprintf(stderr, "unknown family '%s'\n", o.family.c_str());
        return ConfigFailure;
    }
    return Ok;
}

json transform_json(const ModelSpec& model, const TransformResult& tr)
{
    json rows = json::array();
    for (const auto& r : tr.coefficient_report)
        rows.push_back({{"name", r.name}, {"before", r.before}, {"after", r.after}});
    return {{"family", family_name(model)},
            {"generator", describe(tr.generator)},
            {"transformed_family", family_name(tr.transformed)},
            {"coefficients", rows},
            {"notes", tr.notes}};
}

int cmd_transform(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, run_keys(), true);
    const ModelSpec model = model_from_config(c);
    const int dims = o.dims.value_or(static_cast<int>(c.integer("dims", 1)));
    const CurlCheck curl = curl_condition_holds(model, dims);
    if (!curl.holds)
        throw ObstructionError{"curl condition fails for n>1: " + curl.witness};
    const TransformResult tr = transform_model(model);
    json rep = transform_json(model, tr);
    rep["config"] = c.text();
    rep["curl"] = {{"dims", dims}, {"holds", curl.holds}, {"witness", curl.witness}};
    write_json(out_dir(o) / "transform.json", rep);
    std::printf("generator: %s\n", describe(tr.generator).c_str());
    for (const auto& r : tr.coefficient_report)
        std::printf("%-12s %s -> %s\n", r.name.c_str(), r.before.c_str(), r.after.c_str());
    for (const auto& n : tr.notes)
        std::printf("note: %s\n", n.c_str());
    return Ok;
}

struct EquivSetup {
    ModelSpec model;
    std::optional<ModelSpec> target;
    ComplexField psi0;
    SolverConfig cfg;
};

EquivSetup equiv_setup(const RunConfig& c)
{
    const RunConfig t = c.with_prefix("target_");
    std::optional<ModelSpec> target;
    if (t.has("family"))
        target = model_from_config(t);
    else if (!t.keys().empty())
        throw Error(ErrorKind::ConfigError, "target_ keys need target_family");
    const Grid1D g = grid_from_config(c);
    return {model_from_config(c), target, initial_from_config(c, g), solver_from_config(c, env_floor())};
}

std::vector<Check> equiv_checks(const EquivalenceReport& r, const Options& o)
{
    const double tol = o.tolerance.value_or(1e-5);
    const double tight = std::min(tol, 1e-8);
    return {{"max_rho_discrepancy", r.max_rho_discrepancy, tol},
            {"phase_relation_residual", r.phase_relation_residual, tol},
            {"current_collapse_residual", r.current_collapse_residual, tight},
            {"N_drift_original", r.N_drift_original, tight},
            {"N_drift_transformed", r.N_drift_transformed, tight}};
}

json equiv_json(const EquivalenceReport& r)
{
    return {{"generator", r.generator},
            {"transformed_family", r.transformed_family},
            {"max_rho_discrepancy", r.max_rho_discrepancy},
            {"phase_relation_residual", r.phase_relation_residual},
            {"current_collapse_residual", r.current_collapse_residual},
            {"N_drift_original", r.N_drift_original},
            {"N_drift_transformed", r.N_drift_transformed}};
}

int cmd_equiv(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, run_keys(), true);
    const EquivSetup s = equiv_setup(c);
    const EquivalenceReport r = verify_equivalence(s.model, s.psi0, s.cfg, s.target);
    const auto checks = equiv_checks(r, o);
    json rep = equiv_json(r);
    rep["config"] = c.text();
    rep["checks"] = checks_json(checks);
    write_json(out_dir(o) / "equiv.json", rep);
    return finish_checks(checks);
}

std::vector<Check> linear_checks(const LinearizationReport& r, const Options& o)
{
    return {{"max_rho_discrepancy", r.max_rho_discrepancy, o.tolerance.value_or(1e-4)},
            {"N_drift_direct", r.N_drift_direct, std::min(o.tolerance.value_or(1e-8), 1e-8)}};
}

json linear_json(const LinearizationReport& r)
{
    json j = {{"D", r.D}, {"kbar_squared", r.kbar_sq}, {"kbar_value", r.kbar},
              {"max_rho_discrepancy", r.max_rho_discrepancy}, {"N_drift_direct", r.N_drift_direct}};
    j["kbar"] = r.kbar_exact.empty() ? json(r.kbar) : json(r.kbar_exact);
    return j;
}

int cmd_linearize(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, run_keys());
    const Grid1D g = grid_from_config(c);
    const LinearizationReport r =
        verify_linearization(c.rational("D"), initial_from_config(c, g), solver_from_config(c, env_floor()));
    const auto checks = linear_checks(r, o);
    json rep = linear_json(r);
    rep["config"] = c.text();
    rep["checks"] = checks_json(checks);
    write_json(out_dir(o) / "linearize.json", rep);
    std::printf("kbar = %s (%.6g), kbar^2 = %s\n", r.kbar_exact.empty() ? "irrational" : r.kbar_exact.c_str(), r.kbar,
                r.kbar_sq.c_str());
    return finish_checks(checks);
}

int cmd_verify(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, run_keys(), true);
    const std::string check = c.str("check", "equivalence");
    const fs::path dir = out_dir(o);
    if (check == "linearization") {
        const Grid1D g = grid_from_config(c);
        const SolverConfig cfg = solver_from_config(c, env_floor());
        const LinearizationRun run = run_linearization(c.rational("D"), initial_from_config(c, g), cfg);
        write_trajectory(dir, "direct", run.direct, cfg.floor, "diagnostics.csv");
        for (std::size_t k = 0; k < run.linear.size(); ++k)
            write_csv(run.linear[k], (dir / snapshot_name("linear", k)).string(), cfg.floor);
        write_plot(dir / "rho_discrepancy.dat", "max_rho_discrepancy", run.series);
        std::vector<std::pair<double, double>> n;
        for (const auto& d : run.direct.diagnostics)
            n.emplace_back(d.t, d.N);
        write_plot(dir / "N_direct.dat", "N", n);
        const auto checks = linear_checks(run.report, o);
        json rep = linear_json(run.report);
        rep["config"] = c.text();
        rep["checks"] = checks_json(checks);
        write_json(dir / "verify.json", rep);
        std::printf("kbar = %s\n", run.report.kbar_exact.empty() ? std::to_string(run.report.kbar).c_str()
                                                                  : run.report.kbar_exact.c_str());
        return finish_checks(checks);
    }
    if (check != "equivalence")
        throw Error(ErrorKind::ConfigError, "check must be equivalence or linearization");
    const EquivSetup s = equiv_setup(c);
    const EquivalenceRun run = run_equivalence(s.model, s.psi0, s.cfg, s.target);
    write_trajectory(dir, "original", run.original, s.cfg.floor, "diagnostics.csv");
    write_trajectory(dir, "transformed", run.transformed, s.cfg.floor, "transformed_diagnostics.csv");
    std::vector<std::pair<double, double>> rho, phase, cur, na, nb;
    for (const auto& r : run.series) {
        rho.emplace_back(r.t, r.rho);
        phase.emplace_back(r.t, r.phase);
        cur.emplace_back(r.t, r.current);
    }
    for (const auto& d : run.original.diagnostics)
        na.emplace_back(d.t, d.N);
    for (const auto& d : run.transformed.diagnostics)
        nb.emplace_back(d.t, d.N);
    write_plot(dir / "rho_discrepancy.dat", "max_rho_discrepancy", rho);
    write_plot(dir / "phase_residual.dat", "phase_relation_residual", phase);
    write_plot(dir / "current_collapse.dat", "current_collapse_residual", cur);
    write_plot(dir / "N_original.dat", "N", na);
    write_plot(dir / "N_transformed.dat", "N", nb);
    const auto checks = equiv_checks(run.report, o);
    json rep = equiv_json(run.report);
    rep["config"] = c.text();
    rep["checks"] = checks_json(checks);
    write_json(dir / "verify.json", rep);
    return finish_checks(checks);
}

int cmd_simulate(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, run_keys());
    const ModelSpec model = model_from_config(c);
    const Grid1D g = grid_from_config(c);
    const SolverConfig cfg = solver_from_config(c, env_floor());
    const Trajectory tr = integrate(model, initial_from_config(c, g), cfg);
    const fs::path dir = out_dir(o);
    write_trajectory(dir, "psi", tr, cfg.floor, "diagnostics.csv");
    std::vector<std::pair<double, double>> n, res;
    for (const auto& d : tr.diagnostics) {
        n.emplace_back(d.t, d.N);
        res.emplace_back(d.t, d.continuity_residual);
    }
    write_plot(dir / "N.dat", "N", n);
    write_plot(dir / "continuity_residual.dat", "continuity_residual", res);
    double drift = 0.0;
    for (const auto& d : tr.diagnostics)
        drift = std::max(drift, std::abs(d.N - tr.diagnostics.front().N));
    json rep = {{"config", c.text()},
                {"family", family_name(model)},
                {"snapshots", tr.states.size()},
                {"N_initial", tr.diagnostics.front().N},
                {"N_drift", drift},
                {"max_corrector_used", tr.max_corrector_used},
                {"held_points_final", to_hydro(tr.states.back(), cfg.floor).held_points}};
    write_json(dir / "simulate.json", rep);
    std::printf("%zu snapshots, N drift %.3e\n", tr.states.size(), drift);
    return Ok;
}

int cmd_coupled(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, coupled_keys());
    const CoupledModel m = coupled_from_config(c);
    const ConservationStructure cs = conservation_structure(m);
    if (cs.kind == Conservation::NonConserving)
        throw ObstructionError{"no conserved multiplet structure, witness pair (" + std::to_string(cs.wi) + "," +
                               std::to_string(cs.wj) + ")"};
    const HermitianResult r = transform_coupled(m);
    const Reduction red = special_reduction(m);
    json gens = json::array();
    for (const auto& g : r.generators) {
        json w = json::array();
        for (const auto& v : g.weights)
            w.push_back(v.str());
        gens.push_back(w);
    }
    json omega = json::array();
    for (const auto& om : r.omega)
        omega.push_back(rmat_json(om));
    json red_j = {{"kind", reduction_name(red)}};
    if (const auto* jl = std::get_if<JackiwLike>(&red)) {
        json eta = json::array();
        for (const auto& v : jl->eta)
            eta.push_back(v.str());
        red_j["eta"] = eta;
    } else if (const auto* cc = std::get_if<CurrentCoupled>(&red)) {
        red_j["eta"] = rmat_json(cc->eta);
    } else if (const auto* gr = std::get_if<GeneralReduction>(&red)) {
        red_j["note"] = gr->note;
    }
    json rep = {{"config", c.text()},
                {"conservation", cs.text()},
                {"generator_weights", gens},
                {"mu", rmat_json(r.mu)},
                {"nu", rmat_json(r.nu)},
                {"omega", omega},
                {"F", rmat_json(r.F)},
                {"offdiag_empty", r.offdiag_empty},
                {"normalization", r.normalization},
                {"phase_convention", r.phase_convention},
                {"reduction", red_j}};
    write_json(out_dir(o) / "coupled.json", rep);
    std::printf("conservation: %s\nreduction: %s\noff-diagonal part %s\n", cs.text().c_str(),
                reduction_name(red).c_str(), r.offdiag_empty ? "empty" : "present");
    return Ok;
}

int cmd_gauged(const Options& o)
{
    const RunConfig c = load_config(o);
    check_keys(c, merge({grid_keys()}, {"q", "D", "alpha", "side", "sign", "gauge_file"}));
    const GaugedAnomalous m{c.rational("q"), c.rational("D"), c.rational("alpha", 0)};
    const int sign = static_cast<int>(c.integer("sign", default_sign));
    if (sign != 1 && sign != -1)
        throw Error(ErrorKind::ConfigError, "sign must be 1 or -1");
    const GaugedTransformResult mt = matter_transform(m);
    json rep = {{"config", c.text()}, {"sigma", describe(mt.sigma)}, {"beta", mt.beta.str()}, {"sign", sign}};
    const std::string side = c.str("side", "matter");
    if (side == "field") {
        const Grid1D g = grid_from_config(c);
        const double floor = density_floor();
        const HydroField h = to_hydro(initial_from_config(c, g), floor);
        ExternalGauge ext{RVec(g.n, 0.0), RVec(g.n, 0.0), g};
        if (c.has("gauge_file"))
            ext = load_external_gauge(c.str("gauge_file"), g);
        const FieldTransform ft = field_transform(m, h, ext, sign, floor);
        const RVec sigma = evaluate_generator(mt.sigma, h, floor);
        const RVec j_matter = minimal_current(to_hydro(apply_gauge(from_hydro(h), sigma), floor), ext.A, sign);
        const RVec j_field = minimal_current(h, ft.chi, sign);
        double dev = 0.0;
        for (int i = 0; i < g.n; ++i)
            dev = std::max(dev, std::abs(j_matter[i] - j_field[i]));
        const fs::path dir = out_dir(o);
        std::FILE* fp = std::fopen((dir / "gauge_field.csv").string().c_str(), "w");
        if (!fp)
            throw Error(ErrorKind::ConfigError, "cannot write gauge_field.csv");
        std::fprintf(fp, "x,chi,chi0\n");
        for (int i = 0; i < g.n; ++i)
            std::fprintf(fp, "%.10g,%.17g,%.17g\n", g.x(i), ft.chi[i], ft.chi0[i]);
        std::fclose(fp);
        rep["side"] = "field";
        rep["two_route_current_deviation"] = dev;
        std::printf("two-route current deviation %.3e\n", dev);
    } else if (side == "matter") {
        rep["side"] = "matter";
    } else {
        throw Error(ErrorKind::ConfigError, "side must be matter or field");
    }
    write_json(out_dir(o) / "gauged.json", rep);
    std::printf("sigma: %s\nbeta = %s\n", describe(mt.sigma).c_str(), mt.beta.str().c_str());
    return Ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gauge transformations for nonlinear Schroedinger models"};
    app.require_subcommand(1);
    Options opt;
    int code = Ok;

    auto add_common = [&](CLI::App* sub, bool numeric) {
        sub->add_option("--config", opt.config, "run configuration file");
        sub->add_option("--out", opt.out, "output directory");
        if (numeric)
            sub->add_option("--tolerance", opt.tolerance, "residual tolerance");
        sub->add_option("--dims", opt.dims, "spatial dimensions for the curl check");
    };

    auto* catalog_cmd = app.add_subcommand("catalog", "list the model families");
    catalog_cmd->add_option("--family", opt.family, "show a single family");
    auto* transform_cmd = app.add_subcommand("transform", "transform a model to a real nonlinearity");
    auto* equiv_cmd = app.add_subcommand("equiv", "check gauge equivalence numerically");
    auto* linearize_cmd = app.add_subcommand("linearize", "check the linearization of a diffusive model");
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate a model and write snapshots");
    auto* verify_cmd = app.add_subcommand("verify", "equivalence or linearization with trajectory output");
    auto* coupled_cmd = app.add_subcommand("coupled-transform", "transform a coupled system");
    auto* gauged_cmd = app.add_subcommand("gauged-transform", "anomalous diffusion with an external gauge field");
    for (auto* s : {transform_cmd, coupled_cmd, gauged_cmd, simulate_cmd})
        add_common(s, false);
    for (auto* s : {equiv_cmd, linearize_cmd, verify_cmd})
        add_common(s, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? Ok : ConfigFailure;
    }

    try {
        if (*catalog_cmd)
            code = cmd_catalog(opt);
        else if (*transform_cmd)
            code = cmd_transform(opt);
        else if (*equiv_cmd)
            code = cmd_equiv(opt);
        else if (*linearize_cmd)
            code = cmd_linearize(opt);
        else if (*simulate_cmd)
            code = cmd_simulate(opt);
        else if (*verify_cmd)
            code = cmd_verify(opt);
        else if (*coupled_cmd)
            code = cmd_coupled(opt);
        else if (*gauged_cmd)
            code = cmd_gauged(opt);
    } catch (const ObstructionError& e) {
        std::fprintf(stderr, "%s\n", e.message.c_str());
        return Obstruction;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return ConfigFailure;
    }
    return code;
}
