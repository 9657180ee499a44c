#include "pcs/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pcs/bar.hpp"
#include "pcs/curve.hpp"
#include "pcs/hodge.hpp"
#include "pcs/numeric.hpp"
#include "pcs/poly2.hpp"
#include "pcs/resolution.hpp"
#include "pcs/semistable.hpp"

namespace pcs {

namespace {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return Json::parse(in);
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
}

/// Every command prints one JSON report to stdout; --out mirrors it (and
/// any DOT source) into files.
void emit(const Json& report, const std::string& outdir, const std::string& name) {
    std::cout << report.dump(2) << "\n";
    if (!outdir.empty()) write_file(outdir, name, report.dump(2) + "\n");
}

void emit_dot(const std::string& dot, const std::string& outdir, const std::string& name) {
    if (outdir.empty())
        std::cout << dot;
    else
        write_file(outdir, name, dot);
}

/// Scenario scalars: integers stay integers, identifier strings become
/// symbols, anything else goes through the canonical parser.
Scalar scalar_from_json(const Json& v) {
    if (v.is_number_integer()) return Scalar(v.get<long>());
    std::string s = v.get<std::string>();
    bool ident = !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_');
    for (char ch : s)
        ident = ident && (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_');
    if (ident) {
        SymbolTable::declare(s);
        return Scalar::symbol(s);
    }
    return Scalar::parse(s);
}

Json complex_json(const Cplx& z) {
    return Json{{"re", z.real()}, {"im", z.imag()}};
}

int cmd_resolve(const std::string& input, const std::string& outdir, bool dot) {
    CurveSpec c = curve_from_json(load_json(input));
    ResolutionGraph rg = build_resolution_graph(c);

    Json rep;
    rep["command"] = "resolve";
    rep["branches"] = c.num_branches();
    Json mults = Json::array();
    for (const auto& v : rg.vertices)
        if (v.exceptional) mults.push_back(v.e);
    rep["e"] = mults;
    rep["d"] = lcm_d(rg);
    rep["mu"] = mu_from_resolution(rg, c.num_branches());
    rep["mu_branch_data"] = milnor_from_branch_data(c);
    if (!c.polynomial.empty())
        rep["mu_polynomial"] = milnor_number_poly(parse_poly2(c.polynomial));
    rep["graph"] = resolution_to_json(rg);

    emit(rep, outdir, "resolution.json");
    if (dot) emit_dot(resolution_to_dot(rg), outdir, "resolution.dot");
    return 0;
}

int cmd_semistable(const std::string& input, const std::string& outdir, bool dot) {
    CurveSpec c = curve_from_json(load_json(input));
    ResolutionGraph rg = build_resolution_graph(c);
    CentralFiberGraph cf = semistable_reduce(rg);
    H1Check h1 = verify_h1_dimension(cf, mu_from_resolution(rg, c.num_branches()));

    Json rep;
    rep["command"] = "semistable";
    rep["d"] = cf.d;
    rep["vertices"] = cf.graph.vertices.size();
    rep["edges"] = cf.graph.edges.size();
    rep["compact"] = cf.num_compact();
    rep["total_genus"] = cf.total_genus();
    rep["tree"] = tree_test(cf);
    rep["h1"] = Json{{"computed", h1.computed}, {"expected", h1.expected}, {"pass", h1.pass}};
    rep["fiber"] = central_fiber_to_json(cf);

    emit(rep, outdir, "central_fiber.json");
    if (dot) emit_dot(graph_to_dot(cf.graph, "fiber"), outdir, "central_fiber.dot");
    return 0;
}

Json top_weight_flags(const MhsSummary& mhs) {
    Json flags = Json::array();
    if (mhs.w2 != mhs.gr2_alt)
        flags.push_back(
            "the edge-count and cycle-count formulas for the top weight disagree; "
            "both values are reported and nothing is chosen silently");
    return flags;
}

int cmd_hodge(const std::string& input, const std::string& outdir) {
    CurveSpec c = curve_from_json(load_json(input));
    ResolutionGraph rg = build_resolution_graph(c);
    CentralFiberGraph cf = semistable_reduce(rg);
    MhsSummary mhs = weight_graded_dims(cf);
    std::vector<MonstranceData> bd;
    for (const auto& b : c.branches) bd.push_back(monstrance_order(b));
    NilpotentOps ops = nilpotent_matrices(cf, bd);

    Json rep;
    rep["command"] = "hodge";
    rep["tree"] = tree_test(cf);
    rep["mhs"] = mhs_to_json(mhs);
    rep["ops"] = ops_to_json(ops);
    rep["flags"] = top_weight_flags(mhs);

    emit(rep, outdir, "hodge.json");
    return 0;
}

int cmd_invariant(const std::string& input, const std::string& outdir, int s, int jobs) {
    (void)jobs;  // the orbit summands share one computation
    CurveSpec c = curve_from_json(load_json(input));
    InvariantSummary inv = assemble_invariant(c, s);

    Json rep;
    rep["command"] = "invariant";
    rep["s"] = s;
    rep["summary"] = invariant_to_json(inv);
    rep["flags"] = top_weight_flags(inv.mhs);

    emit(rep, outdir, "invariant.json");
    return 0;
}

int cmd_bar_demo(const std::string& scenario, const std::string& outdir) {
    int segments = 7;
    long d = 156, mk = 24;
    Scalar rho;
    bool have_rho = false;
    if (!scenario.empty()) {
        Json j = load_json(scenario);
        segments = j.value("segments", 7);
        d = j.value("d", 156L);
        mk = j.value("mk", 24L);
        if (j.contains("rho")) {
            rho = scalar_from_json(j.at("rho"));
            have_rho = true;
        }
    }
    if (!have_rho) {
        SymbolTable::declare("rho");
        rho = Scalar::symbol("rho");
    }

    Json rep;
    rep["command"] = "bar-demo";
    rep["segments"] = segments;
    rep["d"] = d;
    rep["mk"] = mk;
    rep["rho"] = rho.str();
    try {
        OmegaReport om = scenario_omega(make_chain_fiber(segments), rho, d, mk);
        rep["n_coeff"] = om.n_coeff.str();
        rep["m_coeff"] = om.m_coeff.str();
        rep["l_coeff"] = om.l_coeff.str();
        rep["nonzero"] = true;
        rep["verdict"] = "the twisted class does not vanish";
        rep["cross_check"] =
            "a hand value of (-32/156)*rho circulates for the default scenario; direct "
            "evaluation of (1/d)*N - (1/mk)*M on the reduced classes gives (1/312)*rho, "
            "and the computed value is what is reported";
        rep["n_class"] = bar_to_json(om.n_class);
        rep["m_class"] = bar_to_json(om.m_class);
        rep["l_class"] = bar_to_json(om.l_class);
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        if (msg.rfind("degenerate input", 0) != 0) throw;
        rep["nonzero"] = false;
        rep["verdict"] = "degenerate input";
        rep["detail"] = msg;
    }
    emit(rep, outdir, "bar_demo.json");
    return 0;
}

int cmd_integrate_demo(const std::vector<double>& grid, const std::string& scenario,
                       const std::string& outdir) {
    double lambda = 1.0;
    if (!scenario.empty()) {
        Json j = load_json(scenario);
        lambda = j.value("lambda", 1.0);
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

    // The straight node crossing: unit residues, balanced profile, charts
    // parametrized by arc length with the outgoing tangent scaled.
    auto node_crossing = [](double scale) {
        NumericCrossing cr;
        cr.in.pos = [](double t) { return Cplx(-t, 0.0); };
        cr.in.vel = [](double) { return Cplx(-1.0, 0.0); };
        cr.out.pos = [scale](double t) { return Cplx(scale * t, 0.0); };
        cr.out.vel = [scale](double) { return Cplx(scale, 0.0); };
        cr.res_in = Cplx(1.0, 0.0);
        cr.res_out = Cplx(-1.0, 0.0);
        cr.h = [](double, Cplx w) { return -w; };
        return cr;
    };

    NumericResult base = numeric_extrapolate(node_crossing(1.0), grid);
    NumericResult moved = numeric_extrapolate(node_crossing(lambda), grid);
    Cplx shift = moved.limit - base.limit;
    Cplx expected(-std::log(lambda), 0.0);

    Json rep;
    rep["command"] = "integrate-demo";
    rep["grid"] = grid;
    Json vals = Json::array();
    for (const Cplx& v : base.values) vals.push_back(complex_json(v));
    rep["values"] = vals;
    rep["limit"] = complex_json(base.limit);
    rep["symbolic"] = complex_json(Cplx(0.0, 0.0));
    rep["symbolic_agrees"] = std::abs(base.limit) < 1e-6;
    rep["lambda"] = lambda;
    rep["limit_over_lambda"] = complex_json(moved.limit);
    rep["shift"] = complex_json(shift);
    rep["expected_shift"] = complex_json(expected);
    rep["shift_agrees"] = std::abs(shift - expected) < 1e-6;

    emit(rep, outdir, "integrate_demo.json");
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"exact invariants of plane curve singularities"};
    app.require_subcommand(1);

    std::string input, outdir, scenario;
    bool dot = false;
    int s = 1, jobs = 1;
    std::vector<double> grid = numeric_default_grid();

    CLI::App* c_res = app.add_subcommand("resolve", "embedded resolution of the germ");
    CLI::App* c_semi = app.add_subcommand("semistable", "semistable model of the family");
    CLI::App* c_hodge = app.add_subcommand("hodge", "weight data and monodromy operators");
    CLI::App* c_inv = app.add_subcommand("invariant", "level-s invariant of the germ");
    CLI::App* c_bar = app.add_subcommand("bar-demo", "worked chain scenario for the bar classes");
    CLI::App* c_int =
        app.add_subcommand("integrate-demo", "numeric crossing integrals against the exact law");

    for (CLI::App* cmd : {c_res, c_semi, c_hodge, c_inv})
        cmd->add_option("--input", input, "curve description JSON")->required();
    for (CLI::App* cmd : {c_res, c_semi, c_hodge, c_inv, c_bar, c_int})
        cmd->add_option("--out", outdir, "directory for report files");
    for (CLI::App* cmd : {c_res, c_semi})
        cmd->add_flag("--dot", dot, "also emit DOT graph source");
    c_inv->add_option("--s", s, "truncation level")->check(CLI::PositiveNumber);
    c_inv->add_option("--jobs", jobs,
                      "worker count for the orbit sweep; the summands currently share "
                      "one computation")
        ->check(CLI::PositiveNumber);
    for (CLI::App* cmd : {c_bar, c_int})
        cmd->add_option("--scenario", scenario, "scenario JSON overriding the defaults");
    c_int->add_option("--epsilon-grid", grid, "cutoff grid for the extrapolation")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_res->parsed()) return cmd_resolve(input, outdir, dot);
        if (c_semi->parsed()) return cmd_semistable(input, outdir, dot);
        if (c_hodge->parsed()) return cmd_hodge(input, outdir);
        if (c_inv->parsed()) return cmd_invariant(input, outdir, s, jobs);
        if (c_bar->parsed()) return cmd_bar_demo(scenario, outdir);
        if (c_int->parsed()) return cmd_integrate_demo(grid, scenario, outdir);
    } catch (const ContactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pcs
