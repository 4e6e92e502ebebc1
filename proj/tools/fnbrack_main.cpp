// fnbrack: batch verifier and calculator for Frölicher-Nijenhuis
// brackets, Nijenhuis tensors, projection curvatures and multiplicative
// vector-valued forms on coordinate Lie groupoids.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

#include "fnbrack/bundle.hpp"
#include "fnbrack/detail/multiindex.hpp"
#include "fnbrack/nerve.hpp"
#include "fnbrack/sampling.hpp"
#include "fnbrack/scenario.hpp"

using namespace fnbrack;

namespace {

Vec parse_point(const std::string& text, int expected_dim)
{
    Vec out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (expected_dim >= 0 && static_cast<int>(out.size()) != expected_dim)
        throw ConfigError("expected " + std::to_string(expected_dim) + " coordinates, got " +
                          std::to_string(out.size()));
    return out;
}

VForm form_from_spec(const Chart& chart, int degree, const std::string& spec)
{
    if (spec == "id") {
        if (degree != 1) throw ConfigError("'id' is a degree-1 form");
        return vform_identity(chart);
    }
    if (spec == "zero") return vform_zero(chart, degree);
    return vform_from_exprs(chart, degree, spec);
}

void print_component_table(const VForm& k, const Vec& at)
{
    const int n = k.chart.dim;
    const Vec c = vform_coefficients(k, at);
    const auto idx = detail::increasing_indices(n, k.degree);
    for (size_t jr = 0; jr < idx.size(); ++jr) {
        std::string label = "(";
        for (size_t t = 0; t < idx[jr].size(); ++t) {
            if (t) label += ",";
            label += std::to_string(idx[jr][t] + 1);
        }
        label += ")";
        std::printf("  J=%-10s [", label.c_str());
        for (int i = 0; i < n; ++i) std::printf(" %+.10g", c[jr * n + i]);
        std::printf(" ]\n");
    }
}

int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Frölicher-Nijenhuis bracket calculator and groupoid verifier"};
    app.require_subcommand(1);

    // ---- run ----
    std::string scenario_path, out_path;
    std::uint64_t seed_flag = 0;
    bool seed_set = false, no_timing = false;
    double tol_flag = -1.0;
    auto* run = app.add_subcommand("run", "run the suites listed in a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--seed", seed_flag, "override the scenario seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--tol", tol_flag, "override every suite tolerance");
    run->add_option("--out", out_path, "write the machine-readable report here");
    run->add_flag("--no-timing", no_timing, "report millis as 0 for byte-stable output");

    // ---- verify-suite ----
    std::string suite_name;
    long samples_flag = -1;
    std::uint64_t vs_seed = 20240808;
    double vs_tol = -1.0;
    auto* vs = app.add_subcommand("verify-suite", "run a single property suite");
    vs->add_option("name", suite_name, "suite name (see --list)")->required(false);
    bool list_suites = false;
    vs->add_flag("--list", list_suites, "list available suites");
    vs->add_option("--seed", vs_seed, "run seed");
    vs->add_option("--samples", samples_flag, "sample count override");
    vs->add_option("--tol", vs_tol, "tolerance override");

    // ---- bracket / nijenhuis / curvature ----
    int dim = 2, deg_k = 1, deg_l = 1;
    std::string k_spec, l_spec, at_spec, x_spec, y_spec;
    auto* br = app.add_subcommand("bracket", "print the components of [K, L] at a point");
    br->add_option("--dim", dim, "chart dimension")->required();
    br->add_option("--degree-k", deg_k, "degree of K")->required();
    br->add_option("--k", k_spec, "K components (multi-index major), or id/zero")->required();
    br->add_option("--degree-l", deg_l, "degree of L")->required();
    br->add_option("--l", l_spec, "L components, or id/zero")->required();
    br->add_option("--at", at_spec, "evaluation point, comma-separated")->required();

    auto* nj = app.add_subcommand("nijenhuis", "print the Nijenhuis tensor of a degree-1 form");
    nj->add_option("--dim", dim, "chart dimension")->required();
    nj->add_option("--k", k_spec, "K components (column-major), or id")->required();
    nj->add_option("--at", at_spec, "evaluation point")->required();

    auto* cv = app.add_subcommand("curvature", "print the curvature of a projection");
    cv->add_option("--dim", dim, "chart dimension")->required();
    cv->add_option("--k", k_spec, "projection components (column-major)")->required();
    cv->add_option("--at", at_spec, "evaluation point")->required();
    cv->add_option("--x", x_spec, "optional first argument vector");
    cv->add_option("--y", y_spec, "optional second argument vector");

    // ---- check-mult ----
    std::string zoo = "pair", km_spec = "zero";
    int base_dim = 1, fiber_dim = 1, group_dim = 2, cm_degree = 1, cm_samples = 50;
    double cm_tol = 1e-7;
    std::uint64_t cm_seed = 20240808;
    auto* cm = app.add_subcommand("check-mult", "check multiplicativity of a form on a zoo groupoid");
    cm->add_option("--zoo", zoo, "groupoid name (see list-zoo)");
    cm->add_option("--base-dim", base_dim, "base dimension when applicable");
    cm->add_option("--fiber-dim", fiber_dim, "fiber dimension when applicable");
    cm->add_option("--group-dim", group_dim, "group dimension when applicable");
    cm->add_option("--degree", cm_degree, "degree of the forms");
    cm->add_option("--k", k_spec, "form on the arrow chart: expressions, id or zero")->required();
    cm->add_option("--km", km_spec, "base form: expressions, id or zero");
    cm->add_option("--samples", cm_samples, "sample count");
    cm->add_option("--tol", cm_tol, "verdict tolerance");
    cm->add_option("--seed", cm_seed, "sampling seed");

    auto* lz = app.add_subcommand("list-zoo", "list the built-in groupoids");

    CLI11_PARSE(app, argc, argv);

    const CLI::App* sub = app.get_subcommands().front();

    if (sub == lz) {
        for (const auto& [name, desc] : zoo_catalog())
            std::printf("%-16s %s\n", name.c_str(), desc.c_str());
        return 0;
    }

    if (sub == run) {
        return guarded([&]() -> int {
            Scenario sc = load_scenario(scenario_path);
            RunOptions opts;
            if (seed_set) opts.seed = seed_flag;
            if (tol_flag >= 0) opts.tolerance = tol_flag;
            opts.with_timing = !no_timing;
            Report rep = run_scenario(sc, opts);
            print_report(rep, std::cout);
            if (!out_path.empty()) {
                std::ofstream f(out_path);
                if (!f) throw ConfigError("cannot write report to '" + out_path + "'");
                f << report_to_json(rep, opts.with_timing);
            }
            return rep.pass ? 0 : 1;
        });
    }

    if (sub == vs) {
        return guarded([&]() -> int {
            if (list_suites || suite_name.empty()) {
                for (const auto& info : suite_registry())
                    std::printf("%-28s %s\n", info.name.c_str(), info.description.c_str());
                return 0;
            }
            SuiteRequest req;
            req.seed = vs_seed;
            req.samples = samples_flag;
            req.tolerance = vs_tol;
            SuiteResult r = run_suite(suite_name, req);
            Report rep;
            rep.pass = r.pass;
            rep.suites = {r};
            print_report(rep, std::cout);
            return r.pass ? 0 : 1;
        });
    }

    if (sub == br) {
        return guarded([&]() -> int {
            const Chart c = Chart::cube(dim, "R" + std::to_string(dim));
            VForm k = form_from_spec(c, deg_k, k_spec);
            VForm l = form_from_spec(c, deg_l, l_spec);
            VForm b = fn_bracket(k, l);
            const Vec at = parse_point(at_spec, dim);
            std::printf("[K, L] has degree %d; components at the given point:\n", b.degree);
            print_component_table(b, at);
            return 0;
        });
    }

    if (sub == nj) {
        return guarded([&]() -> int {
            const Chart c = Chart::cube(dim, "R" + std::to_string(dim));
            VForm n = nijenhuis_tensor(form_from_spec(c, 1, k_spec));
            std::printf("Nijenhuis tensor components at the given point:\n");
            print_component_table(n, parse_point(at_spec, dim));
            return 0;
        });
    }

    if (sub == cv) {
        return guarded([&]() -> int {
            const Chart c = Chart::cube(dim, "R" + std::to_string(dim));
            VForm r = projection_curvature(form_from_spec(c, 1, k_spec));
            const Vec at = parse_point(at_spec, dim);
            if (!x_spec.empty() && !y_spec.empty()) {
                const Vec v = eval_vform(r, at, {parse_point(x_spec, dim), parse_point(y_spec, dim)});
                std::printf("R_K(X, Y) = [");
                for (double t : v) std::printf(" %+.10g", t);
                std::printf(" ]\n");
            } else {
                std::printf("curvature components at the given point:\n");
                print_component_table(r, at);
            }
            return 0;
        });
    }

    if (sub == cm) {
        return guarded([&]() -> int {
            Rng rng(cm_seed);
            std::map<std::string, double> params{{"base_dim", double(base_dim)},
                                                 {"fiber_dim", double(fiber_dim)},
                                                 {"group_dim", double(group_dim)}};
            Groupoid g = build_zoo_groupoid(zoo, params, rng);
            VForm k = form_from_spec(g.chart_G, cm_degree, k_spec);
            VForm km = form_from_spec(g.chart_M, cm_degree, km_spec);
            MultOptions opts;
            opts.samples = cm_samples;
            opts.tolerance = cm_tol;
            auto rep = check_multiplicative(g, k, km, rng, opts);
            std::printf("groupoid: %s\n", g.name.c_str());
            std::printf("s-relatedness residual: %.3e\n", rep.s_residual);
            std::printf("t-relatedness residual: %.3e\n", rep.t_residual);
            std::printf("m-relatedness residual: %.3e\n", rep.m_residual);
            std::printf("verdict at tol %.1e: %s\n", rep.tolerance, rep.pass ? "multiplicative" : "NOT multiplicative");
            return rep.pass ? 0 : 1;
        });
    }

    return 0;
}
