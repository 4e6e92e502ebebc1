#include "fnbrack/scenario.hpp"

#include <json.hpp>

#include <algorithm>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fnbrack/bundle.hpp"

namespace fnbrack {

using nlohmann::ordered_json;

namespace {

int worker_count(int requested, int jobs)
{
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("FNBRACK_THREADS")) n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return std::min(n, std::max(jobs, 1));
}

Chart chart_from_decl(const ordered_json& j)
{
    const int dim = j.at("dim").get<int>();
    Chart c = Chart::cube(dim, j.at("name").get<std::string>());
    if (j.contains("box")) {
        const auto& box = j.at("box");
        if (static_cast<int>(box.size()) != dim)
            throw ConfigError("chart '" + c.name + "': box must list one [lo, hi] per coordinate");
        for (int i = 0; i < dim; ++i) {
            c.box_lo[i] = box.at(i).at(0).get<double>();
            c.box_hi[i] = box.at(i).at(1).get<double>();
        }
    }
    return c;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text)
{
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        Scenario sc;
        if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j.at("tolerances").items())
                sc.tolerances[k] = v.get<double>();
        if (j.contains("samples"))
            for (const auto& [k, v] : j.at("samples").items()) sc.samples[k] = v.get<long>();
        if (j.contains("params"))
            for (const auto& [k, v] : j.at("params").items()) {
                if (v.is_number()) sc.params.numbers[k] = v.get<double>();
                else sc.params.strings[k] = v.get<std::string>();
            }

        std::map<std::string, Chart> charts;
        if (j.contains("charts"))
            for (const auto& cj : j.at("charts")) {
                Chart c = chart_from_decl(cj);
                charts.emplace(c.name, c);
            }

        std::map<std::string, VForm> forms;
        if (j.contains("forms"))
            for (const auto& fj : j.at("forms")) {
                const std::string name = fj.at("name").get<std::string>();
                const std::string chart_name = fj.at("chart").get<std::string>();
                auto it = charts.find(chart_name);
                if (it == charts.end())
                    throw ConfigError("form '" + name + "' references unknown chart '" +
                                      chart_name + "'");
                const int degree = fj.at("degree").get<int>();
                if (degree < 0 || degree > it->second.dim)
                    throw ConfigError("form '" + name + "': degree outside 0..dim");
                forms.emplace(name, vform_from_exprs(it->second, degree,
                                                     fj.at("components").get<std::string>()));
            }

        if (j.contains("groupoid")) {
            const auto& gj = j.at("groupoid");
            std::map<std::string, double> params;
            for (const auto& [k, v] : gj.items())
                if (v.is_number()) params[k] = v.get<double>();
            Rng rng(sc.seed);
            sc.params.groupoid =
                build_zoo_groupoid(gj.at("zoo").get<std::string>(), params, rng);
        }

        if (j.contains("bundle")) {
            const auto& bj = j.at("bundle");
            const int base_dim = bj.at("base_dim").get<int>();
            const int group_dim = bj.value("group_dim", 1);
            const std::string conn = bj.at("connection").get<std::string>();
            // validate eagerly so a bad declaration is a config error
            auto b = make_trivial_bundle(
                Chart::cube(base_dim, "R" + std::to_string(base_dim)), group_dim);
            try {
                connection_from_exprs(b, conn);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("bundle connection: ") + e.what());
            }
            sc.params.numbers["bundle_base_dim"] = base_dim;
            sc.params.numbers["bundle_group_dim"] = group_dim;
            sc.params.strings["connection"] = conn;
        }
        if (auto it = forms.find("K"); it != forms.end()) sc.params.k = it->second;
        if (auto it = forms.find("K_M"); it != forms.end()) sc.params.k_m = it->second;

        if (!j.contains("suites") || j.at("suites").empty())
            throw ConfigError("scenario lists no suites");
        for (const auto& s : j.at("suites")) {
            const std::string name = s.get<std::string>();
            if (!find_suite(name)) throw ConfigError("unknown suite '" + name + "'");
            sc.suites.push_back(name);
        }
        return sc;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

Report run_scenario(const Scenario& sc, const RunOptions& opts)
{
    std::vector<std::string> names = sc.suites;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    std::vector<SuiteResult> results(names.size());
    std::vector<std::string> errors(names.size());
    std::mutex mu;
    size_t next = 0;

    auto work = [&]() {
        while (true) {
            size_t idx;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= names.size()) return;
                idx = next++;
            }
            SuiteRequest req;
            req.seed = opts.seed.value_or(sc.seed);
            if (auto it = sc.samples.find(names[idx]); it != sc.samples.end())
                req.samples = it->second;
            if (opts.tolerance) req.tolerance = *opts.tolerance;
            else if (auto it = sc.tolerances.find(names[idx]); it != sc.tolerances.end())
                req.tolerance = it->second;
            req.params = sc.params;
            try {
                results[idx] = run_suite(names[idx], req);
            } catch (const std::exception& e) {
                errors[idx] = e.what();
            }
        }
    };

    const int nw = worker_count(opts.threads, static_cast<int>(names.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < nw - 1; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    for (size_t i = 0; i < names.size(); ++i)
        if (!errors[i].empty())
            throw ConfigError("suite '" + names[i] + "' failed to run: " + errors[i]);

    Report rep;
    rep.suites = std::move(results);
    rep.pass = true;
    for (const auto& r : rep.suites) rep.pass = rep.pass && r.pass;
    if (!opts.with_timing)
        for (auto& r : rep.suites) r.millis = 0;
    return rep;
}

std::string report_to_json(const Report& report, bool with_timing)
{
    ordered_json j;
    j["pass"] = report.pass;
    j["suites"] = ordered_json::array();
    for (const auto& r : report.suites) {
        ordered_json s;
        s["suite"] = r.suite;
        s["samples"] = r.samples;
        s["max_residual"] = r.max_residual;
        s["tolerance"] = r.tolerance;
        s["pass"] = r.pass;
        s["millis"] = with_timing ? r.millis : 0;
        j["suites"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

void print_report(const Report& report, std::ostream& os)
{
    for (const auto& r : report.suites) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-28s %-4s  samples=%-6ld residual=%-12.3e tol=%-9.1e %ld ms",
                      r.suite.c_str(), r.pass ? "ok" : "FAIL", r.samples, r.max_residual,
                      r.tolerance, r.millis);
        os << buf << "\n";
    }
    os << (report.pass ? "all suites passed" : "SUITE FAILURES") << "\n";
}

std::vector<std::pair<std::string, std::string>> zoo_catalog()
{
    return {
        {"pair", "pair groupoid of R^n (params: base_dim)"},
        {"abelian-group", "additive group R^n (params: group_dim)"},
        {"aff1", "affine group of the line, chart (a, b) with a > 0"},
        {"vb", "vector bundle R^base_dim x R^fiber_dim with fiberwise addition"},
        {"semidirect-pair", "pair groupoid of R acting on a line bundle by (1+x^2)/(1+y^2)"},
        {"gauge-r", "gauge groupoid of the trivial R-bundle over R^base_dim"},
    };
}

Groupoid build_zoo_groupoid(const std::string& zoo, const std::map<std::string, double>& params,
                            Rng& rng)
{
    auto get = [&](const std::string& key, int fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : static_cast<int>(it->second);
    };
    if (zoo == "pair")
        return make_pair_groupoid(Chart::cube(get("base_dim", 1), "R" + std::to_string(get("base_dim", 1))));
    if (zoo == "abelian-group") return make_abelian_group_groupoid(get("group_dim", 2));
    if (zoo == "aff1") return make_aff1_groupoid();
    if (zoo == "vb")
        return make_vb_groupoid(Chart::cube(get("base_dim", 2), "R" + std::to_string(get("base_dim", 2))),
                                get("fiber_dim", 1));
    if (zoo == "semidirect-pair") {
        auto action = map_from_exprs(Chart::cube(3, "GxE"), Chart::cube(1, "E"),
                                     "x3*(1 + x1^2)/(1 + x2^2)");
        return make_semidirect(make_pair_groupoid(Chart::cube(1, "R")), action, 1, rng);
    }
    if (zoo == "gauge-r") {
        auto b = make_trivial_bundle(
            Chart::cube(get("base_dim", 2), "R" + std::to_string(get("base_dim", 2))), 1);
        return make_gauge_groupoid(b).gpd;
    }
    throw ConfigError("unknown zoo groupoid '" + zoo + "'");
}

}  // namespace fnbrack
