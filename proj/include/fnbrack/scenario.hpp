#pragma once

// Scenario files: a single JSON document declaring a seed, tolerance
// and sample overrides, optional charts / forms / groupoid, free
// parameters, and the list of suites to run. The runner executes
// suites in a worker pool (capped by FNBRACK_THREADS) and assembles a
// deterministic report sorted by suite name.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fnbrack/suites.hpp"

namespace fnbrack {

struct Scenario {
    std::uint64_t seed = 20240808;
    std::map<std::string, double> tolerances;  // per-suite overrides
    std::map<std::string, long> samples;       // per-suite overrides
    SuiteParams params;                        // includes declared groupoid / forms
    std::vector<std::string> suites;
};

// Throws ConfigError on malformed input, unknown suites or unresolved
// references.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

struct Report {
    bool pass = false;
    std::vector<SuiteResult> suites;  // sorted by name
};

struct RunOptions {
    std::optional<std::uint64_t> seed = {};
    std::optional<double> tolerance = {};  // override for every suite
    bool with_timing = true;               // false: write millis as 0
    int threads = 0;                       // 0: FNBRACK_THREADS or hardware
};

Report run_scenario(const Scenario& sc, const RunOptions& opts = {});

std::string report_to_json(const Report& report, bool with_timing);
void print_report(const Report& report, std::ostream& os);

// Names and short descriptions of the built-in groupoid constructions.
std::vector<std::pair<std::string, std::string>> zoo_catalog();

// Build a zoo groupoid from its catalog name and parameters
// (base_dim, fiber_dim, group_dim as applicable).
Groupoid build_zoo_groupoid(const std::string& zoo, const std::map<std::string, double>& params,
                            Rng& rng);

}  // namespace fnbrack
