#pragma once

// Named property suites: each one draws its own deterministic
// sub-stream from the run seed, exercises one family of identities at
// desk scale, and reports the worst residual against a pinned
// tolerance. The scenario runner, the CLI and the acceptance harness
// all execute the same implementations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fnbrack/groupoid.hpp"

namespace fnbrack {

struct SuiteResult {
    std::string suite;
    long samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    long millis = 0;
};

// Free-form parameters a scenario may hand to a suite (e.g. the
// perturbation size for the tower-sensitivity experiment) plus
// optional declared objects for the generic multiplicativity suite.
struct SuiteParams {
    std::map<std::string, double> numbers;
    std::map<std::string, std::string> strings;
    std::optional<Groupoid> groupoid;
    std::optional<VForm> k;
    std::optional<VForm> k_m;

    double number_or(const std::string& key, double fallback) const
    {
        auto it = numbers.find(key);
        return it == numbers.end() ? fallback : it->second;
    }
};

struct SuiteRequest {
    std::uint64_t seed = 20240808;
    long samples = -1;       // -1: use the suite default
    double tolerance = -1.0; // < 0: use the suite default
    SuiteParams params;
};

using SuiteFn = SuiteResult (*)(const SuiteRequest&);

struct SuiteInfo {
    std::string name;
    std::string description;
    double default_tolerance = 0.0;
    long default_samples = 0;
    SuiteFn fn = nullptr;
};

const std::vector<SuiteInfo>& suite_registry();  // sorted by name
const SuiteInfo* find_suite(const std::string& name);
SuiteResult run_suite(const std::string& name, const SuiteRequest& req);

}  // namespace fnbrack
