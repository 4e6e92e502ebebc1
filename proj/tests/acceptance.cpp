// Acceptance harness: runs every verification criterion at its pinned
// tolerance and prints one line per criterion. Exit code 0 iff all
// criteria pass.

#include <chrono>
#include <cstdio>
#include <string>

#include "fnbrack/scenario.hpp"

using namespace fnbrack;

namespace {

int failures = 0;
long total_ms = 0;

void line(int idx, bool pass, const std::string& what, const std::string& detail)
{
    std::printf("[%2d] %s  %-52s %s\n", idx, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    if (!pass) ++failures;
}

void criterion_suite(int idx, const std::string& what, const std::string& suite, long samples,
                     long budget_ms = -1)
{
    SuiteRequest req;
    req.samples = samples;
    SuiteResult r = run_suite(suite, req);
    total_ms += r.millis;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "residual=%.3e tol=%.1e samples=%ld (%ld ms)",
                  r.max_residual, r.tolerance, r.samples, r.millis);
    bool pass = r.pass;
    if (budget_ms > 0 && r.millis >= budget_ms) pass = false;
    line(idx, pass, what, detail);
}

}  // namespace

int main()
{
    // 1. bracket defining property, with a 10 s runtime budget
    criterion_suite(1, "defining property L_[K,L] = [L_K, L_L]", "fn-defining-property", 100,
                    10000);
    // 2. degree-0 reduction to the Lie bracket
    criterion_suite(2, "vector-field reduction of the bracket", "vector-field-reduction", 50);
    // 3. half bracket = Nijenhuis tensor; constant J integrable to 1e-12
    criterion_suite(3, "Nijenhuis tensor identity", "nijenhuis-identity", 50);
    // 4. half bracket = curvature + co-curvature on three projection families
    criterion_suite(4, "projection curvature splitting", "projection-curvature", 50);
    // 5. brackets of multiplicative forms stay multiplicative
    criterion_suite(5, "multiplicative closure under the bracket", "mult-bracket-closure", 50);
    // 6. connection <-> projection round-trips, identity rejected
    criterion_suite(6, "connection correspondence round-trips", "connection-correspondence", 50);
    // 7. curvature identity through the vertical isomorphism
    criterion_suite(7, "gauge curvature identity", "cohomological-triviality", 30);
    // 8. nerve: simplicial identities, delta^2, tower relations, sensitivity
    criterion_suite(8, "nerve and derivation-tower relations", "nerve-bss", 8);
    // 9. naturality of the bracket under related maps
    criterion_suite(9, "naturality and product-lift compatibility", "naturality-relatedness", 30);

    // 10. determinism: byte-identical reports for a fixed (scenario, seed),
    //     and the whole run stays inside the time budget.
    {
        const auto t0 = std::chrono::steady_clock::now();
        Scenario sc = load_scenario(std::string(FNBRACK_SCENARIO_DIR) + "/all-suites.json");
        RunOptions opts;
        opts.with_timing = false;
        const std::string a = report_to_json(run_scenario(sc, opts), false);
        const std::string b = report_to_json(run_scenario(sc, opts), false);
        const long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        total_ms += ms;
        const bool identical = a == b;
        const bool in_budget = total_ms < 60000;
        char detail[160];
        std::snprintf(detail, sizeof(detail), "%s; total %ld ms %s 60000 ms",
                      identical ? "reports byte-identical" : "reports DIFFER", total_ms,
                      in_budget ? "<" : ">=");
        line(10, identical && in_budget, "deterministic reports and runtime budget", detail);
    }

    std::printf("RESULT: %d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
