#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

// Verification harness: randomized, reproducible checks of the calculus
// identities implemented by the library (derivative rules, mean-value
// point existence, integral identities, and the series-operator formulas).
// Each check instantiates an identity with concrete random inputs, measures
// the residual between independently computed sides, and records a verdict.
namespace nucalc {

// One instantiated check.  `inputs` holds rendered expressions and numbers
// in insertion order so that reports serialize deterministically and diff
// cleanly in CI.
struct CheckCase {
    std::string theorem_id;
    std::uint64_t seed = 0;  // per-case stream seed derived from the suite seed
    int case_index = 0;
    std::vector<std::pair<std::string, std::string>> inputs;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;  // maintained as residual <= tolerance by CheckReport::add
};

struct CheckReport {
    std::vector<CheckCase> cases;
    std::uint64_t seed = 0;
    int n_passed = 0;
    int n_failed = 0;

    // Clamps non-finite residuals to a huge sentinel, stamps `passed`,
    // and updates the totals.
    void add(CheckCase c);
    void merge(CheckReport other);
    bool all_passed() const { return n_failed == 0; }
};

// Root location for the mean-value checks: scan `grid_points` interior
// points for a sign change, then bisect the bracket.  When no sign change
// exists (tangential zero), falls back to polishing the grid minimum of |f|;
// `bracketed` reports which path was taken.
struct RootSearch {
    double x = 0.0;
    bool bracketed = false;
};
RootSearch find_sign_change(const std::function<double(double)>& f, double a, double b,
                            int grid_points = 512, int bisection_steps = 60);

// Check families.  Each emits `n_cases` cases per identity it covers; case 0
// of every identity is a fixed anchor with hand-checkable inputs, later cases
// draw random functions and parameters from the per-case stream.
// Failures are recorded in the report, never thrown; a ValidationError is
// thrown only for n_cases < 1.
CheckReport check_algebraic_rules(std::uint64_t seed, int n_cases);
CheckReport check_mean_value(std::uint64_t seed, int n_cases);
CheckReport check_integral_identities(std::uint64_t seed, int n_cases);
CheckReport check_mlf_theorems(std::uint64_t seed, int n_cases);

// JSON text for a report: ordered keys, cases sorted by (theorem_id,
// case_index).  With `with_timestamp` false the output depends only on the
// report contents, which is what the reproducibility tests compare.
std::string render_report(const CheckReport& report, bool with_timestamp = true);

// Runs all four families with the same seed, writes the JSON report to
// out_path (IoError on failure), and returns the merged report.
CheckReport run_suite(std::uint64_t seed, int n_cases, const std::string& out_path);

}  // namespace nucalc
