#include "doctest.h"

#include <nucalc/errors.hpp>
#include <nucalc/harness.hpp>
#include <nucalc/version.hpp>

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace nucalc;

namespace {

std::string temp_report_path(const char* tag) {
    std::ostringstream os;
    os << "harness_test_report_" << tag << ".json";
    return os.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("sign-change search finds a bracketed root") {
    const RootSearch r = find_sign_change([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r.bracketed);
    CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sign-change search falls back to a polished minimum on tangential zeros") {
    const RootSearch r = find_sign_change([](double x) { return (x - 1.0) * (x - 1.0); }, 0.0, 2.0);
    CHECK_FALSE(r.bracketed);
    CHECK(r.x == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("each check family runs and passes at a smoke size") {
    for (auto* fn : {&check_algebraic_rules, &check_mean_value, &check_integral_identities,
                     &check_mlf_theorems}) {
        const CheckReport rep = (*fn)(11, 2);
        CHECK(rep.n_failed == 0);
        CHECK(rep.n_passed == static_cast<int>(rep.cases.size()));
        for (const auto& c : rep.cases) {
            CHECK(c.tolerance > 0.0);
            CHECK(c.residual >= 0.0);
            CHECK_FALSE(c.inputs.empty());
        }
    }
}

TEST_CASE("check families refuse an empty case count") {
    CHECK_THROWS_AS(check_algebraic_rules(1, 0), ValidationError);
    CHECK_THROWS_AS(run_suite(1, 0, temp_report_path("zero")), ValidationError);
}

TEST_CASE("suite run covers every identity family and is internally consistent") {
    const std::string path = temp_report_path("consistency");
    const CheckReport rep = run_suite(42, 3, path);
    CHECK(rep.seed == 42);
    CHECK(rep.n_passed + rep.n_failed == static_cast<int>(rep.cases.size()));
    CHECK(rep.all_passed());
    // 27 identities x 3 cases
    CHECK(rep.cases.size() == 81);
    std::remove(path.c_str());
}

TEST_CASE("fixed anchor cases sit at the documented inputs") {
    const CheckReport rep = check_mean_value(42, 1);
    bool found = false;
    for (const auto& c : rep.cases) {
        if (c.theorem_id != "T-Rolle" || c.case_index != 0) continue;
        found = true;
        for (const auto& [key, value] : c.inputs) {
            if (key == "x0") {
                CHECK(std::stod(value) == doctest::Approx(1.5).epsilon(1e-6));
            }
        }
    }
    CHECK(found);
}

TEST_CASE("report text is deterministic for a fixed seed") {
    const std::string p1 = temp_report_path("det1");
    const std::string p2 = temp_report_path("det2");
    const CheckReport r1 = run_suite(7, 2, p1);
    const CheckReport r2 = run_suite(7, 2, p2);
    CHECK(render_report(r1, false) == render_report(r2, false));
    // different seeds draw different inputs
    const CheckReport r3 = run_suite(8, 2, temp_report_path("det3"));
    CHECK(render_report(r1, false) != render_report(r3, false));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(temp_report_path("det3").c_str());
}

TEST_CASE("report file is valid structured text with the fixed schema") {
    const std::string path = temp_report_path("schema");
    const CheckReport rep = run_suite(5, 2, path);
    const nlohmann::json doc = nlohmann::json::parse(slurp(path));
    CHECK(doc.at("suite_version").get<std::string>() == kSuiteVersion);
    CHECK(doc.at("seed").get<std::uint64_t>() == 5);
    CHECK(doc.contains("generated_at"));
    CHECK(doc.at("totals").at("cases").get<int>() == static_cast<int>(rep.cases.size()));
    CHECK(doc.at("totals").at("passed").get<int>() == rep.n_passed);
    CHECK(doc.at("totals").at("failed").get<int>() == rep.n_failed);
    const auto& cases = doc.at("cases");
    REQUIRE(cases.is_array());
    REQUIRE(cases.size() == rep.cases.size());
    for (const auto& c : cases) {
        CHECK(c.contains("theorem_id"));
        CHECK(c.contains("seed"));
        CHECK(c.contains("case_index"));
        CHECK(c.contains("inputs"));
        CHECK(c.contains("residual"));
        CHECK(c.contains("tolerance"));
        CHECK(c.contains("passed"));
    }
    // cases arrive sorted by (theorem_id, case_index) so reports diff cleanly
    for (std::size_t i = 1; i < cases.size(); ++i) {
        const auto& a = cases[i - 1];
        const auto& b = cases[i];
        const auto ka = std::pair<std::string, int>(a.at("theorem_id"), a.at("case_index"));
        const auto kb = std::pair<std::string, int>(b.at("theorem_id"), b.at("case_index"));
        CHECK(ka <= kb);
    }
    std::remove(path.c_str());
}

TEST_CASE("unwritable report path raises an I/O error") {
    CHECK_THROWS_AS(run_suite(1, 1, "/nonexistent_directory_for_sure/report.json"), IoError);
}

TEST_CASE("report add clamps non-finite residuals to failures") {
    CheckReport rep;
    CheckCase c;
    c.theorem_id = "X";
    c.residual = std::nan("");
    c.tolerance = 1e-6;
    rep.add(c);
    CHECK(rep.n_failed == 1);
    CHECK(std::isfinite(rep.cases.front().residual));
    CHECK_FALSE(rep.cases.front().passed);
}

TEST_CASE("merge accumulates totals") {
    CheckReport a = check_algebraic_rules(3, 1);
    const CheckReport b = check_mean_value(3, 1);
    const std::size_t na = a.cases.size(), nb = b.cases.size();
    const int pa = a.n_passed, pb = b.n_passed;
    a.merge(b);
    CHECK(a.cases.size() == na + nb);
    CHECK(a.n_passed == pa + pb);
}
