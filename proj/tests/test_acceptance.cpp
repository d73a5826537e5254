// Acceptance suite: one criterion per check, printed pass/fail, all gated.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "permrat/selfcheck.hpp"

TEST_CASE("acceptance criteria", "[acceptance]") {
    permrat::SelfcheckOptions opt;
    std::vector<permrat::CheckResult> results = permrat::run_acceptance(opt);
    REQUIRE_FALSE(results.empty());
    bool all_pass = true;
    for (const permrat::CheckResult& r : results) {
        const char* st = r.status == permrat::CheckResult::Status::pass ? "PASS"
                         : r.status == permrat::CheckResult::Status::skip ? "SKIP"
                                                                          : "FAIL";
        std::printf("[%s] %-40s (%.2fs) %s\n", st, r.name.c_str(), r.seconds,
                    r.detail.c_str());
        INFO(r.name << ": " << r.detail);
        CHECK(r.status == permrat::CheckResult::Status::pass);
        all_pass = all_pass && r.status == permrat::CheckResult::Status::pass;
    }
    REQUIRE(all_pass);
}
