// Acceptance suite: one line per criterion, exit 0 iff everything passes.
// The same checks back the CLI `verify` command; the seed here is pinned.

#include <cstdio>
#include <string>

#include "gmtkit/verify.hpp"

int main() {
    const std::uint64_t seed = 7;
    const auto names = gmtkit::verify::suite_names();
    bool all_pass = true;
    int criterion = 0;
    for (const auto& name : names) {
        const auto report = gmtkit::verify::run_suite(name, seed);
        ++criterion;
        std::printf("[%s] criterion %2d %-22s (%.1fs)\n", report.pass ? "PASS" : "FAIL", criterion,
                    name.c_str(), report.seconds);
        for (const auto& check : report.checks) {
            std::printf("       %s %s\n", check.pass ? "ok  " : "FAIL", check.name.c_str());
            if (!check.pass) std::printf("            %s\n", check.details.dump().c_str());
        }
        all_pass = all_pass && report.pass;
    }
    std::printf("%s\n", all_pass ? "ALL ACCEPTANCE CRITERIA PASS" : "ACCEPTANCE FAILURES PRESENT");
    return all_pass ? 0 : 1;
}
