// One line per acceptance criterion, in order. Exit status is nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <exception>

#include "svev/verify.hpp"

int main() {
    const svev::SuiteConfig cfg;
    int failed = 0;
    int criterion = 0;
    for (const auto& name : svev::suite_names()) {
        ++criterion;
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = false;
        std::string detail;
        try {
            const auto report = svev::run_suite(name, cfg);
            pass = report.pass;
            int bad = 0;
            for (const auto& e : report.entries)
                if (!e.pass) {
                    if (bad++ < 3) detail += " [" + e.test + " " + e.family + " n=" + std::to_string(e.n) + "]";
                }
            detail = std::to_string(report.entries.size()) + " checks" + (bad ? ", failing:" + detail : "");
        } catch (const std::exception& ex) {
            detail = std::string("error: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %d %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        failed += !pass;
    }
    return failed ? 1 : 0;
}
