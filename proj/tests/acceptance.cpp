#include <chrono>
#include <cstdio>

#include "sphereval/suite.hpp"

int main() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto cases = sphereval::run_acceptance();
    bool all = true;
    int i = 0;
    for (const auto& c : cases) {
        ++i;
        std::printf("criterion %2d [%s] %s (worst residual ratio %.3g)%s%s\n", i,
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.residual,
                    c.detail.empty() ? "" : " -- ", c.detail.c_str());
        all = all && c.pass;
    }
    int failed = 0;
    for (const auto& c : cases) failed += c.pass ? 0 : 1;
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%d/%d criteria passed in %.1f s\n", i - failed, i, secs);
    return all ? 0 : 1;
}
