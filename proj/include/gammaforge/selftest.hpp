#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gammaforge {

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick invariant suites over small fixtures: group axioms, word lengths,
/// shift round-trips, immersion soundness, packing/cover certification and
/// decomposition closed-loop verification.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 1);

}  // namespace gammaforge
