#pragma once

#include <string>
#include <vector>

#include "abcopt/density.hpp"

namespace abcopt {

/// Benchmark posterior/prior pairs:
///   I   p = N(0,1),                   prior = N(0,5)
///   II  p = 0.5 N(-2,1) + 0.5 N(2,1), prior = N(0,10)
///   III p = chi^2(3),                 prior = U(0,30)
struct ScenarioSpec {
    std::string name;
    DensitySpec posterior;
    DensitySpec prior;
    Interval functional_domain;
};

ScenarioSpec scenario(const std::string& name);
std::vector<ScenarioSpec> all_scenarios();

} // namespace abcopt
