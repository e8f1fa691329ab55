#include "abcopt/scenarios.hpp"

#include "abcopt/errors.hpp"

namespace abcopt {

ScenarioSpec scenario(const std::string& name) {
    if (name == "I")
        return {"I", Gaussian{0.0, 1.0}, Gaussian{0.0, 5.0}, {-60.0, 60.0}};
    if (name == "II")
        return {"II", GaussianMixture{{{0.5, -2.0, 1.0}, {0.5, 2.0, 1.0}}},
                Gaussian{0.0, 10.0}, {-120.0, 120.0}};
    if (name == "III")
        return {"III", ChiSquared{3}, Uniform{0.0, 30.0}, {0.0, 30.0}};
    throw ConfigError("unknown scenario: " + name + " (expected I, II or III)");
}

std::vector<ScenarioSpec> all_scenarios() {
    return {scenario("I"), scenario("II"), scenario("III")};
}

} // namespace abcopt
