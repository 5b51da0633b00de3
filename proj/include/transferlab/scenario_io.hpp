#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transferlab/distribution.hpp"
#include "transferlab/hypothesis.hpp"

namespace transferlab {

using Json = nlohmann::json;

// A transfer pair as stored on disk, plus what the procedures need alongside it.
struct Scenario {
    TransferPair pair;
    std::optional<HypothesisClass> cls;
    // Density family members as per-point weights over a discrete support.
    std::vector<std::vector<double>> densities;
    std::optional<std::size_t> d_p;
};

// Discrete form:
//   {"support": [coordinates], "mass_p", "eta_p", "mass_q", "eta_q", "certified": {...}}
// Threshold form:
//   {"kind": "threshold", "p_density": {"pieces": [...]}, "q_density": {...},
//    "h_star": t, "orientation": "positive_above" | "positive_below", "certified": {...}}
// Optional keys: "name", "class", "densities", "d_p". Unknown keys are rejected.
Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// The explicit class if present; otherwise every labeling of a discrete
// support (at most 24 points) or the threshold class.
HypothesisClass scenario_class(const Scenario& s);

Json certified_to_json(const Certified& c);
Certified certified_from_json(const Json& j);
Json hypothesis_to_json(const Hypothesis& h);

// Doubles with +-inf written as the strings "inf" / "-inf".
Json number_to_json(double v);
double number_from_json(const Json& j);

}  // namespace transferlab
