#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "transferlab/hypothesis.hpp"
#include "transferlab/projection.hpp"

namespace transferlab {

// Joint distribution on a finite support: marginal masses and
// regression values eta(x) = E[Y | x].
struct DiscreteJoint {
    std::vector<SupportPoint> support;
    std::vector<double> mass;
    std::vector<double> eta;

    // Validates: equal lengths, masses >= 0 summing to 1 within 1e-12,
    // eta in [0, 1]. Coordinates default to the point index.
    static DiscreteJoint make(std::vector<double> mass, std::vector<double> eta, std::vector<double> coordinates = {});

    std::size_t size() const { return mass.size(); }
    void validate() const;
};

// One component of a 1-D mixture density on [lo, hi] with total mass `weight`.
// The density is proportional to (t - lo)^(exponent - 1), or to
// (hi - t)^(exponent - 1) when concentrate_at_hi is set; exponent 1 is uniform.
struct DensityPiece {
    double lo = 0.0;
    double hi = 1.0;
    double weight = 1.0;
    double exponent = 1.0;
    bool concentrate_at_hi = false;
};

class ContinuousMarginal {
public:
    ContinuousMarginal() = default;
    explicit ContinuousMarginal(std::vector<DensityPiece> pieces);

    static ContinuousMarginal uniform(double lo, double hi);

    double cdf(double t) const;
    // Mass of (a, b]; computed relative to each piece's anchor so that small
    // intervals near a density singularity keep full relative precision.
    double interval_mass(double a, double b) const;
    double density(double t) const;
    double sample(class Rng& rng) const;
    double lower() const;
    double upper() const;
    const std::vector<DensityPiece>& pieces() const { return pieces_; }

private:
    std::vector<DensityPiece> pieces_;
};

// Noiseless threshold joint: X ~ marginal, Y = bayes(X).
struct ThresholdJoint {
    ContinuousMarginal marginal;
    Threshold bayes;
};

using Distribution = std::variant<DiscreteJoint, ThresholdJoint>;

// Exponents and constants a pair is known to satisfy by construction.
struct Certified {
    std::optional<double> rho, C_rho, gamma, C_gamma, beta_P, beta_Q, c_P, c_Q;
};

struct TransferPair {
    Distribution p;
    Distribution q;
    std::optional<Certified> certified;
    std::string name;
};

LabeledSample sample_labeled(const Distribution& d, std::size_t n, std::uint64_t seed);
UnlabeledSample sample_unlabeled(const Distribution& d, std::size_t n, std::uint64_t seed);

double true_risk(const Distribution& d, const Hypothesis& h);
// Marginal mass of {x : h(x) != h2(x)}.
double disagreement_mass(const Distribution& d, const Hypothesis& h, const Hypothesis& h2);
// Exhaustive minimizer over an enumerable class (lowest index on ties); for a
// threshold joint and the threshold class the infimum is attained in closed form.
Hypothesis best_in_class(const Distribution& d, const HypothesisClass& cls);
double excess_risk(const Distribution& d, const Hypothesis& h, const HypothesisClass& cls);

// Population tally over the cells of a projection: neg/pos hold the mass
// labelled 0/1, normalizer 1. Finite projections need a discrete joint,
// threshold projections a threshold joint.
CellTally population_tally(const Distribution& d, const ProjectedClass& pc);

}  // namespace transferlab
