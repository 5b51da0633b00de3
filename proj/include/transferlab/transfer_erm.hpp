#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "transferlab/hypothesis.hpp"
#include "transferlab/projection.hpp"

namespace transferlab {

// c is the universal constant of the uniform Bernstein bound; one value is
// shared by every constraint in the suite.
struct ConfidenceParams {
    double c = 1.0;
    double delta = 0.05;

    void validate() const;
};

// (d/n) log(max{n, d}/d) + (1/n) log(1/delta), natural log. n = 0 gives +inf;
// d = 0 drops the first term.
double a_n(std::size_t n, std::size_t d_H, double delta);
// Same with log(2 n^2 / delta) in the second term.
double a_n_prime(std::size_t n, std::size_t d_H, double delta);
// a_n with d_H + d_p in place of d_H.
double a_n_dprime(std::size_t n, std::size_t d_H, std::size_t d_p, double delta);

// excess <= c sqrt(dis * A) + c * scale * A. An infinite A makes it vacuous.
bool within_bound(double excess, double dis, double A, double c, double scale = 1.0);

// Empirical quantities of one labeled sample on a projection: per-member
// risk, the lowest-index minimizer, and each member's disagreement with it on
// the sample's points. The weighted form uses weight w_i for risks and
// w_i^2 for disagreements.
struct SampleFit {
    std::vector<double> risk;
    std::size_t erm = 0;
    std::vector<double> dis;
};

SampleFit fit_sample(const ProjectedClass& pc, const LabeledSample& s);
SampleFit fit_sample_weighted(const ProjectedClass& pc, const LabeledSample& s, std::span<const double> weights);

// Members whose empirical excess satisfies within_bound.
std::vector<char> feasible_members(const SampleFit& fit, double A, double c, double scale = 1.0);
// Lowest index minimizing values over members with feasible[j] set.
std::size_t constrained_argmin(std::span<const double> values, const std::vector<char>& feasible);

// Threshold classes are projected onto the points of both samples.
// Minimize the S_P risk over members whose S_Q excess passes the A_{n_Q}
// bound; ties to the lowest index.
Hypothesis algorithm1(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                      const ConfidenceParams& cp);
// Roles of the samples swapped.
Hypothesis algorithm1_prime(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                            const ConfidenceParams& cp);
// The S_P minimizer if it passes algorithm1's constraint, else the S_Q minimizer.
Hypothesis selector_prop6(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                          const ConfidenceParams& cp);

}  // namespace transferlab
