#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "transferlab/distribution.hpp"
#include "transferlab/hypothesis.hpp"
#include "transferlab/scenario_io.hpp"
#include "transferlab/transfer_erm.hpp"

namespace transferlab {

enum class CostForm { linear, power };

// Cost of a batch of n draws: u * n, or u * n^a with a in (0, 1].
struct CostSchedule {
    CostForm form = CostForm::linear;
    double u = 1.0;
    double a = 1.0;

    static CostSchedule linear(double u) { return {CostForm::linear, u, 1.0}; }
    static CostSchedule power(double u, double a) { return {CostForm::power, u, a}; }

    double operator()(double n) const;
    void validate() const;
};

Json schedule_to_json(const CostSchedule& s);
CostSchedule schedule_from_json(const Json& j);

// Smallest n >= 1 with schedule(n) >= budget.
std::size_t minimal_n_for_cost(const CostSchedule& schedule, double budget);

// Largest disagreement on `u` with the S minimizer among members whose S
// excess passes the A'_{|S|} bound. An empty S leaves every member feasible;
// an empty u gives 0.
double delta_hat(const LabeledSample& s, std::span<const double> u, const HypothesisClass& cls,
                 const ConfidenceParams& cp);

// Which confidence width the step-6 stopping test uses: A_{|S_Q|} as printed,
// or the A' of the delta-hat statistic.
enum class Step6Variant { A, A_prime };

struct SamplingRound {
    std::size_t t = 0;
    std::size_t n_tP = 0, n_tQ = 0;
    double cost_P = 0.0, cost_Q = 0.0;
    double step6_lhs = 0.0;
    double step7_stat = 0.0;    // NaN when step 7 did not run
    std::string decision;       // "continue", "step6" or "step7"
};

struct SamplingTranscript {
    std::vector<SamplingRound> rounds;
    double total_cost = 0.0;
    std::string returned_by;    // "step6" or "step7"
    std::size_t size_P = 0, size_Q = 0;
};

// One JSON object per round, newline separated.
std::string transcript_to_jsonl(const SamplingTranscript& tr);
Json round_to_json(const SamplingRound& r);

// Returns a fresh batch of n labeled draws per call.
using Sampler = std::function<LabeledSample(std::size_t n)>;

// Call k draws from d with seed derive_seed(seed, {k}).
Sampler distribution_sampler(const Distribution& d, std::uint64_t seed);

struct AdaptiveOptions {
    double kappa = 4.0;          // |U_Q| >= kappa ((d/eps) ln(1/eps) + (1/eps) ln(1/delta))
    std::size_t round_cap = 64;
    Step6Variant step6 = Step6Variant::A;
    bool use_source = true;      // false skips the P draws and step 7
};

struct AdaptiveResult {
    Hypothesis h;
    SamplingTranscript transcript;
};

std::size_t required_unlabeled(double eps, double delta, std::size_t d_H, double kappa);

// The doubling procedure: each round buys a P batch and a Q batch of cost at
// least 2^(t-1), then stops at the first passing stopping test. Samples
// accumulate across rounds. Throws std::invalid_argument when U_Q is too
// small and std::runtime_error when round_cap rounds pass without stopping.
// delta overrides cp.delta.
AdaptiveResult algorithm2(double eps, double delta, const CostSchedule& sched_P, const CostSchedule& sched_Q,
                          const Sampler& sampler_P, const Sampler& sampler_Q, std::span<const double> u_q,
                          const HypothesisClass& cls, const ConfidenceParams& cp, const AdaptiveOptions& opt = {});

struct TheoryCosts {
    double n_star_Q = 0.0;
    double n_star_P = 0.0;
    double c_star = 0.0;
};

// n*_Q = d/eps^(2-beta_Q), n*_P = d/eps^((2-beta_P) gamma/beta_P),
// c* = min{c_Q(n*_Q), c_P(n*_P)}.
TheoryCosts theory_costs(double eps, std::size_t d_H, double beta_P, double beta_Q, double gamma,
                         const CostSchedule& sched_P, const CostSchedule& sched_Q);

}  // namespace transferlab
