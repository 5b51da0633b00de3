#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "transferlab/hypothesis.hpp"
#include "transferlab/transfer_erm.hpp"

namespace transferlab {

// Finite family of unnormalized densities with respect to P_X over a discrete
// support; member k gives weight members[k][i] to support point i.
struct DensityFamily {
    std::vector<std::vector<double>> members;
    std::vector<double> sup_norm;
    std::size_t d_p = 0;

    // Rejects an empty family, ragged or negative weights and non-finite
    // values. d_p defaults to ceil(log2 |family|).
    static DensityFamily make(std::vector<std::vector<double>> members, std::optional<std::size_t> d_p = std::nullopt);

    std::size_t size() const { return members.size(); }
    // Weights of member k at support indices xs.
    std::vector<double> at_points(std::size_t k, std::span<const double> xs) const;
};

std::size_t default_pseudo_dim(std::size_t family_size);

// f is indexed by support point; sample x values are support indices.
double weighted_risk(const LabeledSample& s, std::span<const double> f, const Hypothesis& h);
// weighted_risk(h) minus the weighted risk of the weighted minimizer over cls.
double weighted_excess(const LabeledSample& s, std::span<const double> f, const Hypothesis& h,
                       const HypothesisClass& cls);
// (1/n) sum 1[h(x) != h2(x)] f(x)^2
double weighted_disagreement_f2(const LabeledSample& s, std::span<const double> f, const Hypothesis& h,
                                const Hypothesis& h2);

// Largest U disagreement with the weighted S_P minimizer among members whose
// weighted excess passes c sqrt(P_{S,f^2}(h != h_f) A'') + c |f|_inf A''.
double delta_hat_weighted(const LabeledSample& s_p, std::span<const double> f, std::span<const double> u_q,
                          const HypothesisClass& cls, const ConfidenceParams& cp, std::size_t d_p);

struct ReweightResult {
    Hypothesis h;
    std::size_t chosen = 0;
    std::vector<double> delta_hats;  // per family member
};

// Pick the member with the smallest weighted delta-hat (first on ties), then
// minimize the S_Q risk subject to that member's weighted constraint.
ReweightResult algorithm3(const LabeledSample& s_p, const LabeledSample& s_q, std::span<const double> u_q,
                          const DensityFamily& family, const HypothesisClass& cls, const ConfidenceParams& cp);

struct SourceChoice {
    Hypothesis h;
    std::size_t chosen = 0;
    std::vector<double> delta_hats;  // per source
};

// Pick the source with the smallest delta-hat(S_i, U_Q), then minimize the
// S_Q risk subject to the A_{n_i} bound on that source; every confidence
// width uses delta / |sources|.
SourceChoice algorithm4(std::span<const LabeledSample> sources, const LabeledSample& s_q, std::span<const double> u_q,
                        const HypothesisClass& cls, const ConfidenceParams& cp);

}  // namespace transferlab
