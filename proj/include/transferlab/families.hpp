#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "transferlab/distribution.hpp"
#include "transferlab/hypothesis.hpp"

namespace transferlab {

using SignVector = std::vector<int>;  // entries in {-1, +1}

enum class FamilyForm { two_level, two_block };

struct FamilyParams {
    std::size_t d_H = 0;
    double rho = 1.0;
    double beta_P = 0.0;
    double beta_Q = 0.0;
    double epsilon = 0.0;  // two_level
    double eps1 = 0.0;     // two_block
    double eps2 = 0.0;
    double tau = 0.0;
};

// Pairs (P_sigma, Q_sigma) over the support x_0..x_d sharing their marginals.
// Sign +1 at coordinate i puts eta above 1/2 at x_i, so the Bayes label is 1;
// x_0 always carries eta = 1.
struct SigmaFamily {
    FamilyForm form = FamilyForm::two_level;
    FamilyParams params;
    std::size_t d = 0;  // number of sign coordinates; support size d + 1
    std::vector<SignVector> sigmas;
    std::vector<TransferPair> pairs;

    std::size_t size() const { return sigmas.size(); }
    // Every labeling of x_0..x_d with x_0 labelled 1; d_H recorded as configured.
    HypothesisClass hypothesis_class() const;
    // Bayes classifier of member i.
    Labeling bayes(std::size_t i) const;
};

Labeling sign_labeling(const SignVector& sigma);

// Largest d handled with the full cube {-1, +1}^d; larger d uses vg_packing.
inline constexpr std::size_t kFullCubeMaxD = 12;

// Two-level construction: d = d_H - 1 >= 8, epsilon in (0, 1/2], rho >= 1,
// beta in [0, 1]. Members are the full cube for d <= 12, else a packing drawn
// with `seed`, unless `sigmas` is supplied.
SigmaFamily build_theorem3_family(std::size_t d_H, double rho, double beta_P, double beta_Q, double epsilon,
                                  std::uint64_t seed = 0, std::vector<SignVector> sigmas = {});

// Two-block construction over I_1 = {1..d/2}, I_2 = {d/2+1..d} with d = d_H - 1
// rounded down to even. tau <= 0 selects max(1/2, (1/2)^(1/gamma)), gamma = rho*beta_P.
SigmaFamily build_theorem4_family(std::size_t d_H, double rho, double beta_P, double beta_Q, double eps1,
                                  double eps2, double tau = 0.0, std::uint64_t seed = 0,
                                  std::vector<SignVector> sigmas = {});

double default_tau(double gamma);

// Greedy random packing: sigma_0 = all ones, then seeded random candidates
// kept when at Hamming distance >= ceil(d/8) from every kept vector, until
// M + 1 vectors with M = ceil(2^(d/8)).
std::vector<SignVector> vg_packing(std::size_t d, std::uint64_t seed);

std::size_t hamming(const SignVector& a, const SignVector& b);

double kl_bernoulli(double p, double q);
// chi^2(p | q) with p = 1/2 + z*eps/2, q = 1/2 - z*eps/2.
double chi2_bound(double epsilon, int z);
// Constant c_0 with kl <= c_0 * eps^2 for eps <= 1/2.
double kl_chi2_constant();

// KL(P_i^{n_P} x Q_i^{n_Q} || P_j^{n_P} x Q_j^{n_Q}); may be +inf for noiseless members.
double kl_product(const SigmaFamily& family, std::size_t i, std::size_t j, double n_P, double n_Q);

// min{(d_H/n_P)^{1/((2-beta_P) rho)}, (d_H/n_Q)^{1/(2-beta_Q)}}, with d_H/0 = inf.
double minimax_epsilon(double n_P, double n_Q, std::size_t d_H, double rho, double beta_P, double beta_Q);
// Tuned family parameter min{1/2, c1 * minimax_epsilon}.
double lower_bound_epsilon(double n_P, double n_Q, std::size_t d_H, double rho, double beta_P, double beta_Q,
                           double c1);

struct ExampleParams {
    double gamma = 2.0;          // examples 3 and 4
    std::size_t ring_points = 8;  // example 1, points per ring (even, >= 4)
};

// 1: two concentric rings of points at the same angles, P on the inner ring,
//    Q on the outer, labels from a homogeneous halfplane (discrete joint).
// 2: P = U[0,2], Q = U[0,1], h* = 1/2.
// 3: Q = U[-1,1]; P half uniform on [-1,0], half with density ~ t^(gamma-1) on (0,1]; h* = 0; gamma >= 1.
// 4: P density ~ |t|^(gamma-1) on [-1,1], Q = U[-1,1], h* = 0; 0 < gamma < 1.
TransferPair example_scenario(int id, const ExampleParams& params = {});
// The class each example is posed over: halfplane labelings for 1, positive-above thresholds otherwise.
HypothesisClass example_class(int id, const ExampleParams& params = {});

// Three-point discrete pair, noiseless on both sides, where the P-optimal
// labeling mislabels a Q point of mass `gap`: E_Q(h*_P) = gap, gap in (0, 0.6).
// Posed over every labeling of the three points.
TransferPair rcs_violating_pair(double gap = 0.15);

}  // namespace transferlab
