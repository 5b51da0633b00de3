#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "transferlab/distribution.hpp"
#include "transferlab/hypothesis.hpp"
#include "transferlab/projection.hpp"
#include "transferlab/scenario_io.hpp"

namespace transferlab {

// Excess risks and disagreement masses at or below this are treated as zero;
// it only absorbs summation rounding.
inline constexpr double kExcessZero = 1e-13;

inline constexpr std::size_t kDefaultGridIntervals = 4096;

// Thresholds lo + (hi - lo) k / intervals for k = 0..intervals over the union
// of both supports, plus h*. With refine > 0, h* +- (hi - lo) 2^-k for
// k = 1..refine are added so that the supremum near h* is resolved.
std::vector<double> threshold_grid(const TransferPair& pair, std::size_t intervals = kDefaultGridIntervals,
                                   std::size_t refine = 0);

// Population quantities of every member of a projected class under P and Q.
struct PairView {
    ProjectedClass pc;
    std::vector<double> risk_p, risk_q;
    std::size_t best_p = 0, best_q = 0;  // h*_P and h*_Q, lowest index on ties
    std::vector<double> excess_p, excess_q;
    std::vector<double> dis_p;       // P_X(h != h*_P)
    std::vector<double> dis_q_at_p;  // Q_X(h != h*_P)
    std::vector<double> dis_q;       // Q_X(h != h*_Q)
    std::vector<double> grid;        // thresholds used, empty for discrete pairs

    std::size_t size() const { return pc.size(); }
};

// Threshold pairs are evaluated on `grid` (default threshold_grid(pair)).
PairView make_view(const TransferPair& pair, const HypothesisClass& cls, std::vector<double> grid = {});

struct ExponentReport {
    double value = 0.0;
    double constant = 1.0;
    std::optional<Hypothesis> witness;
    bool degenerate = false;
    std::size_t grid_points = 0;
    double grid_lo = 0.0, grid_hi = 0.0;
};

Json report_to_json(const ExponentReport& r);

// Smallest rho with C * E_P(h) >= E_Q(h)^rho over the enumerated class.
// Members with E_Q = 0, E_Q >= 1 or C * E_P >= 1 never bind; E_P = 0 < E_Q
// gives +inf. An empty maximum gives `floor` (default 0).
ExponentReport rho_min(const PairView& v, double C, std::optional<double> floor = std::nullopt);
ExponentReport rho_min(const TransferPair& pair, const HypothesisClass& cls, double C);
// Same with marginal masses P_X(h != h*_P), Q_X(h != h*_P).
ExponentReport gamma_min(const PairView& v, double C, std::optional<double> floor = std::nullopt);
ExponentReport gamma_min(const TransferPair& pair, const HypothesisClass& cls, double C);
// Same with the clipped target excess max{R_Q(h) - R_Q(h*_P), 0}.
ExponentReport rho_prime_min(const PairView& v, double C, std::optional<double> floor = std::nullopt);
ExponentReport rho_prime_min(const TransferPair& pair, const HypothesisClass& cls, double C);

enum class Side { P, Q };

// Largest beta in [0, 1] with D_X(h != h*) <= c * E(h)^beta. A member with
// zero excess but positive disagreement admits only beta = 0. `degenerate`
// is set when no member has both positive excess and positive disagreement;
// with no constraining member at all the value is then 1.
ExponentReport beta_max(const PairView& v, Side side, double c);
ExponentReport beta_max(const Distribution& d, const HypothesisClass& cls, double c);

// Reports at C = 2^k for k = k_lo..k_hi.
enum class ExponentKind { rho, gamma, rho_prime };
std::vector<ExponentReport> exponent_sweep(const PairView& v, ExponentKind kind, int k_lo = -4, int k_hi = 4);

// sup_h |P_X(h != h*_P) - Q_X(h != h*_P)|
double d_A(const PairView& v);
// sup_h |E_P(h) - E_Q(h)|
double d_Y(const PairView& v);
// Same supremum restricted to E_P(h) <= eps.
double d_Y_localized(const PairView& v, double eps);
double d_A(const TransferPair& pair, const HypothesisClass& cls);
double d_Y(const TransferPair& pair, const HypothesisClass& cls);
double d_Y_localized(const TransferPair& pair, const HypothesisClass& cls, double eps);

struct Violation {
    std::string inequality;  // "transfer", "noise_P" or "noise_Q"
    Hypothesis witness;
    double lhs = 0.0;  // the side that should be larger
    double rhs = 0.0;
};

struct MembershipReport {
    bool member = true;
    std::optional<Violation> violation;  // first violation found
};

// C * E_P >= E_Q^rho, P_X(h != h*_P) <= C * E_P^beta_P and
// Q_X(h != h*_Q) <= C * E_Q^beta_Q for every enumerated h, up to a relative
// tolerance of 1e-9.
MembershipReport verify_membership(const PairView& v, double rho, double beta_P, double beta_Q, double C);
MembershipReport verify_membership(const TransferPair& pair, const HypothesisClass& cls, double rho, double beta_P,
                                   double beta_Q, double C);

struct Prop4Report {
    bool holds = false;
    double gamma = 0.0, C_gamma = 1.0;
    double beta_P = 0.0, c_P = 1.0;
    double rho = 0.0, C_rho = 1.0;  // rho at C_rho = (C_gamma * c_P)^(1/beta_P)
    double bound = 0.0;             // gamma / beta_P
};

// Constants default to the certified ones, else 1.
Prop4Report prop4_check(const PairView& v, const std::optional<Certified>& cert);
Prop4Report prop4_check(const TransferPair& pair, const HypothesisClass& cls);

}  // namespace transferlab
