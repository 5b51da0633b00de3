#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "transferlab/distribution.hpp"
#include "transferlab/hypothesis.hpp"
#include "transferlab/scenario_io.hpp"
#include "transferlab/transfer_erm.hpp"

namespace transferlab {

using Estimator = std::function<Hypothesis(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls)>;

// "erm_p", "erm_q", "algorithm1", "algorithm1_prime" or "selector_prop6".
Estimator make_estimator(const std::string& id, const ConfidenceParams& cp = {});
const std::vector<std::string>& estimator_ids();

struct RateRow {
    std::size_t n_p = 0, n_q = 0;
    std::string estimator;
    std::size_t trials = 0;
    double mean = 0.0, median = 0.0, q10 = 0.0, q90 = 0.0;
    std::uint64_t seed = 0;  // cell seed; trial k draws from derive_seed(seed, {k, 0 or 1})
};

struct RateTable {
    std::vector<RateRow> rows;
};

using RateGrid = std::vector<std::pair<std::size_t, std::size_t>>;

// Seed of the grid cell (n_p, n_q) under a master seed. Cells do not depend
// on the grid they sit in.
std::uint64_t cell_seed(std::uint64_t master, std::size_t n_p, std::size_t n_q);

// For every cell, `trials` independent fits scored by their exact Q excess
// risk. Trials are spread over `jobs` threads (0 = hardware concurrency);
// the table is identical for any job count. Throws std::invalid_argument
// when the pair cannot be evaluated exactly on cls.
RateTable monte_carlo(const TransferPair& pair, const HypothesisClass& cls, const std::string& estimator_id,
                      const Estimator& estimator, const RateGrid& grid, std::size_t trials, std::uint64_t seed,
                      std::size_t jobs = 0);

// Candidate pairs for one grid cell; each trial draws one uniformly with
// derive_seed(cell seed, {trial, 2}).
using CellPairs = std::function<std::vector<TransferPair>(std::size_t n_p, std::size_t n_q)>;

RateTable monte_carlo(const CellPairs& cell_pairs, const HypothesisClass& cls, const std::string& estimator_id,
                      const Estimator& estimator, const RateGrid& grid, std::size_t trials, std::uint64_t seed,
                      std::size_t jobs = 0);

// Members of the two-level family whose epsilon is tuned to the cell,
// lower_bound_epsilon(n_p, n_q, ..., c1). A minimax rate only shows up when
// the instance hardens with the sample size, so rate checks use this.
CellPairs tuned_theorem3_pairs(std::size_t d_H, double rho, double beta_P, double beta_Q, double c1,
                               std::uint64_t packing_seed = 0);

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

enum class Axis { n_p, n_q };
enum class Statistic { mean, median };

struct SlopeFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
    std::size_t used = 0;
    std::size_t excluded_small = 0;
    std::vector<std::string> warnings;
};

// OLS of log(statistic) on log(n) over rows that vary along `axis` with the
// other size fixed. The `exclude_smallest` smallest n are dropped; rows with
// a zero statistic are dropped with a warning. Throws with fewer than 3
// usable rows or when the other size is not held fixed.
SlopeFit fit_slope(const RateTable& table, Axis axis, Statistic statistic = Statistic::median,
                   std::size_t exclude_smallest = 2);

struct TheoryRates {
    double eps_thm3 = 0.0;
    double eps1 = 0.0, eps2 = 0.0;  // two-sample minima
    double eps_L = 0.0, eps_H = 0.0;
    double n_tilde_P = 0.0;
};

// Sample sizes of 0 give d/0 = +inf.
TheoryRates theory_rates(double n_p, double n_q, std::size_t d_H, double rho, double beta_P, double beta_Q);

struct Comparison {
    bool pass = false;
    double fitted = 0.0, theory = 0.0, tolerance = 0.0;
    std::string message;
};

Comparison compare_to_theory(const SlopeFit& fit, double theory_exponent, double tolerance);
Comparison compare_to_theory(const RateTable& table, Axis axis, double theory_exponent, double tolerance);

inline constexpr const char* kRateCsvHeader = "n_p,n_q,estimator,trials,mean,median,q10,q90,seed";

// Numbers printed with %.17g, so a CSV round trip is exact.
std::string rate_table_csv(const RateTable& table);
RateTable rate_table_from_csv(const std::string& text);

Json slope_to_json(const SlopeFit& fit);
Json comparison_to_json(const Comparison& c);

}  // namespace transferlab
