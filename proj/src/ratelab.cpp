#include "transferlab/ratelab.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "transferlab/families.hpp"
#include "transferlab/rng.hpp"

namespace transferlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const std::vector<std::string>& estimator_ids() {
    static const std::vector<std::string> ids{"erm_p", "erm_q", "algorithm1", "algorithm1_prime", "selector_prop6"};
    return ids;
}

Estimator make_estimator(const std::string& id, const ConfidenceParams& cp) {
    cp.validate();
    if (id == "erm_p") return [](const LabeledSample& p, const LabeledSample&, const HypothesisClass& c) { return erm(c, p); };
    if (id == "erm_q") return [](const LabeledSample&, const LabeledSample& q, const HypothesisClass& c) { return erm(c, q); };
    if (id == "algorithm1")
        return [cp](const LabeledSample& p, const LabeledSample& q, const HypothesisClass& c) { return algorithm1(p, q, c, cp); };
    if (id == "algorithm1_prime")
        return [cp](const LabeledSample& p, const LabeledSample& q, const HypothesisClass& c) {
            return algorithm1_prime(p, q, c, cp);
        };
    if (id == "selector_prop6")
        return [cp](const LabeledSample& p, const LabeledSample& q, const HypothesisClass& c) {
            return selector_prop6(p, q, c, cp);
        };
    throw std::invalid_argument("unknown estimator '" + id + "'");
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t n_p, std::size_t n_q) {
    return derive_seed(master, {static_cast<std::uint64_t>(n_p), static_cast<std::uint64_t>(n_q)});
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: no values");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

RateTable monte_carlo(const TransferPair& pair, const HypothesisClass& cls, const std::string& estimator_id,
                      const Estimator& estimator, const RateGrid& grid, std::size_t trials, std::uint64_t seed,
                      std::size_t jobs) {
    return monte_carlo([&pair](std::size_t, std::size_t) { return std::vector<TransferPair>{pair}; }, cls, estimator_id,
                       estimator, grid, trials, seed, jobs);
}

RateTable monte_carlo(const CellPairs& cell_pairs, const HypothesisClass& cls, const std::string& estimator_id,
                      const Estimator& estimator, const RateGrid& grid, std::size_t trials, std::uint64_t seed,
                      std::size_t jobs) {
    if (trials == 0) throw std::invalid_argument("monte_carlo: trials must be >= 1");

    struct Cell {
        std::vector<TransferPair> pairs;
        std::vector<double> best_q;
        std::uint64_t seed = 0;
    };
    std::vector<Cell> cells(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto& c = cells[i];
        c.seed = cell_seed(seed, grid[i].first, grid[i].second);
        c.pairs = cell_pairs(grid[i].first, grid[i].second);
        if (c.pairs.empty()) throw std::invalid_argument("monte_carlo: no pairs for a grid cell");
        for (const auto& pair : c.pairs) {
            try {
                c.best_q.push_back(true_risk(pair.q, best_in_class(pair.q, cls)));
            } catch (const std::exception& e) {
                throw std::invalid_argument(std::string("monte_carlo: target risk is not exactly evaluable: ") + e.what());
            }
        }
    }
    std::vector<std::vector<double>> excess(grid.size(), std::vector<double>(trials));

    const std::size_t total = grid.size() * trials;
    if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(total, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < total;) {
            const std::size_t i = k / trials, trial = k % trials;
            const Cell& c = cells[i];
            try {
                const std::size_t which =
                    c.pairs.size() == 1 ? 0 : derive_seed(c.seed, {trial, 2}) % c.pairs.size();
                const auto& pair = c.pairs[which];
                const auto s_p = sample_labeled(pair.p, grid[i].first, derive_seed(c.seed, {trial, 0}));
                const auto s_q = sample_labeled(pair.q, grid[i].second, derive_seed(c.seed, {trial, 1}));
                const Hypothesis h = estimator(s_p, s_q, cls);
                excess[i][trial] = std::max(0.0, true_risk(pair.q, h) - c.best_q[which]);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
                next.store(total);
            }
        }
    };
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    RateTable table;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& v = excess[i];
        RateRow r;
        r.n_p = grid[i].first;
        r.n_q = grid[i].second;
        r.estimator = estimator_id;
        r.trials = trials;
        double sum = 0.0;
        for (double e : v) sum += e;
        r.mean = sum / static_cast<double>(trials);
        r.median = quantile(v, 0.5);
        r.q10 = quantile(v, 0.1);
        r.q90 = quantile(v, 0.9);
        r.seed = cells[i].seed;
        table.rows.push_back(std::move(r));
    }
    return table;
}

CellPairs tuned_theorem3_pairs(std::size_t d_H, double rho, double beta_P, double beta_Q, double c1,
                               std::uint64_t packing_seed) {
    return [=](std::size_t n_p, std::size_t n_q) {
        const double eps = lower_bound_epsilon(static_cast<double>(n_p), static_cast<double>(n_q), d_H, rho, beta_P,
                                               beta_Q, c1);
        return build_theorem3_family(d_H, rho, beta_P, beta_Q, eps, packing_seed).pairs;
    };
}

SlopeFit fit_slope(const RateTable& table, Axis axis, Statistic statistic, std::size_t exclude_smallest) {
    auto along = [&](const RateRow& r) { return axis == Axis::n_p ? r.n_p : r.n_q; };
    auto fixed = [&](const RateRow& r) { return axis == Axis::n_p ? r.n_q : r.n_p; };
    if (table.rows.empty()) throw std::invalid_argument("fit_slope: empty table");
    for (const auto& r : table.rows)
        if (fixed(r) != fixed(table.rows.front()))
            throw std::invalid_argument("fit_slope: rows must hold the other sample size fixed");

    std::vector<const RateRow*> rows;
    for (const auto& r : table.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [&](const RateRow* a, const RateRow* b) { return along(*a) < along(*b); });

    SlopeFit fit;
    fit.excluded_small = std::min(exclude_smallest, rows.size());
    std::vector<double> xs, ys;
    for (std::size_t i = fit.excluded_small; i < rows.size(); ++i) {
        const double y = statistic == Statistic::mean ? rows[i]->mean : rows[i]->median;
        const auto n = along(*rows[i]);
        if (!(y > 0.0) || n == 0) {
            fit.warnings.push_back("excluded row n=" + std::to_string(n) + " with non-positive statistic or size");
            continue;
        }
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(y));
    }
    fit.used = xs.size();
    if (fit.used < 3) throw std::invalid_argument("fit_slope: fewer than 3 usable rows");

    const double m = static_cast<double>(fit.used);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: all usable rows share one sample size");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    return fit;
}

TheoryRates theory_rates(double n_p, double n_q, std::size_t d_H, double rho, double beta_P, double beta_Q) {
    const double d = static_cast<double>(d_H);
    const double rp = n_p > 0.0 ? d / n_p : kInf;
    const double rq = n_q > 0.0 ? d / n_q : kInf;
    const double e1_p = std::pow(rp, 1.0 / ((2.0 - beta_P) * rho * beta_Q));
    const double e2_p = std::pow(rp, 1.0 / ((2.0 - beta_P) * rho));
    const double e1_q = std::pow(rq, 1.0 / (2.0 - beta_Q));
    const double e2_q = rq;
    TheoryRates t;
    t.eps_thm3 = std::min(e2_p, e1_q);
    t.eps1 = std::min(e1_p, e1_q);
    t.eps2 = std::min(e2_p, e2_q);
    t.eps_L = std::max(t.eps1, t.eps2);
    t.eps_H = std::min(e2_p, e1_q);
    t.n_tilde_P = std::pow(n_p, (2.0 - beta_Q) / ((2.0 - beta_P) * rho));
    return t;
}

Comparison compare_to_theory(const SlopeFit& fit, double theory_exponent, double tolerance) {
    Comparison c;
    c.fitted = fit.slope;
    c.theory = theory_exponent;
    c.tolerance = tolerance;
    const double gap = std::abs(fit.slope - theory_exponent);
    c.pass = gap <= tolerance;
    char buf[160];
    std::snprintf(buf, sizeof buf, "fitted slope %.4f vs theory %.4f: |gap| %.4f %s tolerance %.4f", fit.slope,
                  theory_exponent, gap, c.pass ? "<=" : ">", tolerance);
    c.message = buf;
    return c;
}

Comparison compare_to_theory(const RateTable& table, Axis axis, double theory_exponent, double tolerance) {
    return compare_to_theory(fit_slope(table, axis), theory_exponent, tolerance);
}

std::string rate_table_csv(const RateTable& table) {
    std::string out = std::string(kRateCsvHeader) + "\n";
    char buf[512];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%zu,%.17g,%.17g,%.17g,%.17g,%" PRIu64 "\n", r.n_p, r.n_q,
                      r.estimator.c_str(), r.trials, r.mean, r.median, r.q10, r.q90, r.seed);
        out += buf;
    }
    return out;
}

RateTable rate_table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRateCsvHeader) throw std::invalid_argument("rate csv: bad header");
    RateTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 9) throw std::invalid_argument("rate csv: expected 9 fields in '" + line + "'");
        try {
            RateRow r;
            r.n_p = std::stoull(f[0]);
            r.n_q = std::stoull(f[1]);
            r.estimator = f[2];
            r.trials = std::stoull(f[3]);
            r.mean = std::stod(f[4]);
            r.median = std::stod(f[5]);
            r.q10 = std::stod(f[6]);
            r.q90 = std::stod(f[7]);
            r.seed = std::stoull(f[8]);
            table.rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::invalid_argument("rate csv: unparsable row '" + line + "'");
        }
    }
    return table;
}

Json slope_to_json(const SlopeFit& fit) {
    return Json{{"slope", fit.slope},       {"intercept", fit.intercept},
                {"r2", fit.r2},             {"used_rows", fit.used},
                {"excluded_smallest", fit.excluded_small}, {"warnings", fit.warnings}};
}

Json comparison_to_json(const Comparison& c) {
    return Json{{"pass", c.pass}, {"fitted", c.fitted}, {"theory", c.theory}, {"tolerance", c.tolerance},
                {"message", c.message}};
}

}  // namespace transferlab
