#include "transferlab/transfer_erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace transferlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double capacity_term(std::size_t n, std::size_t d) {
    if (d == 0) return 0.0;
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    return dd / nd * std::log(std::max(nd, dd) / dd);
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0) && delta != 1.0)
        throw std::invalid_argument("confidence: delta must lie in (0, 1]");
}

}  // namespace

void ConfidenceParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("confidence: c must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence: delta must lie in (0, 1)");
}

double a_n(std::size_t n, std::size_t d_H, double delta) {
    require_delta(delta);
    if (n == 0) return kInf;
    return capacity_term(n, d_H) + std::log(1.0 / delta) / static_cast<double>(n);
}

double a_n_prime(std::size_t n, std::size_t d_H, double delta) {
    require_delta(delta);
    if (n == 0) return kInf;
    const double nd = static_cast<double>(n);
    return capacity_term(n, d_H) + std::log(2.0 * nd * nd / delta) / nd;
}

double a_n_dprime(std::size_t n, std::size_t d_H, std::size_t d_p, double delta) {
    return a_n(n, d_H + d_p, delta);
}

bool within_bound(double excess, double dis, double A, double c, double scale) {
    if (std::isinf(A)) return true;
    return excess <= c * std::sqrt(dis * A) + c * scale * A;
}

SampleFit fit_sample(const ProjectedClass& pc, const LabeledSample& s) {
    SampleFit f;
    f.risk = pc.errors(pc.tally(s));
    f.erm = argmin_index(f.risk);
    f.dis = pc.disagreements(f.erm, pc.mass(s.x));
    return f;
}

SampleFit fit_sample_weighted(const ProjectedClass& pc, const LabeledSample& s, std::span<const double> weights) {
    SampleFit f;
    f.risk = pc.errors(pc.tally(s, weights));
    f.erm = argmin_index(f.risk);
    std::vector<double> sq(weights.begin(), weights.end());
    for (double& w : sq) w *= w;
    f.dis = pc.disagreements(f.erm, pc.mass(s.x, sq));
    return f;
}

std::vector<char> feasible_members(const SampleFit& fit, double A, double c, double scale) {
    std::vector<char> ok(fit.risk.size());
    const double best = fit.risk[fit.erm];
    for (std::size_t j = 0; j < ok.size(); ++j) ok[j] = within_bound(fit.risk[j] - best, fit.dis[j], A, c, scale);
    return ok;
}

std::size_t constrained_argmin(std::span<const double> values, const std::vector<char>& feasible) {
    std::size_t best = values.size();
    for (std::size_t j = 0; j < values.size(); ++j)
        if (feasible[j] && (best == values.size() || values[j] < values[best])) best = j;
    if (best == values.size()) throw std::logic_error("constrained_argmin: no feasible member");
    return best;
}

namespace {

// Minimize the `objective` sample's risk subject to the bound on `constraint`.
Hypothesis constrained_erm(const LabeledSample& objective, const LabeledSample& constraint, const HypothesisClass& cls,
                           const ConfidenceParams& cp) {
    cp.validate();
    const ProjectedClass pc(cls, {objective.x, constraint.x});
    const auto fit = fit_sample(pc, constraint);
    const auto ok = feasible_members(fit, a_n(constraint.size(), cls.vc_dim(), cp.delta), cp.c);
    const auto risk = pc.errors(pc.tally(objective));
    return pc.hypothesis(constrained_argmin(risk, ok));
}

}  // namespace

Hypothesis algorithm1(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                      const ConfidenceParams& cp) {
    return constrained_erm(s_p, s_q, cls, cp);
}

Hypothesis algorithm1_prime(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                            const ConfidenceParams& cp) {
    return constrained_erm(s_q, s_p, cls, cp);
}

Hypothesis selector_prop6(const LabeledSample& s_p, const LabeledSample& s_q, const HypothesisClass& cls,
                          const ConfidenceParams& cp) {
    cp.validate();
    const ProjectedClass pc(cls, {s_p.x, s_q.x});
    const auto fit_q = fit_sample(pc, s_q);
    const std::size_t hp = argmin_index(pc.errors(pc.tally(s_p)));
    const double A = a_n(s_q.size(), cls.vc_dim(), cp.delta);
    const bool keep = within_bound(fit_q.risk[hp] - fit_q.risk[fit_q.erm], fit_q.dis[hp], A, cp.c);
    return pc.hypothesis(keep ? hp : fit_q.erm);
}

}  // namespace transferlab
