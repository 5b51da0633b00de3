#include "transferlab/source_select.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "transferlab/cost_adaptive.hpp"

namespace transferlab {

namespace {

double weight_at(std::span<const double> f, double x) {
    const auto i = static_cast<std::size_t>(x);
    if (x < 0.0 || i >= f.size()) throw std::out_of_range("density: sample point outside the support");
    return f[i];
}

std::vector<double> weights_at(std::span<const double> f, std::span<const double> xs) {
    std::vector<double> w(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) w[i] = weight_at(f, xs[i]);
    return w;
}

double sup_of(std::span<const double> f) { return f.empty() ? 0.0 : *std::max_element(f.begin(), f.end()); }

}  // namespace

std::size_t default_pseudo_dim(std::size_t family_size) {
    if (family_size <= 1) return 0;
    return static_cast<std::size_t>(std::bit_width(family_size - 1));
}

DensityFamily DensityFamily::make(std::vector<std::vector<double>> members, std::optional<std::size_t> d_p) {
    if (members.empty()) throw std::invalid_argument("density family: no members");
    DensityFamily fam;
    for (const auto& m : members) {
        if (m.size() != members.front().size()) throw std::invalid_argument("density family: members differ in length");
        for (double w : m)
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("density family: weights must be finite and >= 0");
        fam.sup_norm.push_back(sup_of(m));
    }
    fam.d_p = d_p.value_or(default_pseudo_dim(members.size()));
    fam.members = std::move(members);
    return fam;
}

std::vector<double> DensityFamily::at_points(std::size_t k, std::span<const double> xs) const {
    return weights_at(members.at(k), xs);
}

double weighted_risk(const LabeledSample& s, std::span<const double> f, const Hypothesis& h) {
    if (s.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (predict(h, s.x[i]) != s.y[i]) acc += weight_at(f, s.x[i]);
    return acc / static_cast<double>(s.size());
}

double weighted_excess(const LabeledSample& s, std::span<const double> f, const Hypothesis& h,
                       const HypothesisClass& cls) {
    const ProjectedClass pc(cls, {s.x});
    const auto risk = pc.errors(pc.tally(s, weights_at(f, s.x)));
    return weighted_risk(s, f, h) - risk[argmin_index(risk)];
}

double weighted_disagreement_f2(const LabeledSample& s, std::span<const double> f, const Hypothesis& h,
                                const Hypothesis& h2) {
    if (s.empty()) return 0.0;
    double acc = 0.0;
    for (double x : s.x)
        if (predict(h, x) != predict(h2, x)) {
            const double w = weight_at(f, x);
            acc += w * w;
        }
    return acc / static_cast<double>(s.size());
}

namespace {

// Feasible set of the weighted constraint and the U disagreements behind delta-hat.
struct WeightedFeasible {
    std::vector<char> ok;
    double delta_hat = 0.0;
};

WeightedFeasible weighted_feasible(const ProjectedClass& pc, const LabeledSample& s_p, std::span<const double> f,
                                   std::span<const double> u_q, std::size_t d_H, const ConfidenceParams& cp,
                                   std::size_t d_p) {
    const auto fit = fit_sample_weighted(pc, s_p, weights_at(f, s_p.x));
    WeightedFeasible out;
    out.ok = feasible_members(fit, a_n_dprime(s_p.size(), d_H, d_p, cp.delta), cp.c, sup_of(f));
    if (u_q.empty()) return out;
    const auto dis_u = pc.disagreements(fit.erm, pc.mass(u_q));
    for (std::size_t j = 0; j < out.ok.size(); ++j)
        if (out.ok[j]) out.delta_hat = std::max(out.delta_hat, dis_u[j]);
    return out;
}

}  // namespace

double delta_hat_weighted(const LabeledSample& s_p, std::span<const double> f, std::span<const double> u_q,
                          const HypothesisClass& cls, const ConfidenceParams& cp, std::size_t d_p) {
    cp.validate();
    const ProjectedClass pc(cls, {s_p.x, u_q});
    return weighted_feasible(pc, s_p, f, u_q, cls.vc_dim(), cp, d_p).delta_hat;
}

ReweightResult algorithm3(const LabeledSample& s_p, const LabeledSample& s_q, std::span<const double> u_q,
                          const DensityFamily& family, const HypothesisClass& cls, const ConfidenceParams& cp) {
    cp.validate();
    if (family.size() == 0) throw std::invalid_argument("algorithm3: empty density family");
    const ProjectedClass pc(cls, {s_p.x, s_q.x, u_q});
    ReweightResult r;
    std::vector<std::vector<char>> feasible;
    for (std::size_t k = 0; k < family.size(); ++k) {
        auto wf = weighted_feasible(pc, s_p, family.members[k], u_q, cls.vc_dim(), cp, family.d_p);
        r.delta_hats.push_back(wf.delta_hat);
        feasible.push_back(std::move(wf.ok));
    }
    r.chosen = argmin_index(r.delta_hats);
    const auto risk_q = pc.errors(pc.tally(s_q));
    r.h = pc.hypothesis(constrained_argmin(risk_q, feasible[r.chosen]));
    return r;
}

SourceChoice algorithm4(std::span<const LabeledSample> sources, const LabeledSample& s_q, std::span<const double> u_q,
                        const HypothesisClass& cls, const ConfidenceParams& cp) {
    cp.validate();
    if (sources.empty()) throw std::invalid_argument("algorithm4: no sources");
    ConfidenceParams split = cp;
    split.delta = cp.delta / static_cast<double>(sources.size());
    SourceChoice r;
    for (const auto& s : sources) r.delta_hats.push_back(delta_hat(s, u_q, cls, split));
    r.chosen = argmin_index(r.delta_hats);

    const LabeledSample& s = sources[r.chosen];
    const ProjectedClass pc(cls, {s.x, s_q.x});
    const auto fit = fit_sample(pc, s);
    const auto ok = feasible_members(fit, a_n(s.size(), cls.vc_dim(), split.delta), split.c);
    r.h = pc.hypothesis(constrained_argmin(pc.errors(pc.tally(s_q)), ok));
    return r;
}

}  // namespace transferlab
