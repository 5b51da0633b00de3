#include "transferlab/cost_adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "transferlab/rng.hpp"

namespace transferlab {

double CostSchedule::operator()(double n) const {
    return form == CostForm::linear ? u * n : u * std::pow(n, a);
}

void CostSchedule::validate() const {
    if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("cost schedule: u must be positive");
    if (form == CostForm::power && !(a > 0.0 && a <= 1.0))
        throw std::invalid_argument("cost schedule: power exponent must lie in (0, 1]");
}

Json schedule_to_json(const CostSchedule& s) {
    Json j{{"form", s.form == CostForm::linear ? "linear" : "power"}, {"u", s.u}};
    if (s.form == CostForm::power) j["a"] = s.a;
    return j;
}

CostSchedule schedule_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("cost schedule: expected an object");
    for (const auto& [k, v] : j.items())
        if (k != "form" && k != "u" && k != "a") throw std::invalid_argument("cost schedule: unknown key '" + k + "'");
    CostSchedule s;
    const std::string form = j.value("form", "linear");
    if (form == "linear") {
        s.form = CostForm::linear;
    } else if (form == "power") {
        s.form = CostForm::power;
    } else {
        throw std::invalid_argument("cost schedule: form must be 'linear' or 'power'");
    }
    if (j.contains("u")) s.u = j.at("u").get<double>();
    if (j.contains("a")) s.a = j.at("a").get<double>();
    s.validate();
    return s;
}

std::size_t minimal_n_for_cost(const CostSchedule& schedule, double budget) {
    schedule.validate();
    if (!(budget > 0.0) || !std::isfinite(budget)) throw std::invalid_argument("minimal_n_for_cost: budget must be positive");
    const double ratio = budget / schedule.u;
    const double guess = std::ceil(schedule.form == CostForm::linear ? ratio : std::pow(ratio, 1.0 / schedule.a));
    if (guess > 0x1.0p62) throw std::overflow_error("minimal_n_for_cost: batch size overflows");
    auto n = static_cast<std::size_t>(std::max(1.0, guess));
    // The closed form can be off by one either way after rounding.
    while (n > 1 && schedule(static_cast<double>(n - 1)) >= budget) --n;
    while (schedule(static_cast<double>(n)) < budget) ++n;
    return n;
}

double delta_hat(const LabeledSample& s, std::span<const double> u, const HypothesisClass& cls,
                 const ConfidenceParams& cp) {
    cp.validate();
    if (u.empty()) return 0.0;
    const ProjectedClass pc(cls, {s.x, u});
    const auto fit = fit_sample(pc, s);
    const auto ok = feasible_members(fit, a_n_prime(s.size(), cls.vc_dim(), cp.delta), cp.c);
    const auto dis_u = pc.disagreements(fit.erm, pc.mass(u));
    double best = 0.0;
    for (std::size_t j = 0; j < ok.size(); ++j)
        if (ok[j]) best = std::max(best, dis_u[j]);
    return best;
}

Json round_to_json(const SamplingRound& r) {
    return Json{{"t", r.t},
                {"n_tP", r.n_tP},
                {"n_tQ", r.n_tQ},
                {"cost_P", r.cost_P},
                {"cost_Q", r.cost_Q},
                {"step6_lhs", number_to_json(r.step6_lhs)},
                {"step7_stat", std::isnan(r.step7_stat) ? Json(nullptr) : Json(r.step7_stat)},
                {"decision", r.decision}};
}

std::string transcript_to_jsonl(const SamplingTranscript& tr) {
    std::ostringstream out;
    for (const auto& r : tr.rounds) out << round_to_json(r).dump() << '\n';
    return out.str();
}

Sampler distribution_sampler(const Distribution& d, std::uint64_t seed) {
    return [d, seed, calls = std::uint64_t{0}](std::size_t n) mutable {
        return sample_labeled(d, n, derive_seed(seed, {calls++}));
    };
}

std::size_t required_unlabeled(double eps, double delta, std::size_t d_H, double kappa) {
    const double d = static_cast<double>(d_H);
    return static_cast<std::size_t>(std::ceil(kappa * (d / eps * std::log(1.0 / eps) + std::log(1.0 / delta) / eps)));
}

AdaptiveResult algorithm2(double eps, double delta, const CostSchedule& sched_P, const CostSchedule& sched_Q,
                          const Sampler& sampler_P, const Sampler& sampler_Q, std::span<const double> u_q,
                          const HypothesisClass& cls, const ConfidenceParams& cp, const AdaptiveOptions& opt) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("algorithm2: eps must lie in (0, 1)");
    ConfidenceParams local = cp;
    local.delta = delta;
    local.validate();
    sched_P.validate();
    sched_Q.validate();
    if (!(opt.kappa > 0.0)) throw std::invalid_argument("algorithm2: kappa must be positive");
    const std::size_t need = required_unlabeled(eps, delta, cls.vc_dim(), opt.kappa);
    if (opt.use_source && u_q.size() < need)
        throw std::invalid_argument("algorithm2: U_Q has " + std::to_string(u_q.size()) + " points, needs " +
                                    std::to_string(need));

    AdaptiveResult out;
    SamplingTranscript& tr = out.transcript;
    LabeledSample s_p, s_q;
    for (std::size_t t = 1; t <= opt.round_cap; ++t) {
        const double budget = std::ldexp(1.0, static_cast<int>(t) - 1);
        SamplingRound r;
        r.t = t;
        r.step7_stat = std::numeric_limits<double>::quiet_NaN();
        if (opt.use_source) {
            r.n_tP = minimal_n_for_cost(sched_P, budget);
            r.cost_P = sched_P(static_cast<double>(r.n_tP));
            s_p.append(sampler_P(r.n_tP));
        }
        r.n_tQ = minimal_n_for_cost(sched_Q, budget);
        r.cost_Q = sched_Q(static_cast<double>(r.n_tQ));
        s_q.append(sampler_Q(r.n_tQ));
        tr.total_cost += r.cost_P + r.cost_Q;

        const double A = opt.step6 == Step6Variant::A ? a_n(s_q.size(), cls.vc_dim(), delta)
                                                      : a_n_prime(s_q.size(), cls.vc_dim(), delta);
        r.step6_lhs = local.c * std::sqrt(delta_hat(s_q, s_q.x, cls, local) * A) + local.c * A;
        if (r.step6_lhs <= eps) {
            r.decision = "step6";
        } else if (opt.use_source) {
            r.step7_stat = delta_hat(s_p, u_q, cls, local);
            if (r.step7_stat <= eps / 4.0) r.decision = "step7";
        }
        if (r.decision.empty()) r.decision = "continue";
        tr.rounds.push_back(r);
        if (r.decision != "continue") {
            tr.returned_by = r.decision;
            tr.size_P = s_p.size();
            tr.size_Q = s_q.size();
            out.h = erm(cls, r.decision == "step6" ? s_q : s_p);
            return out;
        }
    }
    throw std::runtime_error("algorithm2: no stopping test passed within " + std::to_string(opt.round_cap) +
                             " rounds (total cost " + std::to_string(tr.total_cost) + ")");
}

TheoryCosts theory_costs(double eps, std::size_t d_H, double beta_P, double beta_Q, double gamma,
                         const CostSchedule& sched_P, const CostSchedule& sched_Q) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("theory_costs: eps must lie in (0, 1)");
    if (!(beta_P > 0.0 && beta_P <= 1.0 && beta_Q > 0.0 && beta_Q <= 1.0))
        throw std::invalid_argument("theory_costs: betas must lie in (0, 1]");
    if (!(gamma > 0.0)) throw std::invalid_argument("theory_costs: gamma must be positive");
    const double d = static_cast<double>(d_H);
    TheoryCosts tc;
    tc.n_star_Q = d / std::pow(eps, 2.0 - beta_Q);
    tc.n_star_P = d / std::pow(eps, (2.0 - beta_P) * gamma / beta_P);
    tc.c_star = std::min(sched_Q(tc.n_star_Q), sched_P(tc.n_star_P));
    return tc;
}

}  // namespace transferlab
