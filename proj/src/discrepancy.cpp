#include "transferlab/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace transferlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-9;

// Enumerated classes repeat the same few excess and disagreement values many
// times over, so transcendental calls are memoised on the argument's bits.
template <typename F>
class ValueMemo {
public:
    using Result = std::invoke_result_t<F, double>;
    explicit ValueMemo(F f) : f_(f) { keys_.fill(kEmpty); }
    const Result& operator()(double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        const std::size_t slot = (bits * 0x9E3779B97F4A7C15ULL) >> (64 - kBits);
        if (keys_[slot] != bits) [[unlikely]]
            fill(slot, bits, x);
        return vals_[slot];
    }

private:
    [[gnu::noinline]] void fill(std::size_t slot, std::uint64_t bits, double x) {
        keys_[slot] = bits;
        vals_[slot] = f_(x);
    }

    static constexpr int kBits = 10;
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};  // a NaN pattern never passed in
    F f_;
    std::array<std::uint64_t, std::size_t{1} << kBits> keys_;
    std::array<Result, std::size_t{1} << kBits> vals_;
};

// Exponent bound contributed by one member for C * a >= b^x, or -inf when
// the member never binds. The logs are taken unconditionally and the cases
// selected afterwards, which keeps the member loop free of hard-to-predict
// branches.
template <typename Log>
double exponent_ratio(double a, double C, double b, Log& log) {
    const double ca = C * a;
    const double ratio = log(ca) / log(b);
    const bool binds = b > kExcessZero && (a <= kExcessZero || (b < 1.0 && ca < 1.0));
    const double value = a <= kExcessZero ? kInf : ratio;
    return binds ? value : -kInf;
}

ExponentReport exponent_max(const PairView& v, const std::vector<double>& a, const std::vector<double>& b, double C,
                            std::optional<double> floor) {
    if (!(C > 0.0)) throw std::invalid_argument("exponent: constant must be positive");
    ExponentReport r;
    r.constant = C;
    r.value = floor.value_or(0.0);
    if (!v.grid.empty()) {
        r.grid_points = v.grid.size();
        r.grid_lo = v.grid.front();
        r.grid_hi = v.grid.back();
    }
    double best = -kInf;
    std::size_t witness = 0;
    ValueMemo log([](double x) { return std::log(x); });
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double ratio = exponent_ratio(a[j], C, b[j], log);
        if (ratio > best) {
            best = ratio;
            witness = j;
            if (std::isinf(best)) break;
        }
    }
    const bool found = best > -kInf;
    if (found) {
        r.value = floor ? std::max(best, *floor) : best;
        r.witness = v.pc.hypothesis(witness);
    }
    r.degenerate = !found;
    return r;
}

// Weight of cells where a member disagrees with `ref`.
CellSum disagreement_spec(const ProjectedClass& pc, std::size_t ref, const CellMass& m) {
    CellSum spec{m.weight, m.weight, m.normalizer};
    for (std::size_t k = 0; k < pc.cell_count(); ++k) (pc.label(ref, k) ? spec.set_value : spec.clear_value)[k] = 0.0;
    return spec;
}

}  // namespace

std::vector<double> threshold_grid(const TransferPair& pair, std::size_t intervals, std::size_t refine) {
    const auto* p = std::get_if<ThresholdJoint>(&pair.p);
    const auto* q = std::get_if<ThresholdJoint>(&pair.q);
    if (!p || !q) throw std::invalid_argument("threshold_grid: threshold scenarios only");
    if (intervals == 0) throw std::invalid_argument("threshold_grid: need at least one interval");
    const double lo = std::min(p->marginal.lower(), q->marginal.lower());
    const double hi = std::max(p->marginal.upper(), q->marginal.upper());
    std::vector<double> g;
    g.reserve(intervals + 2 + 2 * refine);
    for (std::size_t k = 0; k <= intervals; ++k)
        g.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(intervals));
    const double star = p->bayes.t;
    g.push_back(star);
    for (std::size_t k = 1; k <= refine; ++k) {
        const double step = std::ldexp(hi - lo, -static_cast<int>(k));
        g.push_back(star - step);
        g.push_back(star + step);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

PairView make_view(const TransferPair& pair, const HypothesisClass& cls, std::vector<double> grid) {
    const bool discrete = std::holds_alternative<DiscreteJoint>(pair.p);
    if (discrete != std::holds_alternative<DiscreteJoint>(pair.q))
        throw std::invalid_argument("make_view: P and Q must have the same form");
    std::optional<ProjectedClass> pc;
    if (discrete) {
        if (!cls.is_finite()) throw std::invalid_argument("make_view: discrete pairs need an enumerated class");
        pc.emplace(cls, std::initializer_list<std::span<const double>>{});
    } else {
        if (cls.is_finite()) throw std::invalid_argument("make_view: threshold pairs need the threshold class");
        if (grid.empty()) grid = threshold_grid(pair);
        pc.emplace(ProjectedClass::over_thresholds(cls.orientation(), grid));
    }
    PairView v{std::move(*pc), {}, {}, 0, 0, {}, {}, {}, {}, {}, {}};
    v.grid = std::move(grid);
    const CellTally tp = population_tally(pair.p, v.pc);
    const CellTally tq = population_tally(pair.q, v.pc);
    const CellMass mp = total_mass(tp);
    const CellMass mq = total_mass(tq);
    if (v.pc.is_finite()) {
        const CellSum risks[] = {{tp.neg, tp.pos, 1.0}, {tq.neg, tq.pos, 1.0}};
        auto r = v.pc.member_sums(risks);
        v.risk_p = std::move(r[0]);
        v.risk_q = std::move(r[1]);
    } else {
        v.risk_p = v.pc.errors(tp);
        v.risk_q = v.pc.errors(tq);
    }
    v.best_p = argmin_index(v.risk_p);
    v.best_q = argmin_index(v.risk_q);
    auto excess = [](const std::vector<double>& risk, double best) {
        std::vector<double> e(risk);
        for (double& x : e) x -= best;
        return e;
    };
    v.excess_p = excess(v.risk_p, v.risk_p[v.best_p]);
    v.excess_q = excess(v.risk_q, v.risk_q[v.best_q]);
    const bool shared_best = v.best_q == v.best_p;
    if (v.pc.is_finite()) {
        std::vector<CellSum> specs = {disagreement_spec(v.pc, v.best_p, mp), disagreement_spec(v.pc, v.best_p, mq)};
        if (!shared_best) specs.push_back(disagreement_spec(v.pc, v.best_q, mq));
        auto d = v.pc.member_sums(specs);
        v.dis_p = std::move(d[0]);
        v.dis_q_at_p = std::move(d[1]);
        v.dis_q = shared_best ? v.dis_q_at_p : std::move(d[2]);
    } else {
        v.dis_p = v.pc.disagreements(v.best_p, mp);
        v.dis_q_at_p = v.pc.disagreements(v.best_p, mq);
        v.dis_q = shared_best ? v.dis_q_at_p : v.pc.disagreements(v.best_q, mq);
    }
    return v;
}

Json report_to_json(const ExponentReport& r) {
    Json j = {{"value", number_to_json(r.value)}, {"constant", number_to_json(r.constant)}};
    if (r.witness) {
        if (const auto* t = std::get_if<Threshold>(&*r.witness)) {
            j["witness_threshold"] = number_to_json(t->t);
            j["witness_labels"] = nullptr;
        } else {
            j["witness_labels"] = hypothesis_to_json(*r.witness);
        }
    } else {
        j["witness_labels"] = nullptr;
    }
    if (r.degenerate) j["degenerate"] = true;
    if (r.grid_points) j["grid"] = {{"points", r.grid_points}, {"lo", r.grid_lo}, {"hi", r.grid_hi}};
    return j;
}

ExponentReport rho_min(const PairView& v, double C, std::optional<double> floor) {
    return exponent_max(v, v.excess_p, v.excess_q, C, floor);
}

ExponentReport gamma_min(const PairView& v, double C, std::optional<double> floor) {
    return exponent_max(v, v.dis_p, v.dis_q_at_p, C, floor);
}

ExponentReport rho_prime_min(const PairView& v, double C, std::optional<double> floor) {
    std::vector<double> clipped(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) clipped[j] = std::max(v.risk_q[j] - v.risk_q[v.best_p], 0.0);
    return exponent_max(v, v.excess_p, clipped, C, floor);
}

ExponentReport rho_min(const TransferPair& pair, const HypothesisClass& cls, double C) {
    return rho_min(make_view(pair, cls), C);
}

ExponentReport gamma_min(const TransferPair& pair, const HypothesisClass& cls, double C) {
    return gamma_min(make_view(pair, cls), C);
}

ExponentReport rho_prime_min(const TransferPair& pair, const HypothesisClass& cls, double C) {
    return rho_prime_min(make_view(pair, cls), C);
}

ExponentReport beta_max(const PairView& v, Side side, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("beta_max: constant must be positive");
    const auto& excess = side == Side::P ? v.excess_p : v.excess_q;
    const auto& dis = side == Side::P ? v.dis_p : v.dis_q;
    ExponentReport r;
    r.constant = c;
    r.value = 1.0;
    bool informative = false;  // some member with both d > 0 and e > 0
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double e = excess[j], d = dis[j];
        if (d <= kExcessZero) continue;
        informative |= e > kExcessZero;
        double bound;
        if (e <= kExcessZero)
            bound = 0.0;  // d <= c * 0^beta needs beta = 0
        else if (e >= 1.0)
            bound = d <= c ? kInf : 0.0;
        else if (d >= c)
            bound = 0.0;
        else
            bound = std::log(d / c) / std::log(e);
        if (bound < r.value) {
            r.value = bound;
            r.witness = v.pc.hypothesis(j);
        }
    }
    r.degenerate = !informative;
    return r;
}

ExponentReport beta_max(const Distribution& d, const HypothesisClass& cls, double c) {
    TransferPair pair{d, d, std::nullopt, ""};
    return beta_max(make_view(pair, cls), Side::P, c);
}

std::vector<ExponentReport> exponent_sweep(const PairView& v, ExponentKind kind, int k_lo, int k_hi) {
    std::vector<ExponentReport> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double C = std::ldexp(1.0, k);
        switch (kind) {
            case ExponentKind::rho: out.push_back(rho_min(v, C)); break;
            case ExponentKind::gamma: out.push_back(gamma_min(v, C)); break;
            case ExponentKind::rho_prime: out.push_back(rho_prime_min(v, C)); break;
        }
    }
    return out;
}

double d_A(const PairView& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s = std::max(s, std::abs(v.dis_p[j] - v.dis_q_at_p[j]));
    return s;
}

double d_Y(const PairView& v) { return d_Y_localized(v, kInf); }

double d_Y_localized(const PairView& v, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("d_Y_localized: eps must be >= 0");
    double s = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v.excess_p[j] > eps) continue;
        any = true;
        s = std::max(s, std::abs(v.excess_p[j] - v.excess_q[j]));
    }
    if (!any) throw std::logic_error("d_Y_localized: empty feasible set");
    return s;
}

double d_A(const TransferPair& pair, const HypothesisClass& cls) { return d_A(make_view(pair, cls)); }
double d_Y(const TransferPair& pair, const HypothesisClass& cls) { return d_Y(make_view(pair, cls)); }
double d_Y_localized(const TransferPair& pair, const HypothesisClass& cls, double eps) {
    return d_Y_localized(make_view(pair, cls), eps);
}

MembershipReport verify_membership(const PairView& v, double rho, double beta_P, double beta_Q, double C) {
    ValueMemo pow_p([beta_P](double x) { return std::pow(x, beta_P); });
    ValueMemo pow_q([rho, beta_Q](double x) { return std::array<double, 2>{std::pow(x, rho), std::pow(x, beta_Q)}; });
    constexpr double keep = 1.0 - kRelTol;
    // Both sides of every inequality for member j, larger side first.
    auto sides = [&](std::size_t j) {
        const double ep = std::max(v.excess_p[j], 0.0), eq = std::max(v.excess_q[j], 0.0);
        const auto& q = pow_q(eq);
        return std::array<std::array<double, 2>, 3>{{{C * ep, eq > kExcessZero ? q[0] : 0.0},
                                                     {C * pow_p(ep), v.dis_p[j] > kExcessZero ? v.dis_p[j] : 0.0},
                                                     {C * q[1], v.dis_q[j] > kExcessZero ? v.dis_q[j] : 0.0}}};
    };
    bool bad = false;
    const double *xp = v.excess_p.data(), *xq = v.excess_q.data(), *dp = v.dis_p.data(), *dq = v.dis_q.data();
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double ep = std::max(xp[j], 0.0), eq = std::max(xq[j], 0.0);
        const auto& q = pow_q(eq);
        const double tq = eq > kExcessZero ? q[0] : 0.0;
        const double np = dp[j] > kExcessZero ? dp[j] : 0.0, nq = dq[j] > kExcessZero ? dq[j] : 0.0;
        bad |= (C * ep < tq * keep) | (C * pow_p(ep) < np * keep) | (C * q[1] < nq * keep);
    }
    MembershipReport rep;
    if (!bad) return rep;
    static constexpr const char* kNames[] = {"transfer", "noise_P", "noise_Q"};
    for (std::size_t j = 0; j < v.size(); ++j) {
        const auto s = sides(j);
        for (std::size_t k = 0; k < 3; ++k) {
            if (s[k][0] < s[k][1] * keep) {
                rep.member = false;
                rep.violation = Violation{kNames[k], v.pc.hypothesis(j), s[k][0], s[k][1]};
                return rep;
            }
        }
    }
    return rep;
}

MembershipReport verify_membership(const TransferPair& pair, const HypothesisClass& cls, double rho, double beta_P,
                                   double beta_Q, double C) {
    return verify_membership(make_view(pair, cls), rho, beta_P, beta_Q, C);
}

Prop4Report prop4_check(const PairView& v, const std::optional<Certified>& cert) {
    Prop4Report r;
    if (cert) {
        r.C_gamma = cert->C_gamma.value_or(1.0);
        r.c_P = cert->c_P.value_or(1.0);
    }
    r.gamma = gamma_min(v, r.C_gamma).value;
    r.beta_P = beta_max(v, Side::P, r.c_P).value;
    r.C_rho = std::pow(r.C_gamma * r.c_P, 1.0 / r.beta_P);
    r.rho = rho_min(v, r.C_rho).value;
    r.bound = r.beta_P > 0.0 ? r.gamma / r.beta_P : kInf;
    r.holds = r.rho <= r.bound * (1.0 + kRelTol);
    return r;
}

Prop4Report prop4_check(const TransferPair& pair, const HypothesisClass& cls) {
    return prop4_check(make_view(pair, cls), pair.certified);
}

}  // namespace transferlab
