#include "transferlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "transferlab/rng.hpp"

namespace transferlab {

namespace {

constexpr double kMassTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double clamp_to(double t, double lo, double hi) { return std::min(std::max(t, lo), hi); }

// Piece-normalized mass of (a, b] within the piece.
double piece_mass(const DensityPiece& p, double a, double b) {
    const double len = p.hi - p.lo;
    a = clamp_to(a, p.lo, p.hi);
    b = clamp_to(b, p.lo, p.hi);
    if (b <= a) return 0.0;
    if (p.concentrate_at_hi) return std::pow((p.hi - a) / len, p.exponent) - std::pow((p.hi - b) / len, p.exponent);
    return std::pow((b - p.lo) / len, p.exponent) - std::pow((a - p.lo) / len, p.exponent);
}

std::vector<double> cumulative(const std::vector<double>& mass) {
    std::vector<double> cum(mass.size());
    std::partial_sum(mass.begin(), mass.end(), cum.begin());
    // Guard against the last partial sum landing just below 1.
    for (std::size_t i = cum.size(); i-- > 0;) {
        if (mass[i] > 0.0) {
            for (std::size_t j = i; j < cum.size(); ++j) cum[j] = 1.0;
            break;
        }
    }
    return cum;
}

const ThresholdJoint& as_threshold(const Distribution& d, const char* what) {
    if (const auto* t = std::get_if<ThresholdJoint>(&d)) return *t;
    throw std::invalid_argument(std::string(what) + ": expected a threshold scenario");
}

const DiscreteJoint& as_discrete(const Distribution& d, const char* what) {
    if (const auto* j = std::get_if<DiscreteJoint>(&d)) return *j;
    throw std::invalid_argument(std::string(what) + ": expected a discrete joint");
}

const Threshold& as_threshold_h(const Hypothesis& h, const char* what) {
    if (const auto* t = std::get_if<Threshold>(&h)) return *t;
    throw std::invalid_argument(std::string(what) + ": threshold scenarios evaluate threshold hypotheses only");
}

const Labeling& as_labeling(const Hypothesis& h, std::size_t support, const char* what) {
    const auto* l = std::get_if<Labeling>(&h);
    if (!l) throw std::invalid_argument(std::string(what) + ": discrete joints evaluate labelings only");
    if (l->size != support) throw std::invalid_argument(std::string(what) + ": labeling size differs from support");
    return *l;
}

// Marginal mass strictly between two thresholds, i.e. where two thresholds
// of the same orientation disagree.
double between(const ContinuousMarginal& m, double t1, double t2) {
    return m.interval_mass(std::min(t1, t2), std::max(t1, t2));
}

}  // namespace

DiscreteJoint DiscreteJoint::make(std::vector<double> mass, std::vector<double> eta, std::vector<double> coordinates) {
    DiscreteJoint j;
    j.mass = std::move(mass);
    j.eta = std::move(eta);
    if (!coordinates.empty() && coordinates.size() != j.mass.size())
        throw std::invalid_argument("DiscreteJoint: one coordinate per support point");
    j.support.resize(j.mass.size());
    for (std::size_t i = 0; i < j.support.size(); ++i)
        j.support[i] = SupportPoint{i, coordinates.empty() ? static_cast<double>(i) : coordinates[i]};
    j.validate();
    return j;
}

void DiscreteJoint::validate() const {
    if (mass.empty()) throw std::invalid_argument("DiscreteJoint: empty support");
    if (mass.size() > kMaxSupport) throw std::invalid_argument("DiscreteJoint: support larger than 64 points");
    if (eta.size() != mass.size() || support.size() != mass.size())
        throw std::invalid_argument("DiscreteJoint: mass, eta and support lengths differ");
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (!(mass[i] >= 0.0)) throw std::invalid_argument("DiscreteJoint: negative mass");
        if (!(eta[i] >= 0.0 && eta[i] <= 1.0)) throw std::invalid_argument("DiscreteJoint: eta outside [0, 1]");
        if (support[i].index != i) throw std::invalid_argument("DiscreteJoint: support indices must be 0..n-1");
        total += mass[i];
    }
    if (std::abs(total - 1.0) > kMassTolerance) throw std::invalid_argument("DiscreteJoint: masses do not sum to 1");
}

ContinuousMarginal::ContinuousMarginal(std::vector<DensityPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("ContinuousMarginal: no pieces");
    double total = 0.0;
    for (const auto& p : pieces_) {
        if (!(p.hi > p.lo)) throw std::invalid_argument("ContinuousMarginal: piece needs lo < hi");
        if (!(p.weight >= 0.0)) throw std::invalid_argument("ContinuousMarginal: negative piece weight");
        if (!(p.exponent > 0.0)) throw std::invalid_argument("ContinuousMarginal: exponent must be positive");
        total += p.weight;
    }
    if (std::abs(total - 1.0) > kMassTolerance) throw std::invalid_argument("ContinuousMarginal: weights do not sum to 1");
}

ContinuousMarginal ContinuousMarginal::uniform(double lo, double hi) {
    return ContinuousMarginal({DensityPiece{lo, hi, 1.0, 1.0, false}});
}

double ContinuousMarginal::cdf(double t) const {
    double f = 0.0;
    for (const auto& p : pieces_) f += p.weight * piece_mass(p, p.lo, t);
    return f;
}

double ContinuousMarginal::interval_mass(double a, double b) const {
    double f = 0.0;
    for (const auto& p : pieces_) f += p.weight * piece_mass(p, a, b);
    return f;
}

double ContinuousMarginal::density(double t) const {
    double f = 0.0;
    for (const auto& p : pieces_) {
        if (t < p.lo || t > p.hi) continue;
        const double len = p.hi - p.lo;
        const double s = p.concentrate_at_hi ? (p.hi - t) / len : (t - p.lo) / len;
        f += p.weight * p.exponent * std::pow(s, p.exponent - 1.0) / len;
    }
    return f;
}

double ContinuousMarginal::sample(Rng& rng) const {
    double u = rng.uniform();
    const DensityPiece* chosen = &pieces_.back();
    for (const auto& p : pieces_) {
        if (u < p.weight) {
            chosen = &p;
            break;
        }
        u -= p.weight;
    }
    const double v = rng.uniform();
    const double s = std::pow(v, 1.0 / chosen->exponent);
    const double len = chosen->hi - chosen->lo;
    return chosen->concentrate_at_hi ? chosen->hi - len * s : chosen->lo + len * s;
}

double ContinuousMarginal::lower() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_)
        if (p.weight > 0.0) lo = std::min(lo, p.lo);
    return lo;
}

double ContinuousMarginal::upper() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_)
        if (p.weight > 0.0) hi = std::max(hi, p.hi);
    return hi;
}

LabeledSample sample_labeled(const Distribution& d, std::size_t n, std::uint64_t seed) {
    LabeledSample s;
    s.seed = seed;
    s.x.reserve(n);
    s.y.reserve(n);
    Rng rng(seed);
    std::visit(overloaded{
                   [&](const DiscreteJoint& j) {
                       const auto cum = cumulative(j.mass);
                       for (std::size_t i = 0; i < n; ++i) {
                           const double u = rng.uniform();
                           const auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                           s.push_back(static_cast<double>(k), rng.bernoulli(j.eta[k]) ? 1 : 0);
                       }
                   },
                   [&](const ThresholdJoint& t) {
                       for (std::size_t i = 0; i < n; ++i) {
                           const double x = t.marginal.sample(rng);
                           s.push_back(x, t.bayes(x));
                       }
                   },
               },
               d);
    return s;
}

UnlabeledSample sample_unlabeled(const Distribution& d, std::size_t n, std::uint64_t seed) {
    UnlabeledSample u;
    u.seed = seed;
    u.x = sample_labeled(d, n, seed).x;
    return u;
}

double true_risk(const Distribution& d, const Hypothesis& h) {
    return std::visit(overloaded{
                          [&](const DiscreteJoint& j) {
                              const auto& lab = as_labeling(h, j.size(), "true_risk");
                              double r = 0.0;
                              for (std::size_t i = 0; i < j.size(); ++i)
                                  r += j.mass[i] * (lab(i) ? 1.0 - j.eta[i] : j.eta[i]);
                              return r;
                          },
                          [&](const ThresholdJoint& t) {
                              const auto& th = as_threshold_h(h, "true_risk");
                              const double dis = between(t.marginal, th.t, t.bayes.t);
                              return th.orientation == t.bayes.orientation ? dis : 1.0 - dis;
                          },
                      },
                      d);
}

double disagreement_mass(const Distribution& d, const Hypothesis& h, const Hypothesis& h2) {
    return std::visit(overloaded{
                          [&](const DiscreteJoint& j) {
                              const auto& a = as_labeling(h, j.size(), "disagreement_mass");
                              const auto& b = as_labeling(h2, j.size(), "disagreement_mass");
                              double m = 0.0;
                              for (std::size_t i = 0; i < j.size(); ++i)
                                  if (a(i) != b(i)) m += j.mass[i];
                              return m;
                          },
                          [&](const ThresholdJoint& t) {
                              const auto& a = as_threshold_h(h, "disagreement_mass");
                              const auto& b = as_threshold_h(h2, "disagreement_mass");
                              const double dis = between(t.marginal, a.t, b.t);
                              return a.orientation == b.orientation ? dis : 1.0 - dis;
                          },
                      },
                      d);
}

Hypothesis best_in_class(const Distribution& d, const HypothesisClass& cls) {
    if (const auto* t = std::get_if<ThresholdJoint>(&d)) {
        if (cls.is_finite()) throw std::invalid_argument("best_in_class: threshold scenarios need the threshold class");
        if (cls.orientation() == t->bayes.orientation) return Threshold{t->bayes.t, cls.orientation()};
        // Opposite orientation: the best threshold sits at an end of the support.
        const Threshold below{t->marginal.lower() - 1.0, cls.orientation()};
        const Threshold above{t->marginal.upper() + 1.0, cls.orientation()};
        return true_risk(d, below) <= true_risk(d, above) ? below : above;
    }
    const auto& j = as_discrete(d, "best_in_class");
    if (!cls.is_finite()) throw std::invalid_argument("best_in_class: class is not enumerable over a discrete joint");
    if (cls.support_size() != j.size()) throw std::invalid_argument("best_in_class: class support differs from joint");
    const ProjectedClass pc(cls, {});
    return pc.hypothesis(argmin_index(pc.errors(population_tally(d, pc))));
}

double excess_risk(const Distribution& d, const Hypothesis& h, const HypothesisClass& cls) {
    return true_risk(d, h) - true_risk(d, best_in_class(d, cls));
}

CellTally population_tally(const Distribution& d, const ProjectedClass& pc) {
    CellTally t;
    t.neg.assign(pc.cell_count(), 0.0);
    t.pos.assign(pc.cell_count(), 0.0);
    t.normalizer = 1.0;
    if (pc.is_finite()) {
        const auto& j = as_discrete(d, "population_tally");
        if (j.size() != pc.cell_count()) throw std::invalid_argument("population_tally: class support differs from joint");
        for (std::size_t i = 0; i < j.size(); ++i) {
            t.pos[i] = j.mass[i] * j.eta[i];
            t.neg[i] = j.mass[i] * (1.0 - j.eta[i]);
        }
        return t;
    }
    const auto& tj = as_threshold(d, "population_tally");
    const auto& reps = pc.representatives();
    const double inf = std::numeric_limits<double>::infinity();
    const double cut = tj.bayes.t;
    const bool pos_above = tj.bayes.orientation == Orientation::positive_above;
    for (std::size_t i = 0; i < pc.cell_count(); ++i) {
        const double a = i == 0 ? -inf : reps[i - 1];
        const double b = i == reps.size() ? inf : reps[i];
        const double below = tj.marginal.interval_mass(a, std::min(b, cut));  // part with x <= cut
        const double above = tj.marginal.interval_mass(std::max(a, cut), b);
        t.pos[i] = pos_above ? above : below;
        t.neg[i] = pos_above ? below : above;
    }
    return t;
}

}  // namespace transferlab
