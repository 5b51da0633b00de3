#include "transferlab/projection.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace transferlab {

namespace {

// Representative strictly inside [a, b) so that a sorts below or on it and b above.
double split_point(double a, double b) {
    const double mid = a + (b - a) / 2.0;
    return mid >= b ? a : mid;
}

// Sum over 8-bit chunks of a mask via per-chunk lookup tables.
class ChunkTables {
public:
    // Cells are split into equal chunks of at most 8; table[c][b] = sum over
    // cells w c + j of set_value where bit j of b is set, plus clear_value
    // (when given) where it is clear.
    ChunkTables(std::size_t cells, const std::vector<double>& set_value, const std::vector<double>* clear_value)
        : chunks_((cells + 7) / 8), width_((cells + chunks_ - 1) / chunks_), table_(chunks_) {
        for (std::size_t c = 0; c < chunks_; ++c) {
            const std::size_t first = width_ * c;
            const std::size_t width = std::min(width_, cells - first);
            auto& t = table_[c];
            double base = 0.0;
            std::array<double, 8> delta{};
            for (std::size_t j = 0; j < width; ++j) {
                const double clear = clear_value ? (*clear_value)[first + j] : 0.0;
                base += clear;
                delta[j] = set_value[first + j] - clear;
            }
            t[0] = base;
            // Each entry extends the entry without its highest set bit.
            for (std::size_t b = 1; b < (std::size_t{1} << width); ++b) {
                const int high = std::bit_width(b) - 1;
                t[b] = t[b ^ (std::size_t{1} << high)] + delta[high];
            }
        }
    }

    const std::array<double, 256>& chunk(std::size_t c) const { return table_[c]; }
    std::size_t chunks() const { return chunks_; }
    std::size_t width() const { return width_; }

private:
    std::size_t chunks_;
    std::size_t width_;
    std::vector<std::array<double, 256>> table_;
};

bool use_tables(std::size_t members, std::size_t cells) {
    return members * cells > 2048 * ((cells + 7) / 8);
}

double finish_sum(double acc, double norm) { return norm == 1.0 ? acc : (norm > 0.0 ? acc / norm : 0.0); }

// Up to three sums share one walk over the masks.
template <std::size_t Chunks, std::size_t Specs>
void sum_group(const std::vector<std::uint64_t>& masks, const ChunkTables* tables, double* const* dst) {
    std::array<std::array<const double*, Chunks>, Specs> tab;
    for (std::size_t s = 0; s < Specs; ++s)
        for (std::size_t c = 0; c < Chunks; ++c) tab[s][c] = tables[s].chunk(c).data();
    const std::size_t w = tables[0].width();
    const std::uint64_t low = (std::uint64_t{1} << w) - 1;
    const std::uint64_t* m = masks.data();
    for (std::size_t j = 0; j < masks.size(); ++j) {
        const std::uint64_t mask = m[j];
        for (std::size_t s = 0; s < Specs; ++s) {
            double acc = tab[s][0][mask & low];
            for (std::size_t c = 1; c < Chunks; ++c) acc += tab[s][c][(mask >> (w * c)) & low];
            dst[s][j] = acc;
        }
    }
}

template <std::size_t Chunks>
void sum_chunks(const std::vector<std::uint64_t>& masks, const std::vector<ChunkTables>& tables,
                const std::vector<double>& norms, std::vector<std::vector<double>>& out) {
    std::vector<double*> dst;
    for (auto& o : out) dst.push_back(o.data());
    for (std::size_t s = 0; s < tables.size();) {
        switch (std::min<std::size_t>(3, tables.size() - s)) {
            case 1: sum_group<Chunks, 1>(masks, &tables[s], &dst[s]); s += 1; break;
            case 2: sum_group<Chunks, 2>(masks, &tables[s], &dst[s]); s += 2; break;
            default: sum_group<Chunks, 3>(masks, &tables[s], &dst[s]); s += 3; break;
        }
    }
    for (std::size_t s = 0; s < tables.size(); ++s)
        if (norms[s] != 1.0)
            for (double& x : out[s]) x = finish_sum(x, norms[s]);
}

}  // namespace

CellMass total_mass(const CellTally& tally) {
    CellMass m;
    m.normalizer = tally.normalizer;
    m.weight.resize(tally.neg.size());
    for (std::size_t i = 0; i < m.weight.size(); ++i) m.weight[i] = tally.neg[i] + tally.pos[i];
    return m;
}

ProjectedClass::ProjectedClass(const HypothesisClass& cls, std::initializer_list<std::span<const double>> point_sets)
    : ProjectedClass(cls, std::span<const std::span<const double>>(point_sets.begin(), point_sets.size())) {}

ProjectedClass::ProjectedClass(const HypothesisClass& cls, std::span<const std::span<const double>> point_sets) {
    vc_dim_ = cls.vc_dim();
    if (cls.is_finite()) {
        finite_ = true;
        support_size_ = cls.support_size();
        masks_ = cls.shared_members();
        return;
    }
    finite_ = false;
    orientation_ = cls.orientation();
    std::vector<double> pts;
    for (auto set : point_sets) pts.insert(pts.end(), set.begin(), set.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) {
        reps_ = {0.0};
        return;
    }
    reps_.reserve(pts.size() + 1);
    reps_.push_back(pts.front() - 1.0);
    for (std::size_t k = 1; k < pts.size(); ++k) reps_.push_back(split_point(pts[k - 1], pts[k]));
    reps_.push_back(pts.back() + 1.0);
}

ProjectedClass ProjectedClass::over_thresholds(Orientation orientation, std::vector<double> representatives) {
    if (representatives.empty()) throw std::invalid_argument("over_thresholds: no representatives");
    if (!std::is_sorted(representatives.begin(), representatives.end()) ||
        std::adjacent_find(representatives.begin(), representatives.end()) != representatives.end())
        throw std::invalid_argument("over_thresholds: representatives must be sorted and distinct");
    ProjectedClass pc;
    pc.finite_ = false;
    pc.orientation_ = orientation;
    pc.reps_ = std::move(representatives);
    return pc;
}

std::size_t ProjectedClass::cell_count() const { return finite_ ? support_size_ : reps_.size() + 1; }

std::size_t ProjectedClass::cell_of(double x) const {
    if (finite_) {
        const auto i = static_cast<std::size_t>(x);
        if (x < 0.0 || i >= support_size_) throw std::out_of_range("cell_of: support index out of range");
        return i;
    }
    return static_cast<std::size_t>(std::lower_bound(reps_.begin(), reps_.end(), x) - reps_.begin());
}

int ProjectedClass::label(std::size_t member, std::size_t cell) const {
    if (finite_) return static_cast<int>(((*masks_)[member] >> cell) & 1U);
    const bool above = cell > member;
    return (orientation_ == Orientation::positive_above) == above ? 1 : 0;
}

Hypothesis ProjectedClass::hypothesis(std::size_t member) const {
    if (finite_) return Labeling{masks_->at(member), support_size_};
    return Threshold{reps_.at(member), orientation_};
}

CellTally ProjectedClass::tally(const LabeledSample& s) const {
    CellTally t;
    t.neg.assign(cell_count(), 0.0);
    t.pos.assign(cell_count(), 0.0);
    t.normalizer = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) (s.y[i] ? t.pos : t.neg)[cell_of(s.x[i])] += 1.0;
    return t;
}

CellTally ProjectedClass::tally(const LabeledSample& s, std::span<const double> weights) const {
    if (weights.size() != s.size()) throw std::invalid_argument("tally: one weight per point");
    CellTally t;
    t.neg.assign(cell_count(), 0.0);
    t.pos.assign(cell_count(), 0.0);
    t.normalizer = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) (s.y[i] ? t.pos : t.neg)[cell_of(s.x[i])] += weights[i];
    return t;
}

CellMass ProjectedClass::mass(std::span<const double> xs) const {
    CellMass m;
    m.weight.assign(cell_count(), 0.0);
    m.normalizer = static_cast<double>(xs.size());
    for (double x : xs) m.weight[cell_of(x)] += 1.0;
    return m;
}

CellMass ProjectedClass::mass(std::span<const double> xs, std::span<const double> weights) const {
    if (weights.size() != xs.size()) throw std::invalid_argument("mass: one weight per point");
    CellMass m;
    m.weight.assign(cell_count(), 0.0);
    m.normalizer = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) m.weight[cell_of(xs[i])] += weights[i];
    return m;
}

std::vector<double> ProjectedClass::errors(const CellTally& tally) const {
    const std::size_t cells = cell_count();
    if (tally.neg.size() != cells || tally.pos.size() != cells)
        throw std::invalid_argument("errors: tally built for a different projection");
    std::vector<double> out(size(), 0.0);
    if (tally.normalizer <= 0.0) return out;

    if (finite_) {
        // A member labelling cell k as 1 errs on the neg weight there.
        const CellSum spec{tally.neg, tally.pos, tally.normalizer};
        return std::move(member_sums(std::span<const CellSum>(&spec, 1)).front());
    }

    // Member j labels cells i > j as 1 (positive_above) or cells i <= j as 1.
    const bool above = orientation_ == Orientation::positive_above;
    const std::vector<double>& low_wrong = above ? tally.pos : tally.neg;   // cells i <= j
    const std::vector<double>& high_wrong = above ? tally.neg : tally.pos;  // cells i > j
    std::vector<double> suffix(cells + 1, 0.0);
    for (std::size_t i = cells; i-- > 0;) suffix[i] = suffix[i + 1] + high_wrong[i];
    double prefix = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        prefix += low_wrong[j];
        out[j] = (prefix + suffix[j + 1]) / tally.normalizer;
    }
    return out;
}

std::vector<double> ProjectedClass::disagreements(std::size_t reference, const CellMass& mass) const {
    const std::size_t cells = cell_count();
    if (mass.weight.size() != cells) throw std::invalid_argument("disagreements: mass built for a different projection");
    if (reference >= size()) throw std::out_of_range("disagreements: reference member out of range");
    std::vector<double> out(size(), 0.0);
    if (mass.normalizer <= 0.0) return out;

    if (finite_) {
        CellSum spec{mass.weight, mass.weight, mass.normalizer};
        for (std::size_t k = 0; k < cells; ++k) (((*masks_)[reference] >> k) & 1U ? spec.set_value : spec.clear_value)[k] = 0.0;
        return std::move(member_sums(std::span<const CellSum>(&spec, 1)).front());
    }

    // Members j and r differ exactly on cells min(j, r) < i <= max(j, r).
    double acc = 0.0;
    for (std::size_t j = reference + 1; j < out.size(); ++j) {
        acc += mass.weight[j];
        out[j] = acc / mass.normalizer;
    }
    acc = 0.0;
    for (std::size_t j = reference; j-- > 0;) {
        acc += mass.weight[j + 1];
        out[j] = acc / mass.normalizer;
    }
    return out;
}

std::vector<std::vector<double>> ProjectedClass::member_sums(std::span<const CellSum> specs) const {
    if (!finite_) throw std::logic_error("member_sums: finite projections only");
    const std::size_t cells = cell_count();
    for (const auto& sp : specs)
        if (sp.set_value.size() != cells || sp.clear_value.size() != cells)
            throw std::invalid_argument("member_sums: weights built for a different projection");
    std::vector<std::vector<double>> out(specs.size());
    for (auto& o : out) o.resize(masks_->size());
    if (!use_tables(masks_->size(), cells)) {
        for (std::size_t s = 0; s < specs.size(); ++s) {
            const auto& sp = specs[s];
            for (std::size_t j = 0; j < masks_->size(); ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < cells; ++k) acc += (((*masks_)[j] >> k) & 1U) ? sp.set_value[k] : sp.clear_value[k];
                out[s][j] = finish_sum(acc, sp.normalizer);
            }
        }
        return out;
    }

    std::vector<ChunkTables> tables;
    tables.reserve(specs.size());
    for (const auto& sp : specs) tables.emplace_back(cells, sp.set_value, &sp.clear_value);
    std::vector<double> norms;
    for (const auto& sp : specs) norms.push_back(sp.normalizer);
    switch (tables.front().chunks()) {
        case 1: sum_chunks<1>(*masks_, tables, norms, out); break;
        case 2: sum_chunks<2>(*masks_, tables, norms, out); break;
        case 3: sum_chunks<3>(*masks_, tables, norms, out); break;
        case 4: sum_chunks<4>(*masks_, tables, norms, out); break;
        case 5: sum_chunks<5>(*masks_, tables, norms, out); break;
        case 6: sum_chunks<6>(*masks_, tables, norms, out); break;
        case 7: sum_chunks<7>(*masks_, tables, norms, out); break;
        default: sum_chunks<8>(*masks_, tables, norms, out); break;
    }
    return out;
}

std::size_t argmin_index(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmin_index: empty");
    // Four independent running minima keep the scan free of a serial
    // dependency; a second pass finds the first index holding the minimum.
    // NaNs never replace a running minimum, as with a plain `<` scan.
    const double* v = values.data();
    const std::size_t n = values.size();
    if (std::isnan(v[0])) return 0;
    auto keep_min = [](double x, double m) { return x < m ? x : m; };
    double m0 = v[0], m1 = v[0], m2 = v[0], m3 = v[0];
    std::size_t i = 1;
    for (; i + 4 <= n; i += 4) {
        m0 = keep_min(v[i], m0);
        m1 = keep_min(v[i + 1], m1);
        m2 = keep_min(v[i + 2], m2);
        m3 = keep_min(v[i + 3], m3);
    }
    for (; i < n; ++i) m0 = keep_min(v[i], m0);
    const double best = std::min(std::min(m0, m1), std::min(m2, m3));
    std::size_t j = 0;
    while (!(v[j] == best)) ++j;
    return j;
}

}  // namespace transferlab
