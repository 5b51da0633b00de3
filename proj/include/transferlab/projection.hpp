#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "transferlab/hypothesis.hpp"

namespace transferlab {

// Per-cell weight of points labelled 0 (neg) and 1 (pos). Every per-member
// quantity is a sum over cells divided by `normalizer`; a zero normalizer
// makes every quantity 0.
struct CellTally {
    std::vector<double> neg;
    std::vector<double> pos;
    double normalizer = 0.0;
};

// Per-cell weight for disagreement masses.
struct CellMass {
    std::vector<double> weight;
    double normalizer = 0.0;
};

CellMass total_mass(const CellTally& tally);

// Per-member sum of set_value over cells the member labels 1 and
// clear_value over cells it labels 0, divided by normalizer.
struct CellSum {
    std::vector<double> set_value;
    std::vector<double> clear_value;
    double normalizer = 1.0;
};

// A class restricted to a finite set of cells on which every member is
// constant. Finite classes use the support points as cells. Threshold
// classes are cut at a sorted list of representative thresholds r_0 < ... <
// r_{M-1}; cell i is (r_{i-1}, r_i] and member j is the threshold at r_j.
//
// All empirical and population quantities the procedures need reduce to
// per-member sums over cells, computed here in O(members * cells) for finite
// classes and O(members) for thresholds.
class ProjectedClass {
public:
    // Threshold classes are projected onto the union of `point_sets`
    // (representatives at midpoints between distinct points plus one below
    // and one above); finite classes ignore the points.
    ProjectedClass(const HypothesisClass& cls, std::span<const std::span<const double>> point_sets);
    ProjectedClass(const HypothesisClass& cls, std::initializer_list<std::span<const double>> point_sets);

    // Threshold class with explicit representatives (sorted, distinct).
    static ProjectedClass over_thresholds(Orientation orientation, std::vector<double> representatives);

    bool is_finite() const { return finite_; }
    std::size_t size() const { return finite_ ? masks_->size() : reps_.size(); }
    std::size_t cell_count() const;
    std::size_t cell_of(double x) const;
    int label(std::size_t member, std::size_t cell) const;
    Hypothesis hypothesis(std::size_t member) const;
    const std::vector<double>& representatives() const { return reps_; }
    Orientation orientation() const { return orientation_; }
    std::size_t vc_dim() const { return vc_dim_; }

    CellTally tally(const LabeledSample& s) const;
    // Each point carries weights[i] instead of 1.
    CellTally tally(const LabeledSample& s, std::span<const double> weights) const;
    CellMass mass(std::span<const double> xs) const;
    CellMass mass(std::span<const double> xs, std::span<const double> weights) const;

    // Weighted share of mislabeled points, per member.
    std::vector<double> errors(const CellTally& tally) const;
    // Weighted share of points where the member disagrees with `reference`.
    std::vector<double> disagreements(std::size_t reference, const CellMass& mass) const;
    // Several finite-class sums in one pass over the members.
    std::vector<std::vector<double>> member_sums(std::span<const CellSum> specs) const;

private:
    ProjectedClass() = default;

    bool finite_ = true;
    std::size_t vc_dim_ = 1;
    std::size_t support_size_ = 0;
    std::shared_ptr<const std::vector<std::uint64_t>> masks_;
    Orientation orientation_ = Orientation::positive_above;
    std::vector<double> reps_;
};

// Lowest index attaining the minimum.
std::size_t argmin_index(std::span<const double> values);

}  // namespace transferlab
