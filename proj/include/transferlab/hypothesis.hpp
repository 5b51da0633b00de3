#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace transferlab {

// Finite supports are encoded as bit masks.
inline constexpr std::size_t kMaxSupport = 64;

struct SupportPoint {
    std::size_t index = 0;
    double coordinate = 0.0;  // only meaningful for threshold scenarios
};

// Label pattern over a finite support; bit i is the label of support point i.
struct Labeling {
    std::uint64_t bits = 0;
    std::size_t size = 0;

    int operator()(std::size_t i) const { return static_cast<int>((bits >> i) & 1U); }
    friend bool operator==(const Labeling&, const Labeling&) = default;
};

enum class Orientation { positive_above, positive_below };

// One-sided threshold. positive_above: x > t -> 1; positive_below: x <= t -> 1.
struct Threshold {
    double t = 0.0;
    Orientation orientation = Orientation::positive_above;

    int operator()(double x) const {
        const bool above = x > t;
        return (orientation == Orientation::positive_above) == above ? 1 : 0;
    }
    friend bool operator==(const Threshold&, const Threshold&) = default;
};

using Hypothesis = std::variant<Labeling, Threshold>;

// For a Labeling, x is a support index stored as a double.
int predict(const Hypothesis& h, double x);

struct LabeledSample {
    std::vector<double> x;
    std::vector<std::uint8_t> y;
    std::uint64_t seed = 0;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }
    void push_back(double xi, int yi) {
        x.push_back(xi);
        y.push_back(static_cast<std::uint8_t>(yi != 0));
    }
    void append(const LabeledSample& other) {
        x.insert(x.end(), other.x.begin(), other.x.end());
        y.insert(y.end(), other.y.begin(), other.y.end());
    }
};

struct UnlabeledSample {
    std::vector<double> x;
    std::uint64_t seed = 0;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }
};

class HypothesisClass {
public:
    enum class Kind { finite, threshold };

    // Members are label masks over `support_size` points. Duplicate patterns
    // and bits outside the support are rejected.
    static HypothesisClass finite(std::size_t support_size, std::vector<std::uint64_t> members,
                                  std::size_t vc_dim, std::vector<double> representatives = {});

    // Every labeling of the support, in increasing mask order. With
    // pin_first_positive only patterns labelling point 0 as 1 are kept.
    // d_H is the support size: the support is a shattered set.
    static HypothesisClass all_labelings(std::size_t support_size, bool pin_first_positive = false);

    static HypothesisClass thresholds(Orientation orientation = Orientation::positive_above);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    std::size_t vc_dim() const { return vc_dim_; }
    Orientation orientation() const { return orientation_; }

    // Finite kind only.
    std::size_t support_size() const;
    std::size_t size() const;
    const std::vector<std::uint64_t>& members() const;
    std::shared_ptr<const std::vector<std::uint64_t>> shared_members() const { return members_; }
    Hypothesis member(std::size_t i) const;
    // Threshold realizing each member, when the class came from project_class.
    const std::vector<double>& representatives() const { return representatives_; }

private:
    Kind kind_ = Kind::threshold;
    std::size_t support_size_ = 0;
    std::size_t vc_dim_ = 1;
    Orientation orientation_ = Orientation::positive_above;
    // Shared so that copies and projections of large classes stay cheap.
    std::shared_ptr<const std::vector<std::uint64_t>> members_;
    std::vector<double> representatives_;
};

// (1/|S|) #{(x, y) in S : h(x) != y}; 0 on an empty sample.
double empirical_risk(const Hypothesis& h, const LabeledSample& s);

// Fraction of points where h and h2 disagree; 0 on an empty list.
double empirical_disagreement(const Hypothesis& h, const Hypothesis& h2, std::span<const double> xs);

// Finite class realizing every labeling the threshold class induces on
// `points` (sorted, duplicates collapsed). Member j is realized by
// representatives()[j]. Throws on empty input or more than kMaxSupport
// distinct points.
HypothesisClass project_class(const HypothesisClass& cls, std::span<const double> points);

// Empirical risk minimizer. Ties go to the lowest enumeration index, which
// for thresholds is the smallest representative threshold.
Hypothesis erm(const HypothesisClass& cls, const LabeledSample& s);

}  // namespace transferlab
