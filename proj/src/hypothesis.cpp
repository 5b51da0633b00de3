#include "transferlab/hypothesis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "transferlab/projection.hpp"

namespace transferlab {

int predict(const Hypothesis& h, double x) {
    if (const auto* lab = std::get_if<Labeling>(&h)) {
        const auto i = static_cast<std::size_t>(x);
        if (x < 0.0 || i >= lab->size) throw std::out_of_range("predict: support index out of range");
        return (*lab)(i);
    }
    return std::get<Threshold>(h)(x);
}

HypothesisClass HypothesisClass::finite(std::size_t support_size, std::vector<std::uint64_t> members,
                                        std::size_t vc_dim, std::vector<double> representatives) {
    if (support_size == 0 || support_size > kMaxSupport)
        throw std::invalid_argument("finite class: support size must be in [1, 64]");
    if (members.empty()) throw std::invalid_argument("finite class: no members");
    if (vc_dim < 1) throw std::invalid_argument("finite class: d_H must be >= 1");
    if (!representatives.empty() && representatives.size() != members.size())
        throw std::invalid_argument("finite class: one representative per member");
    const std::uint64_t outside = support_size == 64 ? 0 : ~((std::uint64_t{1} << support_size) - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(members.size());
    for (std::uint64_t m : members) {
        if (m & outside) throw std::invalid_argument("finite class: label bits outside the support");
        if (!seen.insert(m).second) throw std::invalid_argument("finite class: duplicate label pattern");
    }
    HypothesisClass c;
    c.kind_ = Kind::finite;
    c.support_size_ = support_size;
    c.vc_dim_ = vc_dim;
    c.members_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(members));
    c.representatives_ = std::move(representatives);
    return c;
}

HypothesisClass HypothesisClass::all_labelings(std::size_t support_size, bool pin_first_positive) {
    if (support_size == 0 || support_size > 24)
        throw std::invalid_argument("all_labelings: support size must be in [1, 24]");
    std::vector<std::uint64_t> members;
    const std::uint64_t count = std::uint64_t{1} << support_size;
    members.reserve(pin_first_positive ? count / 2 : count);
    for (std::uint64_t m = 0; m < count; ++m) {
        if (pin_first_positive && !(m & 1U)) continue;
        members.push_back(m);
    }
    return finite(support_size, std::move(members), support_size);
}

HypothesisClass HypothesisClass::thresholds(Orientation orientation) {
    HypothesisClass c;
    c.kind_ = Kind::threshold;
    c.vc_dim_ = 1;
    c.orientation_ = orientation;
    return c;
}

std::size_t HypothesisClass::support_size() const {
    if (!is_finite()) throw std::logic_error("threshold class has no finite support");
    return support_size_;
}

std::size_t HypothesisClass::size() const {
    if (!is_finite()) throw std::logic_error("threshold class is not enumerable without projection");
    return members_->size();
}

const std::vector<std::uint64_t>& HypothesisClass::members() const {
    if (!is_finite()) throw std::logic_error("threshold class is not enumerable without projection");
    return *members_;
}

Hypothesis HypothesisClass::member(std::size_t i) const {
    return Labeling{members().at(i), support_size_};
}

double empirical_risk(const Hypothesis& h, const LabeledSample& s) {
    if (s.empty()) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < s.size(); ++i) wrong += predict(h, s.x[i]) != s.y[i];
    return static_cast<double>(wrong) / static_cast<double>(s.size());
}

double empirical_disagreement(const Hypothesis& h, const Hypothesis& h2, std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    std::size_t differ = 0;
    for (double x : xs) differ += predict(h, x) != predict(h2, x);
    return static_cast<double>(differ) / static_cast<double>(xs.size());
}

HypothesisClass project_class(const HypothesisClass& cls, std::span<const double> points) {
    if (points.empty()) throw std::invalid_argument("project_class: no points");
    if (cls.is_finite()) return cls;
    const std::span<const double> sets[] = {points};
    const ProjectedClass pc(cls, std::span<const std::span<const double>>(sets));
    const std::size_t cells = pc.cell_count();
    // Cells 0 and cells-1 hold no points; points occupy cells 1..m.
    const std::size_t m = cells - 2;
    if (m > kMaxSupport) throw std::invalid_argument("project_class: more than 64 distinct points");
    std::vector<std::uint64_t> masks;
    masks.reserve(pc.size());
    for (std::size_t j = 0; j < pc.size(); ++j) {
        std::uint64_t bits = 0;
        for (std::size_t k = 0; k < m; ++k)
            if (pc.label(j, k + 1)) bits |= std::uint64_t{1} << k;
        masks.push_back(bits);
    }
    return HypothesisClass::finite(m, std::move(masks), 1, pc.representatives());
}

Hypothesis erm(const HypothesisClass& cls, const LabeledSample& s) {
    const ProjectedClass pc(cls, {std::span<const double>(s.x)});
    const auto errs = pc.errors(pc.tally(s));
    return pc.hypothesis(argmin_index(errs));
}

}  // namespace transferlab
