#include "transferlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "transferlab/rng.hpp"

namespace transferlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::vector<SignVector> full_cube(std::size_t d) {
    std::vector<SignVector> out;
    out.reserve(std::size_t{1} << d);
    // Index 0 is the all-ones vector, matching the packing's sigma_0.
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << d); ++m) {
        SignVector s(d);
        for (std::size_t i = 0; i < d; ++i) s[i] = ((m >> i) & 1U) ? -1 : 1;
        out.push_back(std::move(s));
    }
    return out;
}

void check_sigmas(const std::vector<SignVector>& sigmas, std::size_t d) {
    require(!sigmas.empty(), "family: no sign vectors");
    for (const auto& s : sigmas) {
        require(s.size() == d, "family: sign vector length differs from d");
        for (int v : s) require(v == 1 || v == -1, "family: sign entries must be -1 or +1");
    }
}

// Member pairs from per-coordinate marginal masses and eta offsets:
// eta(x_i) = 1/2 + sigma_i * offset_i / 2.
void fill_pairs(SigmaFamily& f, const std::vector<double>& mass_p, const std::vector<double>& off_p,
                const std::vector<double>& mass_q, const std::vector<double>& off_q, const Certified& cert) {
    f.pairs.clear();
    f.pairs.reserve(f.sigmas.size());
    for (const auto& s : f.sigmas) {
        std::vector<double> eta_p(f.d + 1, 1.0), eta_q(f.d + 1, 1.0);
        for (std::size_t i = 0; i < f.d; ++i) {
            eta_p[i + 1] = 0.5 + 0.5 * s[i] * off_p[i];
            eta_q[i + 1] = 0.5 + 0.5 * s[i] * off_q[i];
        }
        TransferPair pair;
        pair.p = DiscreteJoint::make(mass_p, std::move(eta_p));
        pair.q = DiscreteJoint::make(mass_q, std::move(eta_q));
        pair.certified = cert;
        f.pairs.push_back(std::move(pair));
    }
}

// Masses for x_0 and d equal points holding `tail` in total.
std::vector<double> split_mass(std::size_t d, double tail) {
    std::vector<double> m(d + 1, tail / static_cast<double>(d));
    m[0] = 1.0 - tail;
    return m;
}

double kl_general(double p, double q) {
    if (p == q) return 0.0;
    double out = 0.0;
    if (p > 0.0) out += q > 0.0 ? p * std::log(p / q) : kInf;
    if (p < 1.0) out += q < 1.0 ? (1.0 - p) * std::log((1.0 - p) / (1.0 - q)) : kInf;
    return out;
}

double joint_kl(const DiscreteJoint& a, const DiscreteJoint& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.mass[i] > 0.0) out += a.mass[i] * kl_general(a.eta[i], b.eta[i]);
    return out;
}

}  // namespace

Labeling sign_labeling(const SignVector& sigma) {
    std::uint64_t bits = 1;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (sigma[i] > 0) bits |= std::uint64_t{1} << (i + 1);
    return Labeling{bits, sigma.size() + 1};
}

HypothesisClass SigmaFamily::hypothesis_class() const {
    auto cls = HypothesisClass::all_labelings(d + 1, true);
    return HypothesisClass::finite(d + 1, cls.members(), params.d_H);
}

Labeling SigmaFamily::bayes(std::size_t i) const { return sign_labeling(sigmas.at(i)); }

double default_tau(double gamma) { return std::max(0.5, std::pow(0.5, 1.0 / gamma)); }

SigmaFamily build_theorem3_family(std::size_t d_H, double rho, double beta_P, double beta_Q, double epsilon,
                                  std::uint64_t seed, std::vector<SignVector> sigmas) {
    require(d_H >= 9, "two-level family: need d = d_H - 1 >= 8");
    require(d_H <= kMaxSupport, "two-level family: d_H larger than 64");
    require(epsilon > 0.0 && epsilon <= 0.5, "two-level family: epsilon must lie in (0, 1/2]");
    require(rho >= 1.0, "two-level family: rho must be >= 1");
    require(beta_P >= 0.0 && beta_P <= 1.0 && beta_Q >= 0.0 && beta_Q <= 1.0,
            "two-level family: betas must lie in [0, 1]");
    SigmaFamily f;
    f.form = FamilyForm::two_level;
    f.params = FamilyParams{d_H, rho, beta_P, beta_Q, epsilon, 0.0, 0.0, 0.0};
    f.d = d_H - 1;
    if (sigmas.empty()) sigmas = f.d <= kFullCubeMaxD ? full_cube(f.d) : vg_packing(f.d, seed);
    check_sigmas(sigmas, f.d);
    f.sigmas = std::move(sigmas);

    const auto mass_q = split_mass(f.d, std::pow(epsilon, beta_Q));
    const auto mass_p = split_mass(f.d, std::pow(epsilon, rho * beta_P));
    const std::vector<double> off_q(f.d, std::pow(epsilon, 1.0 - beta_Q));
    const std::vector<double> off_p(f.d, std::pow(epsilon, rho * (1.0 - beta_P)));
    Certified cert;
    cert.rho = rho;
    cert.C_rho = 1.0;
    cert.beta_P = beta_P;
    cert.beta_Q = beta_Q;
    cert.c_P = 1.0;
    cert.c_Q = 1.0;
    fill_pairs(f, mass_p, off_p, mass_q, off_q, cert);
    return f;
}

SigmaFamily build_theorem4_family(std::size_t d_H, double rho, double beta_P, double beta_Q, double eps1,
                                  double eps2, double tau, std::uint64_t seed, std::vector<SignVector> sigmas) {
    require(d_H >= 3, "two-block family: need d_H >= 3");
    require(d_H <= kMaxSupport, "two-block family: d_H larger than 64");
    require(beta_P > 0.0 && beta_P < 1.0 && beta_Q > 0.0 && beta_Q < 1.0, "two-block family: betas must lie in (0, 1)");
    require(rho >= std::max(1.0 / beta_P, 1.0 / beta_Q) * (1.0 - 1e-12),
            "two-block family: rho must be >= max(1/beta_P, 1/beta_Q)");
    require(eps1 > 0.0 && eps1 <= 0.5 && eps2 > 0.0 && eps2 <= 0.5, "two-block family: eps1, eps2 must lie in (0, 1/2]");
    const double gamma = rho * beta_P;
    if (tau <= 0.0) tau = default_tau(gamma);
    require(tau >= default_tau(gamma) && tau < 1.0, "two-block family: tau must lie in [max(1/2, (1/2)^(1/gamma)), 1)");

    SigmaFamily f;
    f.form = FamilyForm::two_block;
    f.params = FamilyParams{d_H, rho, beta_P, beta_Q, 0.0, eps1, eps2, tau};
    f.d = (d_H - 1) % 2 == 0 ? d_H - 1 : d_H - 2;
    if (sigmas.empty()) sigmas = f.d <= kFullCubeMaxD ? full_cube(f.d) : vg_packing(f.d, seed);
    check_sigmas(sigmas, f.d);
    f.sigmas = std::move(sigmas);

    const std::size_t half = f.d / 2;
    const double dd = static_cast<double>(f.d);
    const double q1 = std::pow(eps1, beta_Q), q2 = eps2 / tau;
    const double p1 = std::pow(eps1, gamma * beta_Q), p2 = std::pow(eps2, gamma);
    std::vector<double> mass_q(f.d + 1), mass_p(f.d + 1), off_q(f.d), off_p(f.d);
    mass_q[0] = 1.0 - 0.5 * (q1 + q2);
    mass_p[0] = 1.0 - 0.5 * (p1 + p2);
    for (std::size_t i = 0; i < f.d; ++i) {
        const bool first = i < half;
        mass_q[i + 1] = (first ? q1 : q2) / dd;
        mass_p[i + 1] = (first ? p1 : p2) / dd;
        off_q[i] = first ? std::pow(eps1, 1.0 - beta_Q) : tau;
        off_p[i] = first ? std::pow(eps1, (1.0 - beta_P) * rho * beta_Q) : std::pow(eps2, (1.0 - beta_P) * rho);
    }
    Certified cert;
    cert.rho = rho;
    cert.C_rho = 1.0;
    cert.gamma = gamma;
    cert.C_gamma = 2.0;
    cert.beta_P = beta_P;
    cert.beta_Q = beta_Q;
    cert.c_P = 1.0;
    cert.c_Q = 2.0;
    fill_pairs(f, mass_p, off_p, mass_q, off_q, cert);
    return f;
}

std::size_t hamming(const SignVector& a, const SignVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

std::vector<SignVector> vg_packing(std::size_t d, std::uint64_t seed) {
    require(d >= 8, "vg_packing: d must be >= 8");
    const std::size_t min_dist = (d + 7) / 8;
    const auto target = static_cast<std::size_t>(std::ceil(std::exp2(static_cast<double>(d) / 8.0))) + 1;
    std::vector<SignVector> out{SignVector(d, 1)};
    Rng rng(seed);
    const std::size_t max_attempts = 1000 * target + 100000;
    for (std::size_t attempt = 0; out.size() < target && attempt < max_attempts; ++attempt) {
        SignVector cand(d);
        for (auto& v : cand) v = (rng.next() >> 63) ? 1 : -1;
        const bool far = std::all_of(out.begin(), out.end(), [&](const SignVector& s) { return hamming(s, cand) >= min_dist; });
        if (far) out.push_back(std::move(cand));
    }
    if (out.size() < target) throw std::runtime_error("vg_packing: greedy search did not reach the packing size");
    return out;
}

double kl_bernoulli(double p, double q) {
    require(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0, "kl_bernoulli: arguments must lie in (0, 1)");
    return kl_general(p, q);
}

double chi2_bound(double epsilon, int z) {
    require(epsilon > 0.0 && epsilon < 1.0, "chi2_bound: epsilon must lie in (0, 1)");
    require(z == 1 || z == -1, "chi2_bound: z must be -1 or +1");
    const double p = 0.5 + 0.5 * z * epsilon;
    const double q = 0.5 - 0.5 * z * epsilon;
    const double a = 1.0 - p / q;
    const double b = 1.0 - (1.0 - p) / (1.0 - q);
    return q * a * a + (1.0 - q) * b * b;
}

double kl_chi2_constant() { return chi2_bound(0.5, 1) / 0.25; }

double kl_product(const SigmaFamily& family, std::size_t i, std::size_t j, double n_P, double n_Q) {
    const auto& a = family.pairs.at(i);
    const auto& b = family.pairs.at(j);
    if (i == j) return 0.0;
    const double kp = joint_kl(std::get<DiscreteJoint>(a.p), std::get<DiscreteJoint>(b.p));
    const double kq = joint_kl(std::get<DiscreteJoint>(a.q), std::get<DiscreteJoint>(b.q));
    return (n_P > 0.0 ? n_P * kp : 0.0) + (n_Q > 0.0 ? n_Q * kq : 0.0);
}

double minimax_epsilon(double n_P, double n_Q, std::size_t d_H, double rho, double beta_P, double beta_Q) {
    const double d = static_cast<double>(d_H);
    const double from_p = n_P > 0.0 ? std::pow(d / n_P, 1.0 / ((2.0 - beta_P) * rho)) : kInf;
    const double from_q = n_Q > 0.0 ? std::pow(d / n_Q, 1.0 / (2.0 - beta_Q)) : kInf;
    return std::min(from_p, from_q);
}

double lower_bound_epsilon(double n_P, double n_Q, std::size_t d_H, double rho, double beta_P, double beta_Q,
                           double c1) {
    require(c1 > 0.0, "lower_bound_epsilon: c1 must be positive");
    return std::min(0.5, c1 * minimax_epsilon(n_P, n_Q, d_H, rho, beta_P, beta_Q));
}

namespace {

// Halfplane through the origin with normal angle phi, restricted to ring angles.
std::uint64_t halfplane_labels(std::size_t m, double phi) {
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        if (std::cos(theta - phi) > 0.0) bits |= std::uint64_t{1} << k;
    }
    return bits;
}

std::vector<std::uint64_t> ring_members(std::size_t m) {
    std::vector<std::uint64_t> out;
    for (std::size_t j = 0; j < 2 * m; ++j) {
        const double phi = (static_cast<double>(j) + 0.5) * std::numbers::pi / static_cast<double>(m);
        const std::uint64_t ring = halfplane_labels(m, phi);
        const std::uint64_t both = ring | (ring << m);  // same angle, same label on both rings
        if (std::find(out.begin(), out.end(), both) == out.end()) out.push_back(both);
    }
    return out;
}

Certified noiseless_cert(double gamma, double C_gamma) {
    Certified c;
    c.rho = gamma;
    c.C_rho = C_gamma;
    c.gamma = gamma;
    c.C_gamma = C_gamma;
    c.beta_P = 1.0;
    c.beta_Q = 1.0;
    c.c_P = 1.0;
    c.c_Q = 1.0;
    return c;
}

}  // namespace

TransferPair example_scenario(int id, const ExampleParams& params) {
    TransferPair pair;
    const Threshold at_zero{0.0, Orientation::positive_above};
    switch (id) {
        case 1: {
            const std::size_t m = params.ring_points;
            require(m >= 4 && m % 2 == 0 && 2 * m <= kMaxSupport, "example 1: ring_points must be even, in [4, 32]");
            const std::uint64_t truth = ring_members(m).front();
            std::vector<double> mass_p(2 * m, 0.0), mass_q(2 * m, 0.0), eta(2 * m), coord(2 * m);
            for (std::size_t k = 0; k < 2 * m; ++k) {
                (k < m ? mass_p : mass_q)[k] = 1.0 / static_cast<double>(m);
                eta[k] = static_cast<double>((truth >> k) & 1U);
                coord[k] = 2.0 * std::numbers::pi * static_cast<double>(k % m) / static_cast<double>(m);
            }
            pair.p = DiscreteJoint::make(mass_p, eta, coord);
            pair.q = DiscreteJoint::make(mass_q, eta, coord);
            pair.certified = noiseless_cert(1.0, 1.0);
            pair.name = "example1";
            return pair;
        }
        case 2:
            pair.p = ThresholdJoint{ContinuousMarginal::uniform(0.0, 2.0), Threshold{0.5, Orientation::positive_above}};
            pair.q = ThresholdJoint{ContinuousMarginal::uniform(0.0, 1.0), Threshold{0.5, Orientation::positive_above}};
            pair.certified = noiseless_cert(1.0, 2.0);
            pair.name = "example2";
            return pair;
        case 3: {
            const double g = params.gamma;
            require(g >= 1.0, "example 3: gamma must be >= 1");
            pair.p = ThresholdJoint{ContinuousMarginal({DensityPiece{-1.0, 0.0, 0.5, 1.0, false},
                                                        DensityPiece{0.0, 1.0, 0.5, g, false}}),
                                    at_zero};
            pair.q = ThresholdJoint{ContinuousMarginal::uniform(-1.0, 1.0), at_zero};
            pair.certified = noiseless_cert(g, 1.0);
            pair.name = "example3";
            return pair;
        }
        case 4: {
            const double g = params.gamma;
            require(g > 0.0 && g < 1.0, "example 4: gamma must lie in (0, 1)");
            pair.p = ThresholdJoint{ContinuousMarginal({DensityPiece{-1.0, 0.0, 0.5, g, true},
                                                        DensityPiece{0.0, 1.0, 0.5, g, false}}),
                                    at_zero};
            pair.q = ThresholdJoint{ContinuousMarginal::uniform(-1.0, 1.0), at_zero};
            pair.certified = noiseless_cert(g, std::pow(2.0, 1.0 - g));
            pair.name = "example4";
            return pair;
        }
        default:
            throw std::invalid_argument("example_scenario: id must be 1, 2, 3 or 4");
    }
}

HypothesisClass example_class(int id, const ExampleParams& params) {
    if (id == 1) {
        const std::size_t m = params.ring_points;
        require(m >= 4 && m % 2 == 0 && 2 * m <= kMaxSupport, "example 1: ring_points must be even, in [4, 32]");
        return HypothesisClass::finite(2 * m, ring_members(m), 2);
    }
    if (id < 1 || id > 4) throw std::invalid_argument("example_class: id must be 1, 2, 3 or 4");
    return HypothesisClass::thresholds(Orientation::positive_above);
}

TransferPair rcs_violating_pair(double gap) {
    require(gap > 0.0 && gap < 0.6, "rcs_violating_pair: gap must lie in (0, 0.6)");
    TransferPair pair;
    pair.p = DiscreteJoint::make({0.4, 0.4, 0.2}, {1.0, 0.0, 0.0});
    pair.q = DiscreteJoint::make({0.6 - gap, 0.4, gap}, {1.0, 0.0, 1.0});
    pair.name = "rcs_violating";
    return pair;
}

}  // namespace transferlab
