#pragma once

// Energy spectra, Gibbs weights, beta-ordering and (thermo)majorization curves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "numeric.hpp"

namespace thermolocc {

/// Hamiltonian eigenvalues, stored ascending.
class EnergySpectrum {
public:
    EnergySpectrum() = default;
    explicit EnergySpectrum(std::vector<double> energies) : e_(std::move(energies)) {
        if (e_.size() < 2) throw Error("energy spectrum needs at least two levels");
        for (double x : e_)
            if (!std::isfinite(x)) throw Error("energy levels must be finite");
        std::sort(e_.begin(), e_.end());
    }
    EnergySpectrum(std::initializer_list<double> energies)
        : EnergySpectrum(std::vector<double>(energies)) {}

    std::size_t dimension() const { return e_.size(); }
    double operator[](std::size_t i) const { return e_[i]; }
    const std::vector<double>& energies() const { return e_; }
    double spread() const { return e_.back() - e_.front(); }

    bool level_degenerate(std::size_t i) const {
        double tol = 1e-12 * std::max(1.0, std::abs(spread()));
        return (i > 0 && e_[i] - e_[i - 1] <= tol) || (i + 1 < e_.size() && e_[i + 1] - e_[i] <= tol);
    }
    bool has_degeneracy() const {
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (level_degenerate(i)) return true;
        return false;
    }

private:
    std::vector<double> e_;
};

/// beta >= 0, or the symbolic zero-temperature value.
class InverseTemperature {
public:
    InverseTemperature() = default;
    InverseTemperature(double beta) : beta_(beta) {
        if (!(beta >= 0.0) || std::isinf(beta)) {
            if (std::isinf(beta) && beta > 0) {
                infinite_ = true;
                beta_ = 0.0;
                return;
            }
            throw Error("inverse temperature must be non-negative");
        }
    }
    static InverseTemperature infinity() {
        InverseTemperature b;
        b.infinite_ = true;
        return b;
    }

    bool is_infinite() const { return infinite_; }
    double value() const {
        if (infinite_) throw Error("inverse temperature is infinite");
        return beta_;
    }
    std::string str() const { return infinite_ ? "inf" : std::to_string(beta_); }

private:
    double beta_ = 0.0;
    bool infinite_ = false;
};

/// Population vector of an energy-incoherent state.
class ProbVector {
public:
    ProbVector() = default;
    explicit ProbVector(Eigen::VectorXd p) : p_(std::move(p)) {
        if (p_.size() == 0) throw Error("probability vector is empty");
        for (Eigen::Index i = 0; i < p_.size(); ++i) {
            if (!std::isfinite(p_[i])) throw Error("probability entries must be finite");
            if (p_[i] < -kNormTol) throw Error("negative probability entry");
            if (p_[i] < 0.0) p_[i] = 0.0;
        }
        if (std::abs(p_.sum() - 1.0) > kNormTol) throw Error("probability vector does not sum to 1");
    }
    explicit ProbVector(const std::vector<double>& p)
        : ProbVector(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(p.data(), p.size()))) {}
    ProbVector(std::initializer_list<double> p) : ProbVector(std::vector<double>(p)) {}

    static ProbVector sharp(std::size_t d, std::size_t i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[i] = 1.0;
        return ProbVector(v);
    }
    static ProbVector flat(std::size_t d) {
        return ProbVector(Eigen::VectorXd::Constant(d, 1.0 / d).eval());
    }
    /// Rescales a non-negative vector to unit sum (for results that carry rounding).
    static ProbVector normalised(Eigen::VectorXd v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (v[i] < 0.0 && v[i] >= -1e-9) v[i] = 0.0;
        double s = v.sum();
        if (!(s > 0.0)) throw Error("cannot normalise a zero vector");
        return ProbVector((v / s).eval());
    }

    std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t i) const { return p_[static_cast<Eigen::Index>(i)]; }
    const Eigen::VectorXd& values() const { return p_; }
    std::vector<double> to_vector() const { return {p_.data(), p_.data() + p_.size()}; }

private:
    Eigen::VectorXd p_;
};

inline double shannon_entropy(const ProbVector& p) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    return h;
}

/// Thermal distribution. At zero temperature `gamma` is the ground-state point mass
/// and the relations built on it switch to their cooling limits.
struct GibbsWeights {
    ProbVector gamma;
    bool zero_temperature = false;

    std::size_t size() const { return gamma.size(); }
    double operator[](std::size_t i) const { return gamma[i]; }

    /// Wraps an explicit full-rank reference distribution (e.g. a product of local Gibbs states).
    static GibbsWeights from_reference(ProbVector g) {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!(g[i] > 0.0)) throw Error("reference Gibbs weights must be strictly positive");
        return {std::move(g), false};
    }
};

inline GibbsWeights gibbs_weights(const EnergySpectrum& spectrum, const InverseTemperature& beta) {
    const std::size_t d = spectrum.dimension();
    if (beta.is_infinite()) {
        if (spectrum.level_degenerate(0)) throw Error("degenerate ground state");
        return {ProbVector::sharp(d, 0), true};
    }
    if (beta.value() == 0.0) return {ProbVector::flat(d), false};
    Eigen::VectorXd w(d);
    const double e0 = spectrum[0];
    for (std::size_t i = 0; i < d; ++i) w[i] = std::exp(-beta.value() * (spectrum[i] - e0));
    w /= w.sum();
    for (std::size_t i = 0; i < d; ++i)
        if (!(w[i] > 0.0)) throw Error("Gibbs weight underflow; use the zero-temperature value");
    return {ProbVector(w), false};
}

struct BetaOrder {
    std::vector<std::size_t> pi; // pi[k] is the level placed k-th
};

inline BetaOrder beta_order(const ProbVector& p, const GibbsWeights& gamma) {
    const std::size_t d = p.size();
    if (gamma.size() != d) throw Error("beta_order: dimension mismatch");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> ratio(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (gamma[i] > 0.0)
            ratio[i] = p[i] / gamma[i];
        else
            ratio[i] = p[i] > 0.0 ? inf : -inf; // 0/0 is placed last
    }
    BetaOrder o;
    o.pi.resize(d);
    std::iota(o.pi.begin(), o.pi.end(), std::size_t{0});
    std::stable_sort(o.pi.begin(), o.pi.end(),
                     [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });
    return o;
}

/// Piecewise-linear concave curve through (0,0), ..., (1,1).
/// x is strictly increasing except for vertical steps when gamma has zero entries.
struct MajorizationCurve {
    std::vector<std::pair<double, double>> elbows;
};

inline MajorizationCurve thermo_curve(const ProbVector& p, const GibbsWeights& gamma) {
    auto order = beta_order(p, gamma);
    MajorizationCurve c;
    c.elbows.emplace_back(0.0, 0.0);
    double x = 0.0, y = 0.0;
    for (std::size_t k = 0; k < order.pi.size(); ++k) {
        x += gamma[order.pi[k]];
        y += p[order.pi[k]];
        if (k + 1 == order.pi.size()) {
            x = 1.0;
            y = 1.0;
        }
        c.elbows.emplace_back(std::min(x, 1.0), std::min(y, 1.0));
    }
    return c;
}

/// Majorization (Lorenz) curve: the thermomajorization curve for the flat distribution.
inline MajorizationCurve lorenz_curve(const ProbVector& p) {
    return thermo_curve(p, GibbsWeights{ProbVector::flat(p.size()), false});
}

inline double curve_eval(const MajorizationCurve& curve, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error("curve_eval: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const auto& e = curve.elbows;
    for (std::size_t k = 1; k < e.size(); ++k) {
        if (x == e[k].first) {
            // Upper end of any vertical step at x.
            double y = e[k].second;
            while (k + 1 < e.size() && e[k + 1].first == x) y = e[++k].second;
            return y;
        }
        if (x < e[k].first) {
            double x0 = e[k - 1].first, y0 = e[k - 1].second;
            double x1 = e[k].first, y1 = e[k].second;
            if (x1 - x0 <= 0.0) return y1;
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return 1.0;
}

/// Pointwise dominance of `upper` over `lower` at the union of their elbows.
inline bool curve_dominates(const MajorizationCurve& upper, const MajorizationCurve& lower,
                            double tol = kGeomTol) {
    auto check = [&](const MajorizationCurve& src) {
        for (const auto& [x, y] : src.elbows) {
            double xc = std::clamp(x, 0.0, 1.0);
            if (curve_eval(upper, xc) < curve_eval(lower, xc) - tol) return false;
        }
        return true;
    };
    return check(upper) && check(lower);
}

inline bool majorizes(const ProbVector& p, const ProbVector& q, double tol = kGeomTol) {
    if (p.size() != q.size()) throw Error("majorizes: dimension mismatch");
    std::vector<double> a = p.to_vector(), b = q.to_vector();
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sa += a[k];
        sb += b[k];
        if (sa < sb - tol) return false;
    }
    return true;
}

/// Zero-temperature (cooling) order in fixed energy order: p can be cooled into q,
/// i.e. every ground-side partial sum of q is at least that of p.
inline bool ut_majorizes(const ProbVector& p, const ProbVector& q, double tol = kGeomTol) {
    if (p.size() != q.size()) throw Error("ut_majorizes: dimension mismatch");
    double sp = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sp += p[k];
        sq += q[k];
        if (sp > sq + tol) return false;
    }
    return true;
}

inline bool thermo_majorizes(const ProbVector& p, const ProbVector& q, const GibbsWeights& gamma,
                             double tol = kGeomTol) {
    if (p.size() != q.size() || p.size() != gamma.size())
        throw Error("thermo_majorizes: dimension mismatch");
    if (gamma.zero_temperature) return ut_majorizes(p, q, tol);
    return curve_dominates(thermo_curve(p, gamma), thermo_curve(q, gamma), tol);
}

} // namespace thermolocc
