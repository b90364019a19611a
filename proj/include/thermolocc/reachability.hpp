#pragma once

// Which outputs r = T(p, q) are reachable with thermal or bithermal tensors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "lp.hpp"
#include "tensor_polytope.hpp"
#include "thermo_core.hpp"

namespace thermolocc {

/// Exact for thermal tensors: a tensor with every layer equal to a witness of p -> r
/// exists iff p thermomajorizes r, whatever q is.
inline bool thermal_reachable(const ProbVector& p, const ProbVector& q, const ProbVector& r,
                              const GibbsWeights& gamma) {
    if (q.size() != p.size()) throw Error("thermal_reachable: dimension mismatch");
    return thermo_majorizes(p, r, gamma);
}

/// Bithermal tensor T with T(p, q) = r, if one exists (LP over the d^3 entries).
inline std::optional<StochasticTensor> bithermal_witness(const ProbVector& p, const ProbVector& q,
                                                         const ProbVector& r, const GibbsWeights& gamma) {
    const std::size_t d = gamma.size();
    if (p.size() != d || q.size() != d || r.size() != d) throw Error("bithermal_reachable: dimension mismatch");
    if (d > 3) throw Error("bithermal_reachable: d too large (max 3)");
    auto poly = detail::tensor_polytope(gamma.gamma.to_vector(), gamma.zero_temperature, true, true);
    const std::size_t n = d * d * d;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) row[Tensor3<double>::index(d, i, j, k)] = p[j] * q[k];
        poly.a_eq.append_row(row);
        poly.b_eq.push_back(r[i]);
    }
    auto x = find_feasible_point(poly.a_eq, poly.b_eq);
    if (!x) return std::nullopt;
    Tensor3<double> t(d);
    t.data = *x;
    return StochasticTensor::normalised(t);
}

inline bool bithermal_reachable_exact(const ProbVector& p, const ProbVector& q, const ProbVector& r,
                                      const GibbsWeights& gamma) {
    return bithermal_witness(p, q, r, gamma).has_value();
}

/// Pointwise maximum of the curves of T(p, q) over the given tensors, with the
/// crossing points between curves included so the envelope is exact.
inline MajorizationCurve max_curve_bound(const ProbVector& p, const ProbVector& q, const GibbsWeights& gamma,
                                         const std::vector<StochasticTensor>& vertices) {
    if (vertices.empty()) throw Error("max_curve_bound: empty vertex list");
    std::vector<MajorizationCurve> curves;
    std::vector<double> xs;
    for (const auto& t : vertices) {
        curves.push_back(thermo_curve(apply_tensor(t, p, q), gamma));
        for (const auto& e : curves.back().elbows) xs.push_back(std::clamp(e.first, 0.0, 1.0));
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             xs.end());
    std::vector<double> all = xs;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
        const double x0 = xs[s], x1 = xs[s + 1];
        if (x1 - x0 <= 0.0) continue;
        std::vector<std::pair<double, double>> ends; // values at x0+ and x1-
        const double e = (x1 - x0) * 1e-12;
        for (const auto& c : curves) ends.emplace_back(curve_eval(c, x0 + e), curve_eval(c, x1 - e));
        for (std::size_t a = 0; a < ends.size(); ++a)
            for (std::size_t b = a + 1; b < ends.size(); ++b) {
                double d0 = ends[a].first - ends[b].first, d1 = ends[a].second - ends[b].second;
                if ((d0 > 0 && d1 < 0) || (d0 < 0 && d1 > 0)) {
                    double t = d0 / (d0 - d1);
                    all.push_back(x0 + e + t * (x1 - x0 - 2 * e));
                }
            }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    MajorizationCurve env;
    for (double x : all) {
        double y = 0.0;
        for (const auto& c : curves) y = std::max(y, curve_eval(c, x));
        env.elbows.emplace_back(x, y);
    }
    return env;
}

/// p = (1 - w) p~ + w gamma with p~ on the simplex boundary.
struct BoundaryDistribution {
    ProbVector tilde_p;
    double weight = 0.0;
};

inline BoundaryDistribution boundary_distribution(const ProbVector& p, const GibbsWeights& gamma) {
    const std::size_t d = p.size();
    if (gamma.size() != d) throw Error("boundary_distribution: dimension mismatch");
    if ((p.values() - gamma.gamma.values()).cwiseAbs().maxCoeff() <= kFixTol)
        throw Error("input is Gibbs; projection undefined");
    double w = INFINITY;
    for (std::size_t i = 0; i < d; ++i)
        if (gamma[i] > 0.0) w = std::min(w, p[i] / gamma[i]);
    w = std::clamp(w, 0.0, 1.0);
    Eigen::VectorXd t = (p.values() - w * gamma.gamma.values()) / (1.0 - w);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < d; ++i)
        if (gamma[i] > 0.0 && p[i] / gamma[i] <= p[argmin] / gamma[argmin]) argmin = i;
    t[static_cast<Eigen::Index>(argmin)] = 0.0;
    return {ProbVector::normalised(t), w};
}

struct EnhancedCheck {
    bool holds = false;
    bool rbar_valid = false;
    Eigen::VectorXd rbar;
};

/// Necessary condition for bithermal reachability that also uses the boundary
/// projections of p and q.
inline EnhancedCheck enhanced_necessary_detail(const ProbVector& p, const ProbVector& q, const ProbVector& r,
                                               const GibbsWeights& gamma, double tol = kGeomTol) {
    auto bp = boundary_distribution(p, gamma);
    auto bq = boundary_distribution(q, gamma);
    const double s = (1.0 - bp.weight) * (1.0 - bq.weight);
    EnhancedCheck c;
    c.rbar = (r.values() - (1.0 - s) * gamma.gamma.values()) / s;
    c.rbar_valid = c.rbar.minCoeff() >= -tol;
    if (!c.rbar_valid) return c;
    Eigen::VectorXd clipped = c.rbar.cwiseMax(0.0);
    ProbVector rbar = ProbVector::normalised(clipped);
    c.holds = thermo_majorizes(p, r, gamma, tol) && thermo_majorizes(q, r, gamma, tol) &&
              thermo_majorizes(bp.tilde_p, rbar, gamma, tol) && thermo_majorizes(bq.tilde_p, rbar, gamma, tol);
    return c;
}

inline bool enhanced_necessary(const ProbVector& p, const ProbVector& q, const ProbVector& r,
                               const GibbsWeights& gamma) {
    return enhanced_necessary_detail(p, q, r, gamma).holds;
}

} // namespace thermolocc
