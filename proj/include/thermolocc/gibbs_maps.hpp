#pragma once

// Gibbs-preserving stochastic matrices, transition witnesses and cooling maps.
// Convention: column-stochastic, entry (i, j) is the probability of j -> i.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lp.hpp"
#include "numeric.hpp"
#include "polyhedron.hpp"
#include "thermo_core.hpp"

namespace thermolocc {

class StochasticMatrix {
public:
    StochasticMatrix() = default;
    explicit StochasticMatrix(Eigen::MatrixXd m, double tol = kNormTol) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw Error("stochastic matrix must be square");
        for (Eigen::Index j = 0; j < m_.cols(); ++j) {
            for (Eigen::Index i = 0; i < m_.rows(); ++i) {
                if (!std::isfinite(m_(i, j))) throw Error("matrix entries must be finite");
                if (m_(i, j) < -tol) throw Error("negative matrix entry");
                if (m_(i, j) < 0.0) m_(i, j) = 0.0;
            }
            if (std::abs(m_.col(j).sum() - 1.0) > tol) throw Error("matrix column does not sum to 1");
        }
    }
    /// Clamps tiny negatives and rescales columns; for numerically produced matrices.
    static StochasticMatrix normalised(Eigen::MatrixXd m, double tol = 1e-9) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                if (m(i, j) < 0.0 && m(i, j) >= -tol) m(i, j) = 0.0;
            double s = m.col(j).sum();
            if (std::abs(s - 1.0) > tol) throw Error("matrix column does not sum to 1");
            m.col(j) /= s;
        }
        return StochasticMatrix(std::move(m));
    }
    static StochasticMatrix identity(std::size_t d) {
        return StochasticMatrix(Eigen::MatrixXd::Identity(d, d));
    }

    std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& matrix() const { return m_; }

    ProbVector apply(const ProbVector& p) const {
        if (p.size() != dimension()) throw Error("matrix/vector dimension mismatch");
        return ProbVector::normalised(m_ * p.values());
    }
    StochasticMatrix operator*(const StochasticMatrix& o) const {
        return StochasticMatrix::normalised(m_ * o.m_);
    }

private:
    Eigen::MatrixXd m_;
};

inline bool is_cooling(const StochasticMatrix& m, double tol = kNormTol) {
    for (std::size_t j = 0; j < m.dimension(); ++j)
        for (std::size_t i = j + 1; i < m.dimension(); ++i)
            if (std::abs(m(i, j)) > tol) return false;
    return true;
}

inline bool is_gibbs_preserving(const StochasticMatrix& m, const GibbsWeights& gamma, double tol = kFixTol) {
    if (m.dimension() != gamma.size()) throw Error("is_gibbs_preserving: dimension mismatch");
    if (gamma.zero_temperature) return is_cooling(m, tol);
    Eigen::VectorXd r = m.matrix() * gamma.gamma.values() - gamma.gamma.values();
    return r.cwiseAbs().maxCoeff() <= tol;
}

/// Thermal swap on a qubit with Boltzmann factor g = gamma_1 / gamma_0: ((1-g, 1), (g, 0)).
template <class S>
std::vector<std::vector<S>> thermal_swap_entries(const S& g) {
    return {{S(1) - g, S(1)}, {g, S(0)}};
}

inline StochasticMatrix thermal_swap(const GibbsWeights& gamma) {
    if (gamma.size() != 2) throw Error("thermal_swap: requires d = 2");
    double g = gamma.zero_temperature ? 0.0 : gamma[1] / gamma[0];
    auto e = thermal_swap_entries(g);
    Eigen::MatrixXd m(2, 2);
    m << e[0][0], e[0][1], e[1][0], e[1][1];
    return StochasticMatrix(m);
}

inline bool transition_feasible(const ProbVector& p, const ProbVector& q, const GibbsWeights& gamma) {
    return thermo_majorizes(p, q, gamma);
}

namespace detail {

/// Linear constraints of the Gibbs-preserving matrix polytope over the d*d entries
/// (variable index i*d + j for entry (i, j)). Optionally also Lambda p = q.
template <class S>
void gibbs_matrix_constraints(const std::vector<S>& gamma, bool zero_temperature, DenseMatrix<S>& a,
                              std::vector<S>& b) {
    const std::size_t d = gamma.size();
    a = DenseMatrix<S>(0, d * d);
    b.clear();
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<S> row(d * d, S(0));
        for (std::size_t i = 0; i < d; ++i) row[i * d + j] = S(1);
        a.append_row(row);
        b.push_back(S(1));
    }
    if (zero_temperature) {
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < i; ++j) {
                std::vector<S> row(d * d, S(0));
                row[i * d + j] = S(1);
                a.append_row(row);
                b.push_back(S(0));
            }
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<S> row(d * d, S(0));
            for (std::size_t j = 0; j < d; ++j) row[i * d + j] = gamma[j];
            a.append_row(row);
            b.push_back(gamma[i]);
        }
    }
}

template <class S>
std::optional<std::vector<S>> witness_lp(const std::vector<S>& p, const std::vector<S>& q,
                                         const std::vector<S>& gamma, bool zero_temperature) {
    const std::size_t d = p.size();
    DenseMatrix<S> a;
    std::vector<S> b;
    if (zero_temperature) {
        gibbs_matrix_constraints(gamma, true, a, b);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<S> row(d * d, S(0));
            for (std::size_t j = 0; j < d; ++j) row[i * d + j] = p[j];
            a.append_row(row);
            b.push_back(q[i]);
        }
        return find_feasible_point(a, b);
    }
    // Lambda_ij = s_ij x_ij with s_ij = min(1, gamma_i / gamma_j) and the Gibbs rows
    // divided by gamma_i, so every coefficient lies in [0, 1]. At low temperature the
    // unscaled rows carry coefficients below the pivot tolerance.
    auto s = [&](std::size_t i, std::size_t j) { return gamma[i] < gamma[j] ? gamma[i] / gamma[j] : S(1); };
    a = DenseMatrix<S>(0, d * d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<S> row(d * d, S(0));
        for (std::size_t i = 0; i < d; ++i) row[i * d + j] = s(i, j);
        a.append_row(row);
        b.push_back(S(1));
    }
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<S> row(d * d, S(0));
        for (std::size_t j = 0; j < d; ++j) row[i * d + j] = gamma[j] < gamma[i] ? gamma[j] / gamma[i] : S(1);
        a.append_row(row);
        b.push_back(S(1));
    }
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<S> row(d * d, S(0));
        for (std::size_t j = 0; j < d; ++j) row[i * d + j] = s(i, j) * p[j];
        a.append_row(row);
        b.push_back(q[i]);
    }
    auto x = find_feasible_point(a, b);
    if (x)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) (*x)[i * d + j] *= s(i, j);
    return x;
}

} // namespace detail

/// A Gibbs-preserving Lambda with Lambda p = q, or nullopt when none exists.
/// Any feasible point is returned; no particular witness is preferred.
inline std::optional<StochasticMatrix> witness_matrix(const ProbVector& p, const ProbVector& q,
                                                      const GibbsWeights& gamma) {
    const std::size_t d = p.size();
    if (q.size() != d || gamma.size() != d) throw Error("witness_matrix: dimension mismatch");
    auto x = detail::witness_lp(p.to_vector(), q.to_vector(), gamma.gamma.to_vector(), gamma.zero_temperature);
    if (!x) return std::nullopt;
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = (*x)[i * d + j];
    return StochasticMatrix::normalised(m);
}

/// Exact rational witness; entries indexed [i][j].
inline std::optional<std::vector<std::vector<Rational>>> witness_matrix_exact(
    const std::vector<Rational>& p, const std::vector<Rational>& q, const std::vector<Rational>& gamma,
    bool zero_temperature = false) {
    const std::size_t d = p.size();
    auto x = detail::witness_lp(p, q, gamma, zero_temperature);
    if (!x) return std::nullopt;
    std::vector<std::vector<Rational>> m(d, std::vector<Rational>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m[i][j] = (*x)[i * d + j];
    return m;
}

/// Vertices of the Gibbs-preserving matrix polytope (cooling polytope at zero temperature).
inline std::vector<StochasticMatrix> extremal_gibbs_preserving(const GibbsWeights& gamma) {
    const std::size_t d = gamma.size();
    Polyhedron<double> poly;
    detail::gibbs_matrix_constraints(gamma.gamma.to_vector(), gamma.zero_temperature, poly.a_eq, poly.b_eq);
    poly.dimension = d * d;
    for (std::size_t k = 0; k < d * d; ++k) poly.nonneg.push_back(k);
    auto en = enumerate_vertices(poly);
    std::vector<StochasticMatrix> out;
    for (const auto& v : en.vertices) {
        Eigen::MatrixXd m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = v.point[i * d + j];
        out.push_back(StochasticMatrix::normalised(m));
    }
    return out;
}

/// All 0/1 upper-triangular stochastic matrices (one 1 per column at row <= column); d! of them.
inline std::vector<StochasticMatrix> extremal_cooling_matrices(std::size_t d) {
    if (d == 0) throw Error("extremal_cooling_matrices: d must be positive");
    if (d > 6) throw Error("extremal_cooling_matrices: d too large (max 6)");
    std::vector<StochasticMatrix> out;
    std::vector<std::size_t> row(d, 0);
    while (true) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t j = 0; j < d; ++j) m(row[j], j) = 1.0;
        out.emplace_back(m);
        std::size_t j = 0;
        while (j < d && row[j] == j) {
            row[j] = 0;
            ++j;
        }
        if (j == d) break;
        ++row[j];
    }
    return out;
}

} // namespace thermolocc
