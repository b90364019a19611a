#pragma once

// Rank-3 stochastic tensors T[i][j][k] (i output, j and k inputs): thermal,
// bithermal, tristochastic and bicooling sets, their extremal points, and the
// first-order expansion of bithermal tensors around a tristochastic one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gibbs_maps.hpp"
#include "numeric.hpp"
#include "polyhedron.hpp"
#include "thermo_core.hpp"

namespace thermolocc {

template <class S>
struct Tensor3 {
    std::size_t d = 0;
    std::vector<S> data;

    Tensor3() = default;
    explicit Tensor3(std::size_t dim, const S& fill = S(0)) : d(dim), data(dim * dim * dim, fill) {}

    static std::size_t index(std::size_t d, std::size_t i, std::size_t j, std::size_t k) {
        return (i * d + j) * d + k;
    }
    S& operator()(std::size_t i, std::size_t j, std::size_t k) { return data[index(d, i, j, k)]; }
    const S& operator()(std::size_t i, std::size_t j, std::size_t k) const { return data[index(d, i, j, k)]; }

    /// Nested [i][j][k] arrays built from a printed layer display (layer i, row j, column k).
    static Tensor3 from_layers(const std::vector<std::vector<std::vector<S>>>& layers) {
        Tensor3 t(layers.size());
        for (std::size_t i = 0; i < t.d; ++i)
            for (std::size_t j = 0; j < t.d; ++j)
                for (std::size_t k = 0; k < t.d; ++k) t(i, j, k) = layers.at(i).at(j).at(k);
        return t;
    }
};

template <class S>
Tensor3<double> to_double(const Tensor3<S>& t) {
    Tensor3<double> out(t.d);
    for (std::size_t n = 0; n < t.data.size(); ++n) out.data[n] = NumericTraits<S>::to_double(t.data[n]);
    return out;
}

/// Tensor whose hypercolumns T[.][j][k] are probability vectors.
class StochasticTensor {
public:
    StochasticTensor() = default;
    explicit StochasticTensor(Tensor3<double> t, double tol = kNormTol) : t_(std::move(t)) {
        const std::size_t d = t_.d;
        if (d == 0) throw Error("tensor dimension must be positive");
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    double& x = t_(i, j, k);
                    if (!std::isfinite(x)) throw Error("tensor entries must be finite");
                    if (x < -tol) throw Error("negative tensor entry");
                    if (x < 0.0) x = 0.0;
                    s += x;
                }
                if (std::abs(s - 1.0) > tol) throw Error("tensor hypercolumn does not sum to 1");
            }
    }
    static StochasticTensor normalised(Tensor3<double> t, double tol = 1e-9) {
        const std::size_t d = t.d;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    if (t(i, j, k) < 0.0 && t(i, j, k) >= -tol) t(i, j, k) = 0.0;
                    s += t(i, j, k);
                }
                if (std::abs(s - 1.0) > tol) throw Error("tensor hypercolumn does not sum to 1");
                for (std::size_t i = 0; i < d; ++i) t(i, j, k) /= s;
            }
        return StochasticTensor(std::move(t));
    }
    /// Every conditional layer equal to `m`.
    static StochasticTensor constant_layers(const StochasticMatrix& m, bool layers_by_second = true) {
        const std::size_t d = m.dimension();
        Tensor3<double> t(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) t(i, j, k) = layers_by_second ? m(i, j) : m(i, k);
        return StochasticTensor(std::move(t));
    }

    std::size_t dimension() const { return t_.d; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return t_(i, j, k); }
    const Tensor3<double>& tensor() const { return t_; }

private:
    Tensor3<double> t_;
};

/// Which input the Gibbs condition quantifies over: First means
/// sum_j T[i][j][k] gamma_j = gamma_i for every k; Second swaps the roles of j and k.
enum class ThermalSlot { First, Second };

inline ProbVector apply_tensor(const StochasticTensor& t, const ProbVector& p, const ProbVector& q) {
    const std::size_t d = t.dimension();
    if (p.size() != d || q.size() != d) throw Error("apply_tensor: dimension mismatch");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) r[i] += t(i, j, k) * p[j] * q[k];
    return ProbVector::normalised(r);
}

/// Layer with the first input fixed: matrix (i, k).
inline StochasticMatrix layer_first(const StochasticTensor& t, std::size_t j) {
    const std::size_t d = t.dimension();
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) m(i, k) = t(i, j, k);
    return StochasticMatrix(m, 1e-9);
}

/// Layer with the second input fixed: matrix (i, j).
inline StochasticMatrix layer_second(const StochasticTensor& t, std::size_t k) {
    const std::size_t d = t.dimension();
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = t(i, j, k);
    return StochasticMatrix(m, 1e-9);
}

/// Output slice T[i][.][.] as a (j, k) matrix, as in the printed layer displays.
inline Eigen::MatrixXd layer_output(const StochasticTensor& t, std::size_t i) {
    const std::size_t d = t.dimension();
    Eigen::MatrixXd m(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) m(j, k) = t(i, j, k);
    return m;
}

/// "(T_{0jk} | T_{1jk} | ...)" with rows j and columns k.
template <class S>
std::string format_layers(const Tensor3<S>& t, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    for (std::size_t j = 0; j < t.d; ++j) {
        for (std::size_t i = 0; i < t.d; ++i) {
            if (i) os << " | ";
            for (std::size_t k = 0; k < t.d; ++k) {
                if (k) os << ' ';
                os << t(i, j, k);
            }
        }
        os << '\n';
    }
    return os.str();
}

inline bool is_thermal(const StochasticTensor& t, const GibbsWeights& gamma, ThermalSlot slot,
                       double tol = kFixTol) {
    const std::size_t d = t.dimension();
    if (gamma.size() != d) throw Error("is_thermal: dimension mismatch");
    for (std::size_t l = 0; l < d; ++l) {
        auto layer = slot == ThermalSlot::First ? layer_second(t, l) : layer_first(t, l);
        if (!is_gibbs_preserving(layer, gamma, tol)) return false;
    }
    return true;
}

inline bool is_bithermal(const StochasticTensor& t, const GibbsWeights& gamma, double tol = kFixTol) {
    return is_thermal(t, gamma, ThermalSlot::First, tol) && is_thermal(t, gamma, ThermalSlot::Second, tol);
}

inline bool is_tristochastic(const StochasticTensor& t, double tol = kFixTol) {
    return is_bithermal(t, GibbsWeights{ProbVector::flat(t.dimension()), false}, tol);
}

/// T[i][j][k] = 1 iff i = (k - j) mod d.
inline StochasticTensor cyclic_permutation_tensor(std::size_t d) {
    Tensor3<double> t(d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) t((k + d - j) % d, j, k) = 1.0;
    return StochasticTensor(t);
}

/// Convolution tensor T[i][j][k] = 1 iff j + k = i mod d.
inline StochasticTensor convolution_tensor(std::size_t d) {
    Tensor3<double> t(d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) t((j + k) % d, j, k) = 1.0;
    return StochasticTensor(t);
}

/// A non-permutation extremal tristochastic tensor in d = 3.
template <class S = double>
Tensor3<S> half_integral_tristochastic() {
    const S h = S(1) / S(2), z(0), o(1);
    return Tensor3<S>::from_layers({{{z, h, h}, {h, h, z}, {h, z, h}},
                                    {{h, h, z}, {z, h, h}, {h, z, h}},
                                    {{h, z, h}, {h, z, h}, {z, o, z}}});
}

/// First extremal bithermal qubit tensor for Boltzmann factor g = gamma_1 / gamma_0.
template <class S>
Tensor3<S> extremal_bithermal_first(const S& g) {
    const S z(0), o(1);
    return Tensor3<S>::from_layers({{{o - g, o}, {o, z}}, {{g, z}, {z, o}}});
}

/// Second extremal bithermal qubit tensor: the first followed by a thermal swap.
template <class S>
Tensor3<S> extremal_bithermal_second(const S& g) {
    const S z(0), o(1);
    return Tensor3<S>::from_layers({{{o - g * (o - g), o - g}, {o - g, o}}, {{g * (o - g), g}, {g, z}}});
}

inline double boltzmann_factor_d2(const GibbsWeights& gamma) {
    if (gamma.size() != 2) throw Error("expected d = 2");
    return gamma.zero_temperature ? 0.0 : gamma[1] / gamma[0];
}

inline std::pair<StochasticTensor, StochasticTensor> extremal_bithermal_d2(const GibbsWeights& gamma) {
    double g = boltzmann_factor_d2(gamma);
    return {StochasticTensor(extremal_bithermal_first(g)), StochasticTensor(extremal_bithermal_second(g))};
}

/// Contractions of a qubit matrix M (entries [i][j]) into one slot of T.
template <class S>
Tensor3<S> contract_output(const std::vector<std::vector<S>>& m, const Tensor3<S>& t) {
    Tensor3<S> r(t.d);
    for (std::size_t i = 0; i < t.d; ++i)
        for (std::size_t j = 0; j < t.d; ++j)
            for (std::size_t k = 0; k < t.d; ++k)
                for (std::size_t l = 0; l < t.d; ++l) r(i, j, k) += m[i][l] * t(l, j, k);
    return r;
}
template <class S>
Tensor3<S> contract_first(const Tensor3<S>& t, const std::vector<std::vector<S>>& m) {
    Tensor3<S> r(t.d);
    for (std::size_t i = 0; i < t.d; ++i)
        for (std::size_t j = 0; j < t.d; ++j)
            for (std::size_t k = 0; k < t.d; ++k)
                for (std::size_t l = 0; l < t.d; ++l) r(i, j, k) += t(i, l, k) * m[l][j];
    return r;
}
template <class S>
Tensor3<S> contract_second(const Tensor3<S>& t, const std::vector<std::vector<S>>& m) {
    Tensor3<S> r(t.d);
    for (std::size_t i = 0; i < t.d; ++i)
        for (std::size_t j = 0; j < t.d; ++j)
            for (std::size_t k = 0; k < t.d; ++k)
                for (std::size_t l = 0; l < t.d; ++l) r(i, j, k) += t(i, j, l) * m[l][k];
    return r;
}

/// Recursive extremal bithermal tensor: on the lowest remaining level m the
/// hypercolumn (m, m) is (1 - sum_{i>m} g_{i,m}, g_{m+1,m}, ...), hypercolumns with
/// exactly one input equal to m go to m, and the remaining block repeats the
/// construction on the levels above m.
inline StochasticTensor extremal_family(const EnergySpectrum& spectrum, const InverseTemperature& beta) {
    const std::size_t d = spectrum.dimension();
    auto gamma = gibbs_weights(spectrum, beta);
    Tensor3<double> t(d);
    for (std::size_t m = 0; m < d; ++m) {
        double rest = 0.0;
        for (std::size_t i = m + 1; i < d; ++i) {
            double g = gamma.zero_temperature ? 0.0 : gamma[i] / gamma[m];
            t(i, m, m) = g;
            rest += g;
        }
        if (rest > 1.0 + kFixTol) {
            std::ostringstream os;
            os << "temperature too high: sum_{i>" << m << "} g_{i," << m << "} = " << rest << " > 1";
            throw Error(os.str());
        }
        t(m, m, m) = std::max(0.0, 1.0 - rest);
        for (std::size_t k = m + 1; k < d; ++k) {
            t(m, m, k) = 1.0;
            t(m, k, m) = 1.0;
        }
    }
    return StochasticTensor(t);
}

/// All 0/1 tensors with T[i][j][k] = 0 whenever i > min(j, k).
inline std::vector<StochasticTensor> bicooling_extremals(std::size_t d) {
    if (d == 0 || d > 4) throw Error("bicooling_extremals: d must be in 1..4");
    std::vector<std::size_t> row(d * d, 0);
    std::vector<StochasticTensor> out;
    while (true) {
        Tensor3<double> t(d);
        for (std::size_t jk = 0; jk < d * d; ++jk) t(row[jk], jk / d, jk % d) = 1.0;
        out.emplace_back(t);
        std::size_t n = 0;
        while (n < d * d && row[n] == std::min(n / d, n % d)) {
            row[n] = 0;
            ++n;
        }
        if (n == d * d) break;
        ++row[n];
    }
    return out;
}

namespace detail {

/// Constraint system over the d^3 entries (index (i*d + j)*d + k): hypercolumn
/// normalisation plus the Gibbs condition for each requested slot.
template <class S>
Polyhedron<S> tensor_polytope(const std::vector<S>& gamma, bool zero_temperature, bool first, bool second) {
    const std::size_t d = gamma.size();
    const std::size_t n = d * d * d;
    Polyhedron<S> poly;
    poly.dimension = n;
    poly.a_eq = DenseMatrix<S>(0, n);
    for (std::size_t v = 0; v < n; ++v) poly.nonneg.push_back(v);
    auto idx = [d](std::size_t i, std::size_t j, std::size_t k) { return Tensor3<S>::index(d, i, j, k); };
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<S> row(n, S(0));
            for (std::size_t i = 0; i < d; ++i) row[idx(i, j, k)] = S(1);
            poly.a_eq.append_row(row);
            poly.b_eq.push_back(S(1));
        }
    auto zero_entry = [&](std::size_t v) {
        std::vector<S> row(n, S(0));
        row[v] = S(1);
        poly.a_eq.append_row(row);
        poly.b_eq.push_back(S(0));
    };
    for (int slot = 0; slot < 2; ++slot) {
        if ((slot == 0 && !first) || (slot == 1 && !second)) continue;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t fixed = 0; fixed < d; ++fixed) {
                if (zero_temperature) {
                    for (std::size_t s = 0; s < i; ++s) zero_entry(slot == 0 ? idx(i, s, fixed) : idx(i, fixed, s));
                    continue;
                }
                std::vector<S> row(n, S(0));
                for (std::size_t s = 0; s < d; ++s) row[slot == 0 ? idx(i, s, fixed) : idx(i, fixed, s)] = gamma[s];
                poly.a_eq.append_row(row);
                poly.b_eq.push_back(gamma[i]);
            }
    }
    return poly;
}

template <class S>
std::vector<Tensor3<S>> polytope_vertices(const Polyhedron<S>& poly, std::size_t d) {
    auto en = enumerate_vertices(poly);
    std::vector<Tensor3<S>> out;
    for (const auto& v : en.vertices) {
        Tensor3<S> t(d);
        t.data = v.point;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace detail

/// Products of extremal Gibbs-preserving layers; layers are indexed by the non-thermal input.
inline std::vector<StochasticTensor> enumerate_thermal_vertices(const GibbsWeights& gamma, ThermalSlot slot) {
    const std::size_t d = gamma.size();
    if (d > 3) throw Error("enumerate_thermal_vertices: d too large (max 3)");
    auto layers = extremal_gibbs_preserving(gamma);
    const std::size_t e = layers.size();
    std::vector<std::size_t> choice(d, 0);
    std::vector<StochasticTensor> out;
    while (true) {
        Tensor3<double> t(d);
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t s = 0; s < d; ++s) {
                    if (slot == ThermalSlot::First)
                        t(i, s, l) = layers[choice[l]](i, s);
                    else
                        t(i, l, s) = layers[choice[l]](i, s);
                }
        out.push_back(StochasticTensor::normalised(t));
        std::size_t n = 0;
        while (n < d && choice[n] + 1 == e) {
            choice[n] = 0;
            ++n;
        }
        if (n == d) break;
        ++choice[n];
    }
    return out;
}

inline std::vector<StochasticTensor> enumerate_bithermal_vertices(const GibbsWeights& gamma) {
    const std::size_t d = gamma.size();
    if (d > 3) throw Error("enumerate_bithermal_vertices: d too large (max 3)");
    auto poly = detail::tensor_polytope(gamma.gamma.to_vector(), gamma.zero_temperature, true, true);
    std::vector<StochasticTensor> out;
    for (auto& t : detail::polytope_vertices(poly, d)) out.push_back(StochasticTensor::normalised(t));
    return out;
}

/// Exact vertices of the bithermal polytope for rational Gibbs weights.
inline std::vector<Tensor3<Rational>> enumerate_bithermal_vertices_exact(const std::vector<Rational>& gamma,
                                                                         bool zero_temperature = false) {
    const std::size_t d = gamma.size();
    if (d > 3) throw Error("enumerate_bithermal_vertices_exact: d too large (max 3)");
    return detail::polytope_vertices(detail::tensor_polytope(gamma, zero_temperature, true, true), d);
}

/// True if `a` equals `b` after independently relabelling the values of each index
/// and permuting the roles of the three indices.
inline bool equal_up_to_relabeling(const Tensor3<double>& a, const Tensor3<double>& b, double tol = 1e-7) {
    const std::size_t d = a.d;
    if (b.d != d) return false;
    std::vector<std::size_t> base(d);
    for (std::size_t i = 0; i < d; ++i) base[i] = i;
    std::vector<std::vector<std::size_t>> perms;
    do perms.push_back(base);
    while (std::next_permutation(base.begin(), base.end()));
    std::array<int, 3> axes{0, 1, 2};
    do {
        for (const auto& p0 : perms)
            for (const auto& p1 : perms)
                for (const auto& p2 : perms) {
                    bool same = true;
                    for (std::size_t i = 0; i < d && same; ++i)
                        for (std::size_t j = 0; j < d && same; ++j)
                            for (std::size_t k = 0; k < d && same; ++k) {
                                std::array<std::size_t, 3> u{p0[i], p1[j], p2[k]};
                                double av = a(u[axes[0]], u[axes[1]], u[axes[2]]);
                                if (std::abs(av - b(i, j, k)) > tol) same = false;
                            }
                    if (same) return true;
                }
    } while (std::next_permutation(axes.begin(), axes.end()));
    return false;
}

inline bool is_zero_one(const Tensor3<double>& t, double tol = 1e-9) {
    for (double x : t.data)
        if (std::abs(x) > tol && std::abs(x - 1.0) > tol) return false;
    return true;
}

// ---- First-order expansion around a tristochastic tensor --------------------

/// First-order term A of T = base + beta A + O(beta^2).
struct TangentVector {
    Tensor3<double> a1;
    StochasticTensor base;

    /// Copy rescaled to unit max-norm.
    TangentVector normalised() const {
        TangentVector t = *this;
        double m = 0.0;
        for (double x : t.a1.data) m = std::max(m, std::abs(x));
        if (m > 0.0)
            for (double& x : t.a1.data) x /= m;
        return t;
    }
    /// Sign pattern over entries in (i, j, k) order, one of '+', '-', '0' per entry.
    std::string signature(double tol = 1e-9) const {
        std::string s;
        for (double x : a1.data) s += x > tol ? '+' : (x < -tol ? '-' : '0');
        return s;
    }
};

struct TangentConeReport {
    std::vector<TangentVector> extremals;      // vertices of the first-order polyhedron
    std::vector<Tensor3<double>> rays;         // extreme rays of its recession cone
    std::size_t expected = 67;
    bool matches_expected = false;
    std::vector<std::string> signatures;       // one per extremal, sorted
    std::vector<BasicSolutionCertificate> certificates;
};

namespace detail {

template <class S>
Polyhedron<S> tangent_polyhedron(const Tensor3<S>& base, const std::vector<S>& energy) {
    const std::size_t d = base.d;
    const std::size_t n = d * d * d;
    auto idx = [d](std::size_t i, std::size_t j, std::size_t k) { return Tensor3<S>::index(d, i, j, k); };
    Polyhedron<S> poly;
    poly.dimension = n;
    poly.a_eq = DenseMatrix<S>(0, n);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<S> row(n, S(0));
            for (std::size_t i = 0; i < d; ++i) row[idx(i, j, k)] = S(1);
            poly.a_eq.append_row(row);
            poly.b_eq.push_back(S(0));
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<S> row(n, S(0));
            S rhs = -energy[i];
            for (std::size_t j = 0; j < d; ++j) {
                row[idx(i, j, k)] = S(1);
                rhs += base(i, j, k) * energy[j];
            }
            poly.a_eq.append_row(row);
            poly.b_eq.push_back(rhs);
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<S> row(n, S(0));
            S rhs = -energy[i];
            for (std::size_t k = 0; k < d; ++k) {
                row[idx(i, j, k)] = S(1);
                rhs += base(i, j, k) * energy[k];
            }
            poly.a_eq.append_row(row);
            poly.b_eq.push_back(rhs);
        }
    for (std::size_t v = 0; v < n; ++v)
        if (base.data[v] == S(0)) poly.nonneg.push_back(v);
    return poly;
}

} // namespace detail

/// Extremal first-order directions around a tristochastic base: the basic feasible
/// solutions of the linearised bithermal constraints with A >= 0 where the base
/// vanishes. Computed in exact arithmetic (the base must have dyadic entries,
/// which holds for 0/1 and half-integral tensors).
inline TangentConeReport tangent_cone_extremals(const StochasticTensor& base, const EnergySpectrum& spectrum) {
    const std::size_t d = base.dimension();
    if (spectrum.dimension() != d) throw Error("tangent_cone_extremals: dimension mismatch");
    if (d > 3) throw Error("tangent_cone_extremals: d too large (max 3)");
    if (!is_tristochastic(base)) throw Error("tangent_cone_extremals: base is not tristochastic");
    Tensor3<Rational> b(d);
    for (std::size_t v = 0; v < b.data.size(); ++v) b.data[v] = Rational(base.tensor().data[v]);
    std::vector<Rational> e;
    for (double x : spectrum.energies()) e.emplace_back(x);
    auto poly = detail::tangent_polyhedron(b, e);
    auto en = enumerate_vertices(poly);

    TangentConeReport rep;
    for (const auto& v : en.vertices) {
        TangentVector tv;
        tv.base = base;
        tv.a1 = Tensor3<double>(d);
        for (std::size_t k = 0; k < v.point.size(); ++k) tv.a1.data[k] = v.point[k].convert_to<double>();
        rep.signatures.push_back(tv.signature());
        rep.extremals.push_back(std::move(tv));
        rep.certificates.push_back(basic_solution_certificate(poly, v.active));
    }
    for (const auto& r : en.rays) {
        Tensor3<double> t(d);
        for (std::size_t k = 0; k < r.size(); ++k) t.data[k] = r[k].convert_to<double>();
        rep.rays.push_back(std::move(t));
    }
    std::sort(rep.signatures.begin(), rep.signatures.end());
    rep.matches_expected = rep.extremals.size() == rep.expected;
    return rep;
}

} // namespace thermolocc
