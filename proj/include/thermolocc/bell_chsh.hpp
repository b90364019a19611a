#pragma once

// CHSH under thermal restrictions: n-copy degeneracy structure, the bound it
// implies, observables attaining it, and modes of coherence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "ltocc_sim.hpp"
#include "thermo_core.hpp"

namespace thermolocc {

using ComplexMatrix = Eigen::MatrixXcd;

struct DegeneracyProfile {
    struct Block {
        double energy = 0.0;
        std::vector<std::size_t> indices; // basis states of the n-copy system
    };
    std::vector<Block> blocks;
    std::size_t total = 0;
    std::size_t d_deg = 0;
    std::size_t d_ndeg = 0;
};

/// Groups the d^n sums E_{b_1} + ... + E_{b_n}; index b_1 d^{n-1} + ... + b_n.
inline DegeneracyProfile degeneracy_profile(const EnergySpectrum& spectrum, std::size_t n) {
    if (n == 0) throw Error("degeneracy_profile: n must be positive");
    const std::size_t d = spectrum.dimension();
    std::size_t total = 1;
    for (std::size_t c = 0; c < n; ++c) {
        total *= d;
        if (total > 4096) throw Error("degeneracy_profile: d^n exceeds 4096");
    }
    std::vector<double> e(total, 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t c = 0; c < n; ++c) {
            e[idx] += spectrum[rest % d];
            rest /= d;
        }
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });
    const double tol = 1e-9 * static_cast<double>(n) * spectrum.spread();
    DegeneracyProfile prof;
    prof.total = total;
    for (std::size_t m = 0; m < total; ++m) {
        std::size_t idx = order[m];
        if (prof.blocks.empty() || e[idx] - e[prof.blocks.back().indices.back()] > tol)
            prof.blocks.push_back({e[idx], {}});
        prof.blocks.back().indices.push_back(idx);
    }
    for (auto& b : prof.blocks) {
        std::sort(b.indices.begin(), b.indices.end());
        if (b.indices.size() >= 2)
            prof.d_deg += b.indices.size();
        else
            prof.d_ndeg += 1;
    }
    return prof;
}

inline double ltocc_chsh_bound(const DegeneracyProfile& prof) {
    return 2.0 * (static_cast<double>(prof.d_ndeg) + std::sqrt(2.0) * static_cast<double>(prof.d_deg)) /
           static_cast<double>(prof.total);
}

/// Identity on non-degenerate levels; on each degenerate block consecutive basis
/// states are paired and carry A0 = Z, A1 = X, B0 = (Z - X)/sqrt2, B1 = (Z + X)/sqrt2.
/// An unpaired level in an odd block carries +1.
inline ComplexMatrix build_observables(const DegeneracyProfile& prof, int setting, Party party) {
    if (setting != 0 && setting != 1) throw Error("build_observables: setting must be 0 or 1");
    const std::size_t D = prof.total;
    ComplexMatrix o = ComplexMatrix::Zero(D, D);
    const double r = 1.0 / std::sqrt(2.0);
    double cz, cx;
    if (party == Party::A) {
        cz = setting == 0 ? 1.0 : 0.0;
        cx = setting == 0 ? 0.0 : 1.0;
    } else {
        cz = r;
        cx = setting == 0 ? -r : r;
    }
    for (const auto& b : prof.blocks) {
        const auto& ix = b.indices;
        std::size_t m = 0;
        if (ix.size() >= 2)
            for (; m + 1 < ix.size(); m += 2) {
                std::size_t u = ix[m], v = ix[m + 1];
                o(u, u) = cz;
                o(v, v) = -cz;
                o(u, v) = cx;
                o(v, u) = cx;
            }
        for (; m < ix.size(); ++m) o(ix[m], ix[m]) = 1.0;
    }
    return o;
}

/// <Psi_+|A (x) B|Psi_+> for the maximally entangled state of local dimension D.
inline std::complex<double> maximally_entangled_expectation(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * b.transpose()).trace() / static_cast<double>(a.rows());
}

inline void check_observable(const ComplexMatrix& m, std::size_t D) {
    if (static_cast<std::size_t>(m.rows()) != D || static_cast<std::size_t>(m.cols()) != D)
        throw Error("chsh_value: observable has wrong dimension");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw Error("chsh_value: observable is not Hermitian");
}

/// |E00 + E01 - E10 + E11| on the maximally entangled state.
inline double chsh_value(const ComplexMatrix& a0, const ComplexMatrix& a1, const ComplexMatrix& b0,
                         const ComplexMatrix& b1, std::size_t D) {
    for (const auto* m : {&a0, &a1, &b0, &b1}) check_observable(*m, D);
    auto e = [](const ComplexMatrix& a, const ComplexMatrix& b) { return maximally_entangled_expectation(a, b); };
    return std::abs(e(a0, b0) + e(a0, b1) - e(a1, b0) + e(a1, b1));
}

struct ChshAttainment {
    double bound = 0.0;
    double attained = 0.0;
    DegeneracyProfile profile;
};

inline ChshAttainment chsh_attain(const EnergySpectrum& spectrum, std::size_t n) {
    ChshAttainment r;
    r.profile = degeneracy_profile(spectrum, n);
    r.bound = ltocc_chsh_bound(r.profile);
    r.attained = chsh_value(build_observables(r.profile, 0, Party::A), build_observables(r.profile, 1, Party::A),
                            build_observables(r.profile, 0, Party::B), build_observables(r.profile, 1, Party::B),
                            r.profile.total);
    return r;
}

// ---- Modes of coherence -----------------------------------------------------

struct ModeDecomposition {
    struct Mode {
        double omega_a = 0.0;
        double omega_b = 0.0;
        ComplexMatrix component;
    };
    std::vector<Mode> modes;

    /// Sum of the components with omega_a + omega_b = omega.
    ComplexMatrix joint(double omega, double tol = 1e-9) const {
        ComplexMatrix acc;
        for (const auto& m : modes) {
            if (acc.size() == 0) acc = ComplexMatrix::Zero(m.component.rows(), m.component.cols());
            if (std::abs(m.omega_a + m.omega_b - omega) <= tol) acc += m.component;
        }
        return acc;
    }
};

namespace detail {

inline double mode_tol(const EnergySpectrum& a, const EnergySpectrum& b) {
    return 1e-9 * std::max({1.0, a.spread(), b.spread()});
}

} // namespace detail

/// Entry <ij|rho|kl> (joint index i d_B + j) belongs to mode (E_i - E_k, E_j - E_l).
inline ModeDecomposition mode_decompose(const ComplexMatrix& rho, const EnergySpectrum& spec_a,
                                        const EnergySpectrum& spec_b) {
    const std::size_t da = spec_a.dimension(), db = spec_b.dimension(), D = da * db;
    if (static_cast<std::size_t>(rho.rows()) != D || static_cast<std::size_t>(rho.cols()) != D)
        throw Error("mode_decompose: dimension mismatch");
    const double tol = detail::mode_tol(spec_a, spec_b);
    ModeDecomposition dec;
    for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v) {
            const double wa = spec_a[u / db] - spec_a[v / db];
            const double wb = spec_b[u % db] - spec_b[v % db];
            auto it = std::find_if(dec.modes.begin(), dec.modes.end(), [&](const auto& m) {
                return std::abs(m.omega_a - wa) <= tol && std::abs(m.omega_b - wb) <= tol;
            });
            if (it == dec.modes.end()) {
                dec.modes.push_back({wa, wb, ComplexMatrix::Zero(D, D)});
                it = dec.modes.end() - 1;
            }
            it->component(u, v) = rho(u, v);
        }
    dec.modes.erase(std::remove_if(dec.modes.begin(), dec.modes.end(),
                                   [](const auto& m) { return m.component.cwiseAbs().maxCoeff() == 0.0; }),
                    dec.modes.end());
    return dec;
}

/// Linear map given by its images of the matrix units |u><v| (index u * D + v).
struct Channel {
    std::size_t dim = 0;
    std::vector<ComplexMatrix> images;

    ComplexMatrix apply(const ComplexMatrix& x) const {
        ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
        for (std::size_t u = 0; u < dim; ++u)
            for (std::size_t v = 0; v < dim; ++v)
                if (x(u, v) != 0.0) out += x(u, v) * images[u * dim + v];
        return out;
    }
    /// this after `first`.
    Channel after(const Channel& first) const {
        Channel c{dim, {}};
        for (const auto& img : first.images) c.images.push_back(apply(img));
        return c;
    }
};

inline bool mode_preservation_check(const Channel& ch, const EnergySpectrum& spec_a, const EnergySpectrum& spec_b,
                                    double tol = 1e-9) {
    const std::size_t db = spec_b.dimension(), D = spec_a.dimension() * db;
    if (ch.dim != D || ch.images.size() != D * D) throw Error("mode_preservation_check: channel action incomplete");
    const double et = detail::mode_tol(spec_a, spec_b);
    for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v) {
            const double wa = spec_a[u / db] - spec_a[v / db];
            const double wb = spec_b[u % db] - spec_b[v % db];
            const auto& img = ch.images[u * D + v];
            for (std::size_t x = 0; x < D; ++x)
                for (std::size_t y = 0; y < D; ++y) {
                    if (std::abs(img(x, y)) <= tol) continue;
                    if (std::abs(spec_a[x / db] - spec_a[y / db] - wa) > et ||
                        std::abs(spec_b[x % db] - spec_b[y % db] - wb) > et)
                        return false;
                }
        }
    return true;
}

inline Channel identity_channel(std::size_t D) {
    Channel c{D, {}};
    for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v) {
            ComplexMatrix m = ComplexMatrix::Zero(D, D);
            m(u, v) = 1.0;
            c.images.push_back(m);
        }
    return c;
}

/// Zeroes every off-diagonal entry.
inline Channel pinching_channel(std::size_t D) {
    Channel c = identity_channel(D);
    for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v)
            if (u != v) c.images[u * D + v].setZero();
    return c;
}

/// Unitary conjugation X -> U X U^dagger.
inline Channel unitary_channel(const ComplexMatrix& u) {
    const std::size_t D = static_cast<std::size_t>(u.rows());
    Channel c{D, {}};
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) c.images.push_back(u.col(a) * u.col(b).adjoint());
    return c;
}

/// Hadamard on Alice's qubit, identity on Bob.
inline Channel hadamard_on_a(std::size_t db) {
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    ComplexMatrix u = Eigen::kroneckerProduct(h, ComplexMatrix::Identity(db, db));
    return unitary_channel(u);
}

namespace detail {

inline bool is_identity(const StochasticMatrix& m) {
    return (m.matrix() - Eigen::MatrixXd::Identity(m.dimension(), m.dimension())).cwiseAbs().maxCoeff() <= 1e-12;
}

/// Local action of a bank entry on |x><y|: the identity is kept coherent, any other
/// Gibbs-preserving matrix acts as dephasing followed by the stochastic map.
inline Eigen::MatrixXcd local_image(const StochasticMatrix& m, std::size_t x, std::size_t y) {
    const std::size_t d = m.dimension();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    if (is_identity(m)) {
        out(x, y) = 1.0;
    } else if (x == y) {
        for (std::size_t i = 0; i < d; ++i) out(i, i) = m(i, x);
    }
    return out;
}

inline Channel round_channel(const Protocol& proto, const Round& round) {
    const std::size_t da = proto.setup.dim_a(), db = proto.setup.dim_b(), D = da * db;
    const std::size_t dm = proto.setup.dim(round.measurer);
    Channel c{D, {}};
    for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v) {
            std::size_t i = u / db, j = u % db, k = v / db, l = v % db;
            ComplexMatrix img = ComplexMatrix::Zero(D, D);
            // Energy-basis measurement of the measurer removes its coherences.
            const bool a_meas = round.measurer == Party::A;
            const std::size_t mo = a_meas ? i : j, mi = a_meas ? k : l;
            if (mo == mi) {
                const auto& bank = round.bank.at(History{mo});
                Eigen::VectorXd own = round.post.empty() ? Eigen::VectorXd(Eigen::VectorXd::Unit(dm, mo))
                                                         : Eigen::VectorXd(round.post.at(History{}).matrix().col(mo));
                Eigen::MatrixXcd actor = a_meas ? local_image(bank, j, l) : local_image(bank, i, k);
                Eigen::MatrixXcd meas = own.cast<std::complex<double>>().asDiagonal();
                img = a_meas ? Eigen::kroneckerProduct(meas, actor).eval() : Eigen::kroneckerProduct(actor, meas).eval();
            }
            c.images.push_back(std::move(img));
        }
    return c;
}

} // namespace detail

/// Quantum channel of a memoryless protocol: energy-basis measurements, conditional
/// local maps, shared randomness as a mixture.
inline Channel protocol_channel(const Protocol& proto) {
    if (!proto.memoryless()) throw Error("protocol_channel: protocol retains memory");
    const std::size_t D = proto.setup.dim_a() * proto.setup.dim_b();
    if (!proto.mixture.empty()) {
        Channel acc{D, std::vector<ComplexMatrix>(D * D, ComplexMatrix::Zero(D, D))};
        for (const auto& m : proto.mixture) {
            auto c = protocol_channel(m.protocol);
            for (std::size_t n = 0; n < D * D; ++n) acc.images[n] += m.weight * c.images[n];
        }
        return acc;
    }
    auto rep = validate(proto);
    if (!rep.ok) throw Error("invalid protocol: " + rep.problems.front());
    Channel c = identity_channel(D);
    for (const auto& r : proto.rounds) c = detail::round_channel(proto, r).after(c);
    return c;
}

} // namespace thermolocc
