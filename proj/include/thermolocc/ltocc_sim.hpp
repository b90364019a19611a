#pragma once

// Local thermal operations with classical communication: multi-round protocols
// with optional memory registers and shared randomness, their composed transition
// matrices, and the thermal CNOT/SWAP gate approximants.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gibbs_maps.hpp"
#include "lp.hpp"
#include "tensor_polytope.hpp"
#include "thermo_core.hpp"

namespace thermolocc {

enum class Party { A, B };

inline Party other(Party p) { return p == Party::A ? Party::B : Party::A; }

struct BipartiteSetup {
    EnergySpectrum spec_a, spec_b;
    InverseTemperature beta_a, beta_b;
    GibbsWeights gamma_a, gamma_b;

    BipartiteSetup() = default;
    BipartiteSetup(EnergySpectrum ea, EnergySpectrum eb, InverseTemperature ba, InverseTemperature bb)
        : spec_a(std::move(ea)), spec_b(std::move(eb)), beta_a(ba), beta_b(bb),
          gamma_a(gibbs_weights(spec_a, beta_a)), gamma_b(gibbs_weights(spec_b, beta_b)) {}

    std::size_t dim_a() const { return spec_a.dimension(); }
    std::size_t dim_b() const { return spec_b.dimension(); }
    std::size_t dim(Party p) const { return p == Party::A ? dim_a() : dim_b(); }
    const GibbsWeights& gamma(Party p) const { return p == Party::A ? gamma_a : gamma_b; }

    /// gamma_A (x) gamma_B with joint index i * d_B + j.
    GibbsWeights product_gibbs() const {
        if (gamma_a.zero_temperature || gamma_b.zero_temperature)
            throw Error("product Gibbs weights need finite temperatures");
        Eigen::VectorXd g(dim_a() * dim_b());
        for (std::size_t i = 0; i < dim_a(); ++i)
            for (std::size_t j = 0; j < dim_b(); ++j) g[i * dim_b() + j] = gamma_a[i] * gamma_b[j];
        return GibbsWeights::from_reference(ProbVector::normalised(g));
    }
};

inline bool same_setup(const BipartiteSetup& x, const BipartiteSetup& y) {
    auto same_beta = [](const InverseTemperature& a, const InverseTemperature& b) {
        return a.is_infinite() == b.is_infinite() && (a.is_infinite() || a.value() == b.value());
    };
    return x.spec_a.energies() == y.spec_a.energies() && x.spec_b.energies() == y.spec_b.energies() &&
           same_beta(x.beta_a, y.beta_a) && same_beta(x.beta_b, y.beta_b);
}

/// Energies rescaled to a common inverse temperature sqrt(beta_A beta_B) with
/// unchanged Gibbs weights on both sides.
struct CommonTemperature {
    InverseTemperature beta;
    EnergySpectrum spec_a, spec_b;
};

inline CommonTemperature common_temperature(const BipartiteSetup& s) {
    if (s.beta_a.is_infinite() || s.beta_b.is_infinite())
        throw Error("common_temperature: finite temperatures required");
    double ba = s.beta_a.value(), bb = s.beta_b.value();
    if (ba == 0.0 || bb == 0.0) throw Error("common_temperature: positive inverse temperatures required");
    double bt = std::sqrt(ba * bb);
    auto scaled = [](const EnergySpectrum& e, double c) {
        std::vector<double> v = e.energies();
        for (auto& x : v) x *= c;
        return EnergySpectrum(v);
    };
    return {InverseTemperature(bt), scaled(s.spec_a, ba / bt), scaled(s.spec_b, bb / bt)};
}

/// Joint populations r[i][j] of the two energy-incoherent systems.
class JointDistribution {
public:
    JointDistribution() = default;
    explicit JointDistribution(Eigen::MatrixXd r) : r_(std::move(r)) {
        for (Eigen::Index i = 0; i < r_.rows(); ++i)
            for (Eigen::Index j = 0; j < r_.cols(); ++j) {
                if (!std::isfinite(r_(i, j))) throw Error("joint distribution entries must be finite");
                if (r_(i, j) < -kNormTol) throw Error("negative joint probability");
                if (r_(i, j) < 0.0) r_(i, j) = 0.0;
            }
        if (r_.size() == 0 || std::abs(r_.sum() - 1.0) > kNormTol)
            throw Error("joint distribution does not sum to 1");
    }
    static JointDistribution normalised(Eigen::MatrixXd r) {
        for (Eigen::Index i = 0; i < r.size(); ++i)
            if (r.data()[i] < 0.0 && r.data()[i] >= -1e-9) r.data()[i] = 0.0;
        double s = r.sum();
        if (std::abs(s - 1.0) > 1e-9) throw Error("joint distribution does not sum to 1");
        return JointDistribution(r / s);
    }
    static JointDistribution product(const ProbVector& p, const ProbVector& q) {
        return normalised(p.values() * q.values().transpose());
    }
    static JointDistribution from_vec(const Eigen::VectorXd& v, std::size_t da, std::size_t db) {
        Eigen::MatrixXd r(da, db);
        for (std::size_t i = 0; i < da; ++i)
            for (std::size_t j = 0; j < db; ++j) r(i, j) = v[i * db + j];
        return normalised(r);
    }

    std::size_t dim_a() const { return static_cast<std::size_t>(r_.rows()); }
    std::size_t dim_b() const { return static_cast<std::size_t>(r_.cols()); }
    double operator()(std::size_t i, std::size_t j) const { return r_(i, j); }
    const Eigen::MatrixXd& matrix() const { return r_; }

    ProbVector marginal_a() const { return ProbVector::normalised(r_.rowwise().sum()); }
    ProbVector marginal_b() const { return ProbVector::normalised(r_.colwise().sum().transpose()); }
    /// Row-major vectorisation, index i * d_B + j.
    Eigen::VectorXd vec() const {
        Eigen::VectorXd v(r_.size());
        for (std::size_t i = 0; i < dim_a(); ++i)
            for (std::size_t j = 0; j < dim_b(); ++j) v[i * dim_b() + j] = r_(i, j);
        return v;
    }
    ProbVector as_prob() const { return ProbVector::normalised(vec()); }

private:
    Eigen::MatrixXd r_;
};

using History = std::vector<std::size_t>;
using MatrixBank = std::map<History, StochasticMatrix>;

/// One round: `measurer` reads its level k; the other party applies bank[h + (k)]
/// where h is the retained history; the measurer applies post[h] (identity if empty).
struct Round {
    Party measurer = Party::A;
    MatrixBank bank;
    MatrixBank post;
    bool retain = false;
};

struct MixtureComponent;

struct Protocol {
    BipartiteSetup setup;
    std::vector<Round> rounds;
    std::vector<MixtureComponent> mixture; // non-empty: the protocol is this weighted mixture

    bool memoryless() const;
};

struct MixtureComponent {
    double weight = 0.0;
    Protocol protocol;
};

inline bool Protocol::memoryless() const {
    for (const auto& r : rounds)
        if (r.retain) return false;
    for (const auto& m : mixture)
        if (!m.protocol.memoryless()) return false;
    return true;
}

/// All histories with the given per-slot ranges.
inline std::vector<History> all_histories(const std::vector<std::size_t>& ranges) {
    std::vector<History> out;
    History h(ranges.size(), 0);
    for (auto r : ranges)
        if (r == 0) return out;
    while (true) {
        out.push_back(h);
        std::size_t n = ranges.size();
        while (n > 0) {
            --n;
            if (++h[n] < ranges[n]) break;
            h[n] = 0;
            if (n == 0) return out;
        }
        if (ranges.empty()) return out;
    }
}

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;
    std::size_t memory_registers = 0;

    void fail(std::string msg) {
        ok = false;
        problems.push_back(std::move(msg));
    }
};

inline std::string history_string(const History& h) {
    std::string s;
    for (std::size_t n = 0; n < h.size(); ++n) {
        if (n) s += ',';
        s += std::to_string(h[n]);
    }
    return s;
}

inline ValidationReport validate(const Protocol& proto, double tol = kFixTol) {
    ValidationReport rep;
    if (!proto.mixture.empty()) {
        if (!proto.rounds.empty()) rep.fail("a mixture protocol must not have top-level rounds");
        double w = 0.0;
        for (std::size_t n = 0; n < proto.mixture.size(); ++n) {
            const auto& c = proto.mixture[n];
            if (!(c.weight >= 0.0)) rep.fail("mixture weight " + std::to_string(n) + " is negative");
            w += c.weight;
            if (!same_setup(c.protocol.setup, proto.setup))
                rep.fail("mixture component " + std::to_string(n) + " has a different setup");
            auto sub = validate(c.protocol, tol);
            for (auto& p : sub.problems) rep.fail("mixture component " + std::to_string(n) + ": " + p);
            rep.memory_registers = std::max(rep.memory_registers, sub.memory_registers);
        }
        if (std::abs(w - 1.0) > kNormTol) rep.fail("mixture weights do not sum to 1");
        return rep;
    }
    std::vector<std::size_t> ranges;
    for (std::size_t a = 0; a < proto.rounds.size(); ++a) {
        const auto& r = proto.rounds[a];
        const std::string tag = "round " + std::to_string(a) + ": ";
        const Party actor = other(r.measurer);
        auto bank_ranges = ranges;
        bank_ranges.push_back(proto.setup.dim(r.measurer));
        for (const auto& h : all_histories(bank_ranges))
            if (!r.bank.count(h)) rep.fail(tag + "bank is missing history (" + history_string(h) + ")");
        for (const auto& [h, m] : r.bank) {
            if (h.size() != bank_ranges.size()) {
                rep.fail(tag + "bank key (" + history_string(h) + ") has wrong arity");
                continue;
            }
            if (m.dimension() != proto.setup.dim(actor))
                rep.fail(tag + "bank matrix (" + history_string(h) + ") has wrong dimension");
            else if (!is_gibbs_preserving(m, proto.setup.gamma(actor), tol))
                rep.fail(tag + "bank matrix (" + history_string(h) + ") is not Gibbs-preserving");
        }
        if (!r.post.empty()) {
            for (const auto& h : all_histories(ranges))
                if (!r.post.count(h)) rep.fail(tag + "post is missing history (" + history_string(h) + ")");
            for (const auto& [h, m] : r.post) {
                if (h.size() != ranges.size()) {
                    rep.fail(tag + "post key (" + history_string(h) + ") has wrong arity");
                    continue;
                }
                if (m.dimension() != proto.setup.dim(r.measurer))
                    rep.fail(tag + "post matrix (" + history_string(h) + ") has wrong dimension");
                else if (!is_gibbs_preserving(m, proto.setup.gamma(r.measurer), tol))
                    rep.fail(tag + "post matrix (" + history_string(h) + ") is not Gibbs-preserving");
            }
        }
        if (r.retain) ranges.push_back(proto.setup.dim(r.measurer));
    }
    rep.memory_registers = ranges.size();
    return rep;
}

/// State with memory: sub-normalised joint populations for each retained history.
using RegisterState = std::map<History, Eigen::MatrixXd>;

inline RegisterState run_rounds(const Protocol& proto, const JointDistribution& input) {
    const std::size_t da = proto.setup.dim_a(), db = proto.setup.dim_b();
    RegisterState state{{History{}, input.matrix()}};
    for (const auto& round : proto.rounds) {
        RegisterState next;
        for (const auto& [h, r] : state) {
            for (std::size_t k = 0; k < proto.setup.dim(round.measurer); ++k) {
                History key = h;
                key.push_back(k);
                auto it = round.bank.find(key);
                if (it == round.bank.end()) throw Error("bank is missing history (" + history_string(key) + ")");
                const Eigen::MatrixXd& lam = it->second.matrix();
                Eigen::VectorXd own;
                if (round.post.empty()) {
                    own = Eigen::VectorXd::Unit(proto.setup.dim(round.measurer), k);
                } else {
                    auto pt = round.post.find(h);
                    if (pt == round.post.end()) throw Error("post is missing history (" + history_string(h) + ")");
                    own = pt->second.matrix().col(k);
                }
                Eigen::MatrixXd contrib;
                if (round.measurer == Party::A) {
                    Eigen::VectorXd b = lam * r.row(k).transpose();
                    contrib = own * b.transpose();
                } else {
                    Eigen::VectorXd a = lam * r.col(k);
                    contrib = a * own.transpose();
                }
                History out = round.retain ? key : h;
                auto [slot, fresh] = next.try_emplace(out, Eigen::MatrixXd::Zero(da, db));
                slot->second += contrib;
            }
        }
        state = std::move(next);
    }
    return state;
}

inline JointDistribution run_protocol(const Protocol& proto, const JointDistribution& input) {
    if (input.dim_a() != proto.setup.dim_a() || input.dim_b() != proto.setup.dim_b())
        throw Error("run_protocol: input dimensions do not match the setup");
    if (!proto.mixture.empty()) {
        if (!proto.rounds.empty()) throw Error("a mixture protocol must not have top-level rounds");
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(input.dim_a(), input.dim_b());
        for (const auto& c : proto.mixture) acc += c.weight * run_protocol(c.protocol, input).matrix();
        return JointDistribution::normalised(acc);
    }
    auto rep = validate(proto);
    if (!rep.ok) throw Error("invalid protocol: " + rep.problems.front());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(input.dim_a(), input.dim_b());
    for (const auto& [h, r] : run_rounds(proto, input)) acc += r;
    return JointDistribution::normalised(acc);
}

/// d_A d_B x d_A d_B transition matrix of a memoryless protocol (joint index i * d_B + j).
inline StochasticMatrix compose_matrix(const Protocol& proto) {
    if (!proto.memoryless()) throw Error("compose_matrix: protocol retains memory");
    const std::size_t da = proto.setup.dim_a(), db = proto.setup.dim_b(), n = da * db;
    if (!proto.mixture.empty()) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
        for (const auto& c : proto.mixture) acc += c.weight * compose_matrix(c.protocol).matrix();
        return StochasticMatrix::normalised(acc);
    }
    auto rep = validate(proto);
    if (!rep.ok) throw Error("invalid protocol: " + rep.problems.front());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (const auto& round : proto.rounds) {
        Eigen::MatrixXd own = round.post.empty()
                                  ? Eigen::MatrixXd::Identity(proto.setup.dim(round.measurer),
                                                              proto.setup.dim(round.measurer))
                                  : round.post.at(History{}).matrix();
        Eigen::MatrixXd step = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < da; ++i)
            for (std::size_t j = 0; j < db; ++j)
                for (std::size_t k = 0; k < da; ++k)
                    for (std::size_t l = 0; l < db; ++l) {
                        double v;
                        if (round.measurer == Party::A)
                            v = own(i, k) * round.bank.at(History{k})(j, l);
                        else
                            v = round.bank.at(History{l})(i, k) * own(j, l);
                        step(i * db + j, k * db + l) = v;
                    }
        m = step * m;
    }
    return StochasticMatrix::normalised(m);
}

/// Round with identity operations on both sides.
inline Round identity_round(const BipartiteSetup& s, Party measurer, const std::vector<std::size_t>& ranges,
                            bool retain = false) {
    Round r;
    r.measurer = measurer;
    r.retain = retain;
    auto bank_ranges = ranges;
    bank_ranges.push_back(s.dim(measurer));
    for (const auto& h : all_histories(bank_ranges)) r.bank.emplace(h, StochasticMatrix::identity(s.dim(other(measurer))));
    return r;
}

/// Same protocol with `extra` memoryless identity rounds appended.
inline Protocol pad_with_identity(const Protocol& proto, std::size_t extra) {
    if (!proto.memoryless()) throw Error("pad_with_identity: protocol retains memory");
    Protocol out = proto;
    if (!out.mixture.empty()) {
        for (auto& c : out.mixture) c.protocol = pad_with_identity(c.protocol, extra);
        return out;
    }
    for (std::size_t n = 0; n < extra; ++n)
        out.rounds.push_back(identity_round(proto.setup, n % 2 ? Party::B : Party::A, {}));
    return out;
}

/// Memory-retaining protocol whose operations ignore the stored registers.
inline Protocol with_memory(const Protocol& proto) {
    if (!proto.memoryless()) throw Error("with_memory: protocol already retains memory");
    Protocol out = proto;
    if (!out.mixture.empty()) {
        for (auto& c : out.mixture) c.protocol = with_memory(c.protocol);
        return out;
    }
    std::vector<std::size_t> ranges;
    for (auto& r : out.rounds) {
        const Round orig = r;
        r.bank.clear();
        r.post.clear();
        auto bank_ranges = ranges;
        bank_ranges.push_back(proto.setup.dim(r.measurer));
        for (const auto& h : all_histories(bank_ranges)) r.bank.emplace(h, orig.bank.at(History{h.back()}));
        if (!orig.post.empty())
            for (const auto& h : all_histories(ranges)) r.post.emplace(h, orig.post.at(History{}));
        r.retain = true;
        ranges.push_back(proto.setup.dim(r.measurer));
    }
    return out;
}

inline void check_thermal_tensor(const StochasticTensor& t, const GibbsWeights& g, ThermalSlot slot,
                                 const char* who) {
    if (t.dimension() != g.size()) throw Error(std::string(who) + " tensor has wrong dimension");
    if (!is_thermal(t, g, slot)) throw Error(std::string(who) + " tensor is not thermal");
}

/// r'_{ij} = sum_{kl} T^A_{ikl} T^B_{jkl} r_{kl}. T^A must be thermal in its own
/// input k (first slot), T^B in its own input l (second slot). Requires d_A = d_B.
inline JointDistribution parallel_ltocc(const BipartiteSetup& s, const StochasticTensor& ta,
                                        const StochasticTensor& tb, const JointDistribution& input) {
    if (s.dim_a() != s.dim_b()) throw Error("parallel_ltocc: requires d_A = d_B");
    check_thermal_tensor(ta, s.gamma_a, ThermalSlot::First, "Alice's");
    check_thermal_tensor(tb, s.gamma_b, ThermalSlot::Second, "Bob's");
    const std::size_t d = s.dim_a();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l) out(i, j) += ta(i, k, l) * tb(j, k, l) * input(k, l);
    return JointDistribution::normalised(out);
}

/// Two-round memory protocol realising parallel_ltocc: Alice measures and keeps m1,
/// Bob measures and keeps m2, then Alice applies T^A[.][.][m2] and Bob T^B[.][m1][.].
inline Protocol parallel_as_protocol(const BipartiteSetup& s, const StochasticTensor& ta,
                                     const StochasticTensor& tb) {
    if (s.dim_a() != s.dim_b()) throw Error("parallel_as_protocol: requires d_A = d_B");
    check_thermal_tensor(ta, s.gamma_a, ThermalSlot::First, "Alice's");
    check_thermal_tensor(tb, s.gamma_b, ThermalSlot::Second, "Bob's");
    const std::size_t d = s.dim_a();
    Protocol p;
    p.setup = s;
    p.rounds.push_back(identity_round(s, Party::A, {}, true));
    Round r2;
    r2.measurer = Party::B;
    r2.retain = true;
    for (std::size_t m1 = 0; m1 < d; ++m1) {
        for (std::size_t m2 = 0; m2 < d; ++m2) r2.bank.emplace(History{m1, m2}, layer_second(ta, m2));
        r2.post.emplace(History{m1}, layer_first(tb, m1));
    }
    p.rounds.push_back(std::move(r2));
    return p;
}

/// Alice holds p, Bob starts sharp in l0 where T^B[.][.][l0] is the identity; Alice
/// measures and Bob applies T^B[.][k][.], copying Alice's level into his system.
inline JointDistribution correlate_sharp(const BipartiteSetup& s, const StochasticTensor& tb, const ProbVector& p,
                                         std::size_t l0) {
    const std::size_t d = s.dim_b();
    if (s.dim_a() != d || tb.dimension() != d || p.size() != d) throw Error("correlate_sharp: dimension mismatch");
    if (l0 >= d) throw Error("correlate_sharp: l0 out of range");
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
            if (std::abs(tb(j, k, l0) - (j == k ? 1.0 : 0.0)) > kFixTol)
                throw Error("correlate_sharp: tensor has no identity layer at l0");
    check_thermal_tensor(tb, s.gamma_b, ThermalSlot::Second, "Bob's");
    Protocol proto;
    proto.setup = s;
    Round r;
    r.measurer = Party::A;
    for (std::size_t k = 0; k < d; ++k) r.bank.emplace(History{k}, layer_first(tb, k));
    proto.rounds.push_back(std::move(r));
    return run_protocol(proto, JointDistribution::product(p, ProbVector::sharp(d, l0)));
}

inline double mutual_information(const JointDistribution& r) {
    auto pa = r.marginal_a(), pb = r.marginal_b();
    double s = 0.0;
    for (std::size_t i = 0; i < r.dim_a(); ++i)
        for (std::size_t j = 0; j < r.dim_b(); ++j)
            if (r(i, j) > 0.0) s += r(i, j) * (std::log(r(i, j)) - std::log(pa[i]) - std::log(pb[j]));
    return std::max(0.0, s);
}

inline double joint_entropy(const JointDistribution& r) { return shannon_entropy(r.as_prob()); }

/// H(B|A) when given == Party::A, H(A|B) otherwise.
inline double conditional_entropy(const JointDistribution& r, Party given) {
    auto marg = given == Party::A ? r.marginal_a() : r.marginal_b();
    return std::max(0.0, joint_entropy(r) - shannon_entropy(marg));
}

// ---- Gate approximants (joint index 2i + j, Alice's bit i) ------------------

inline Eigen::MatrixXd classical_cnot(Party control) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            std::size_t oi = i, oj = j;
            if (control == Party::A) oj = i ? 1 - j : j;
            else oi = j ? 1 - i : i;
            m(2 * oi + oj, 2 * i + j) = 1.0;
        }
    return m;
}

inline Eigen::MatrixXd classical_swap() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(2 * j + i, 2 * i + j) = 1.0;
    return m;
}

inline void check_unit(double g, const char* name) {
    if (!(g >= 0.0 && g <= 1.0)) throw Error(std::string(name) + " must lie in [0,1]");
}

/// Controlled thermal swap on Bob's qubit (control = A) or on Alice's (control = B).
inline StochasticMatrix thermal_cnot(double g, Party control = Party::A) {
    check_unit(g, control == Party::A ? "g_b" : "g_a");
    auto sw = thermal_swap_entries(g);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    double v;
                    if (control == Party::A)
                        v = (i == k) * (k == 0 ? double(j == l) : sw[j][l]);
                    else
                        v = (j == l) * (l == 0 ? double(i == k) : sw[i][k]);
                    m(2 * i + j, 2 * k + l) = v;
                }
    return StochasticMatrix(m);
}

enum class SwapOrder { AFirst, BFirst };

/// Three alternating thermal CNOTs, starting with the A-controlled one for AFirst.
inline StochasticMatrix thermal_swap_gate(double g_a, double g_b, SwapOrder order) {
    check_unit(g_a, "g_a");
    check_unit(g_b, "g_b");
    Eigen::MatrixXd ab = thermal_cnot(g_b, Party::A).matrix();
    Eigen::MatrixXd ba = thermal_cnot(g_a, Party::B).matrix();
    Eigen::MatrixXd m = order == SwapOrder::AFirst ? Eigen::MatrixXd(ab * ba * ab) : Eigen::MatrixXd(ba * ab * ba);
    return StochasticMatrix::normalised(m);
}

inline double tv_distance(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2) {
    if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) throw Error("tv_distance: shape mismatch");
    return 0.5 * (m1 - m2).cwiseAbs().sum();
}
inline double tv_distance(const StochasticMatrix& m1, const StochasticMatrix& m2) {
    return tv_distance(m1.matrix(), m2.matrix());
}

// ---- One-round representability ---------------------------------------------

namespace detail {

/// Can `m` be written as Lambda^X_{ik} Lambda^{Y,(k)}_{jl} with X = measurer?
inline bool one_round_oriented(const BipartiteSetup& s, const Eigen::MatrixXd& m, Party measurer, double tol) {
    const std::size_t db = s.dim_b();
    const std::size_t dx = s.dim(measurer), dy = s.dim(other(measurer));
    auto entry = [&](std::size_t x, std::size_t y, std::size_t xi, std::size_t yi) {
        return measurer == Party::A ? m(x * db + y, xi * db + yi) : m(y * db + x, yi * db + xi);
    };
    // Measurer's own map is the marginal, and must not depend on the other input.
    Eigen::MatrixXd own = Eigen::MatrixXd::Zero(dx, dx);
    for (std::size_t x = 0; x < dx; ++x)
        for (std::size_t xi = 0; xi < dx; ++xi) {
            for (std::size_t y = 0; y < dy; ++y) own(x, xi) += entry(x, y, xi, 0);
            for (std::size_t yi = 1; yi < dy; ++yi) {
                double v = 0.0;
                for (std::size_t y = 0; y < dy; ++y) v += entry(x, y, xi, yi);
                if (std::abs(v - own(x, xi)) > tol) return false;
            }
        }
    if (!is_gibbs_preserving(StochasticMatrix::normalised(own), s.gamma(measurer), tol)) return false;
    // Conditional maps for each measured level, solved jointly as one feasibility LP.
    const std::size_t nv = dx * dy * dy;
    DenseMatrix<double> a(0, nv);
    std::vector<double> b;
    auto var = [&](std::size_t k, std::size_t y, std::size_t yi) { return (k * dy + y) * dy + yi; };
    std::vector<double> gy = s.gamma(other(measurer)).gamma.to_vector();
    bool zt = s.gamma(other(measurer)).zero_temperature;
    for (std::size_t k = 0; k < dx; ++k) {
        for (std::size_t yi = 0; yi < dy; ++yi) {
            std::vector<double> row(nv, 0.0);
            for (std::size_t y = 0; y < dy; ++y) row[var(k, y, yi)] = 1.0;
            a.append_row(row);
            b.push_back(1.0);
        }
        for (std::size_t y = 0; y < dy; ++y) {
            if (zt) {
                for (std::size_t yi = 0; yi < y; ++yi) {
                    std::vector<double> row(nv, 0.0);
                    row[var(k, y, yi)] = 1.0;
                    a.append_row(row);
                    b.push_back(0.0);
                }
                continue;
            }
            std::vector<double> row(nv, 0.0);
            for (std::size_t yi = 0; yi < dy; ++yi) row[var(k, y, yi)] = gy[yi];
            a.append_row(row);
            b.push_back(gy[y]);
        }
        for (std::size_t x = 0; x < dx; ++x) {
            if (std::abs(own(x, k)) <= tol) {
                for (std::size_t y = 0; y < dy; ++y)
                    for (std::size_t yi = 0; yi < dy; ++yi)
                        if (std::abs(entry(x, y, k, yi)) > tol) return false;
                continue;
            }
            for (std::size_t y = 0; y < dy; ++y)
                for (std::size_t yi = 0; yi < dy; ++yi) {
                    std::vector<double> row(nv, 0.0);
                    row[var(k, y, yi)] = own(x, k);
                    a.append_row(row);
                    b.push_back(entry(x, y, k, yi));
                }
        }
    }
    return find_feasible_point(a, b).has_value();
}

} // namespace detail

/// Whether a joint transition matrix is realisable by a single memoryless round
/// (either party measuring).
inline bool one_round_representable(const BipartiteSetup& s, const StochasticMatrix& m, double tol = 1e-9) {
    const std::size_t n = s.dim_a() * s.dim_b();
    if (m.dimension() != n) throw Error("one_round_representable: dimension mismatch");
    return detail::one_round_oriented(s, m.matrix(), Party::A, tol) ||
           detail::one_round_oriented(s, m.matrix(), Party::B, tol);
}

} // namespace thermolocc
