#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"

using namespace thermolocc;
using testutil::random_prob;

namespace {

GibbsWeights qubit(double g) { return GibbsWeights::from_reference(ProbVector{1.0 / (1.0 + g), g / (1.0 + g)}); }

double tensor_diff(const Tensor3<double>& a, const Tensor3<double>& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.data.size(); ++n) m = std::max(m, std::abs(a.data[n] - b.data[n]));
    return m;
}

bool contains(const std::vector<StochasticTensor>& set, const Tensor3<double>& t, double tol = 1e-9) {
    for (const auto& s : set)
        if (tensor_diff(s.tensor(), t) < tol) return true;
    return false;
}

StochasticTensor random_mixture(std::mt19937_64& rng, const std::vector<StochasticTensor>& vs) {
    std::exponential_distribution<double> ex(1.0);
    const std::size_t d = vs.front().dimension();
    Tensor3<double> t(d);
    double tot = 0.0;
    for (const auto& v : vs) {
        double w = ex(rng);
        tot += w;
        for (std::size_t n = 0; n < t.data.size(); ++n) t.data[n] += w * v.tensor().data[n];
    }
    for (auto& x : t.data) x /= tot;
    return StochasticTensor::normalised(t);
}

// Layer-by-layer construction of the printed d = 3 member of the recursive family.
Tensor3<double> printed_family_d3(double g10, double g20, double g21) {
    Tensor3<double> t(3);
    t(0, 0, 0) = 1 - g10 - g20;
    t(1, 0, 0) = g10;
    t(2, 0, 0) = g20;
    for (std::size_t k = 1; k < 3; ++k) {
        t(0, 0, k) = 1;
        t(0, k, 0) = 1;
    }
    // Lower-right block: the qubit tensor of the first extremal kind on levels {1, 2}.
    t(1, 1, 1) = 1 - g21;
    t(2, 1, 1) = g21;
    t(1, 1, 2) = 1;
    t(1, 2, 1) = 1;
    t(2, 2, 2) = 1;
    return t;
}

} // namespace

TEST(StochasticTensor, Validation) {
    Tensor3<double> t(2);
    EXPECT_THROW(StochasticTensor{t}, Error);
    t(0, 0, 0) = t(0, 0, 1) = t(0, 1, 0) = t(0, 1, 1) = 1.0;
    EXPECT_NO_THROW(StochasticTensor{t});
    t(1, 1, 1) = -0.5;
    t(0, 1, 1) = 1.5;
    EXPECT_THROW(StochasticTensor{t}, Error);
}

TEST(ApplyTensor, ConvolutionOfSharpStates) {
    auto r = apply_tensor(convolution_tensor(3), ProbVector::sharp(3, 0), ProbVector::sharp(3, 0));
    EXPECT_EQ(r.to_vector(), (std::vector<double>{1, 0, 0}));
    r = apply_tensor(convolution_tensor(3), ProbVector::sharp(3, 1), ProbVector::sharp(3, 2));
    EXPECT_EQ(r.to_vector(), (std::vector<double>{1, 0, 0}));
}

TEST(ApplyTensor, TristochasticFixesFlat) {
    std::mt19937_64 rng(1);
    StochasticTensor strange(half_integral_tristochastic());
    for (const auto& t : {cyclic_permutation_tensor(3), convolution_tensor(3), strange}) {
        ASSERT_TRUE(is_tristochastic(t));
        for (int n = 0; n < 20; ++n) {
            auto q = random_prob(rng, 3);
            EXPECT_LT(testutil::max_diff(apply_tensor(t, ProbVector::flat(3), q), ProbVector::flat(3)), 1e-15);
            EXPECT_LT(testutil::max_diff(apply_tensor(t, q, ProbVector::flat(3)), ProbVector::flat(3)), 1e-15);
        }
    }
}

TEST(ApplyTensor, StrangeTensorExactlyFlat) {
    auto t = half_integral_tristochastic<Rational>();
    for (std::size_t i = 0; i < 3; ++i) {
        Rational r = 0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) r += t(i, j, k) * Rational(1, 9);
        EXPECT_EQ(r, Rational(1, 3));
    }
}

TEST(ThermalPredicates, IdentityAndConstantLayers) {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 30; ++n) {
        std::size_t d = 2 + n % 2;
        auto g = gibbs_weights(testutil::random_spectrum(rng, d), 0.5 + 0.1 * n);
        auto id = StochasticTensor::constant_layers(StochasticMatrix::identity(d));
        EXPECT_TRUE(is_thermal(id, g, ThermalSlot::First));
        auto lam = testutil::random_witness(rng, g);
        EXPECT_TRUE(is_thermal(StochasticTensor::constant_layers(lam, true), g, ThermalSlot::First));
        EXPECT_TRUE(is_thermal(StochasticTensor::constant_layers(lam, false), g, ThermalSlot::Second));
    }
}

TEST(ThermalPredicates, FullSwapLayerIsNotThermal) {
    Tensor3<double> t(2);
    // Layer k = 0 is the identity, layer k = 1 the full swap.
    t(0, 0, 0) = t(1, 1, 0) = 1;
    t(1, 0, 1) = t(0, 1, 1) = 1;
    StochasticTensor st(t);
    EXPECT_FALSE(is_thermal(st, qubit(0.5), ThermalSlot::First));
    EXPECT_TRUE(is_thermal(st, qubit(1.0), ThermalSlot::First));
}

TEST(ThermalPredicates, ExtremalQubitTensorsAreBithermal) {
    for (double g : {0.05, 0.3, 0.5, 0.77, 1.0}) {
        auto [t1, t2] = extremal_bithermal_d2(qubit(g));
        EXPECT_TRUE(is_bithermal(t1, qubit(g)));
        EXPECT_TRUE(is_bithermal(t2, qubit(g)));
    }
    EXPECT_TRUE(is_bithermal(cyclic_permutation_tensor(3), gibbs_weights({0.0, 1.0, 2.0}, 0.0)));
    EXPECT_FALSE(is_bithermal(cyclic_permutation_tensor(3), gibbs_weights({0.0, 1.0, 2.0}, 1.0)));
}

TEST(ExtremalQubit, InfiniteTemperatureLayers) {
    auto [t1, t2] = extremal_bithermal_d2(qubit(1.0));
    Eigen::MatrixXd x(2, 2), i2 = Eigen::MatrixXd::Identity(2, 2);
    x << 0, 1, 1, 0;
    EXPECT_LT(testutil::max_diff(layer_output(t1, 0), x), 1e-15);
    EXPECT_LT(testutil::max_diff(layer_output(t1, 1), i2), 1e-15);
}

TEST(ExtremalQubit, ZeroTemperatureGivesBicooling) {
    auto cold = gibbs_weights({0.0, 1.0}, InverseTemperature::infinity());
    auto [t1, t2] = extremal_bithermal_d2(cold);
    auto bc = bicooling_extremals(2);
    EXPECT_TRUE(contains(bc, t1.tensor()));
    EXPECT_TRUE(contains(bc, t2.tensor()));
    EXPECT_TRUE(is_bithermal(t1, cold));
    EXPECT_TRUE(is_bithermal(t2, cold));
}

TEST(ExtremalQubit, ThermalSwapIdentitiesExact) {
    for (Rational g : {Rational(1, 2), Rational(1, 3), Rational(7, 11), Rational(0), Rational(1)}) {
        auto t1 = extremal_bithermal_first(g), t2 = extremal_bithermal_second(g);
        auto s = thermal_swap_entries(g);
        EXPECT_EQ(contract_output(s, t1).data, t2.data);
        EXPECT_EQ(contract_first(t1, s).data, t2.data);
        EXPECT_EQ(contract_second(t1, s).data, t2.data);
    }
}

TEST(ExtremalFamily, QubitBaseCase) {
    for (double beta : {0.2, 1.0, 3.0}) {
        auto g = gibbs_weights({0.0, 1.0}, beta);
        auto t = extremal_family({0.0, 1.0}, beta);
        EXPECT_LT(tensor_diff(t.tensor(), extremal_bithermal_first(g[1] / g[0])), 1e-15);
    }
}

TEST(ExtremalFamily, MatchesPrintedQutritDisplay) {
    EnergySpectrum e{0.0, 1.0, 2.5};
    for (double beta : {1.0, 2.0, 5.0}) {
        auto t = extremal_family(e, beta);
        double g10 = std::exp(-beta), g20 = std::exp(-2.5 * beta), g21 = std::exp(-1.5 * beta);
        EXPECT_LT(tensor_diff(t.tensor(), printed_family_d3(g10, g20, g21)), 1e-12);
    }
}

TEST(ExtremalFamily, ZeroTemperatureIsLeastCooling) {
    for (std::size_t d = 2; d <= 5; ++d) {
        std::vector<double> e;
        for (std::size_t i = 0; i < d; ++i) e.push_back(i * 0.7);
        auto t = extremal_family(EnergySpectrum(e), InverseTemperature::infinity());
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(t(i, j, k), i == std::min(j, k) ? 1.0 : 0.0);
    }
}

TEST(ExtremalFamily, SymmetricAndBithermal) {
    std::mt19937_64 rng(3);
    int built = 0;
    for (int n = 0; n < 60; ++n) {
        std::size_t d = 2 + n % 4;
        auto e = testutil::random_spectrum(rng, d);
        double beta = 1.0 + 0.2 * n;
        StochasticTensor t;
        try {
            t = extremal_family(e, beta);
        } catch (const Error&) {
            continue;
        }
        ++built;
        auto g = gibbs_weights(e, beta);
        EXPECT_TRUE(is_bithermal(t, g));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(t(i, j, k), t(i, k, j));
    }
    EXPECT_GT(built, 30);
}

TEST(ExtremalFamily, HighTemperatureNamesInequality) {
    try {
        extremal_family({0.0, 0.1, 0.2}, 0.5);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("sum_{i>0} g_{i,0}"), std::string::npos) << e.what();
    }
}

TEST(Bicooling, CountsMatchProductFormula) {
    for (std::size_t d = 1; d <= 4; ++d) {
        std::size_t expect = 1;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) expect *= std::min(j, k) + 1;
        auto all = bicooling_extremals(d);
        EXPECT_EQ(all.size(), expect);
        if (d < 2) continue;
        std::vector<double> e;
        for (std::size_t i = 0; i < d; ++i) e.push_back(i);
        auto cold = gibbs_weights(EnergySpectrum(e), InverseTemperature::infinity());
        for (const auto& t : all) EXPECT_TRUE(is_bithermal(t, cold));
    }
    EXPECT_EQ(bicooling_extremals(2).size(), 2u);
    EXPECT_EQ(bicooling_extremals(3).size(), 24u);
    EXPECT_THROW(bicooling_extremals(5), Error);
}

TEST(Bicooling, MatchesZeroTemperatureVertexEnumeration) {
    auto cold = gibbs_weights({0.0, 1.0, 2.0}, InverseTemperature::infinity());
    auto vs = enumerate_bithermal_vertices(cold);
    auto bc = bicooling_extremals(3);
    ASSERT_EQ(vs.size(), bc.size());
    for (const auto& v : vs) EXPECT_TRUE(contains(bc, v.tensor()));
}

TEST(ThermalVertices, QubitHasFour) {
    auto g = qubit(0.4);
    auto vs = enumerate_thermal_vertices(g, ThermalSlot::First);
    ASSERT_EQ(vs.size(), 4u);
    for (const auto& v : vs) {
        EXPECT_TRUE(is_thermal(v, g, ThermalSlot::First));
        for (std::size_t k = 0; k < 2; ++k) {
            auto l = layer_second(v, k).matrix();
            EXPECT_TRUE(testutil::max_diff(l, Eigen::MatrixXd::Identity(2, 2)) < 1e-12 ||
                        testutil::max_diff(l, thermal_swap(g).matrix()) < 1e-12);
        }
    }
    auto hot = enumerate_thermal_vertices(qubit(1.0), ThermalSlot::Second);
    ASSERT_EQ(hot.size(), 4u);
    for (const auto& v : hot) EXPECT_TRUE(is_zero_one(v.tensor()));
}

TEST(ThermalVertices, NoVertexIsAMidpoint) {
    auto g = gibbs_weights({0.0, 1.0, 2.0}, 1.0);
    for (auto slot : {ThermalSlot::First, ThermalSlot::Second}) {
        auto vs = enumerate_thermal_vertices(g, slot);
        EXPECT_EQ(vs.size(), 1000u);
        // Sample pairs to keep this cheap; the layer structure makes every pair distinct.
        for (std::size_t a = 0; a < vs.size(); a += 37)
            for (std::size_t b = a + 1; b < vs.size(); b += 13) {
                Tensor3<double> mid(3);
                for (std::size_t n = 0; n < mid.data.size(); ++n)
                    mid.data[n] = 0.5 * (vs[a].tensor().data[n] + vs[b].tensor().data[n]);
                EXPECT_FALSE(contains(vs, mid, 1e-9));
            }
    }
}

TEST(BithermalVertices, QubitGivesTheTwoPrintedTensors) {
    for (double g : {0.1, 0.5, 0.9}) {
        auto vs = enumerate_bithermal_vertices(qubit(g));
        ASSERT_EQ(vs.size(), 2u);
        EXPECT_TRUE(contains(vs, extremal_bithermal_first(g), 1e-12));
        EXPECT_TRUE(contains(vs, extremal_bithermal_second(g), 1e-12));
    }
}

TEST(BithermalVertices, QubitExactRational) {
    Rational g(1, 2);
    std::vector<Rational> gamma{Rational(2, 3), Rational(1, 3)};
    auto vs = enumerate_bithermal_vertices_exact(gamma);
    ASSERT_EQ(vs.size(), 2u);
    auto t1 = extremal_bithermal_first(g), t2 = extremal_bithermal_second(g);
    bool h1 = false, h2 = false;
    for (const auto& v : vs) {
        h1 = h1 || v.data == t1.data;
        h2 = h2 || v.data == t2.data;
    }
    EXPECT_TRUE(h1);
    EXPECT_TRUE(h2);
}

TEST(BithermalVertices, QutritInfiniteTemperature) {
    auto vs = enumerate_bithermal_vertices(gibbs_weights({0.0, 1.0, 2.0}, 0.0));
    std::size_t perms = 0;
    bool strange = false;
    for (const auto& v : vs) {
        EXPECT_TRUE(is_tristochastic(v));
        if (is_zero_one(v.tensor()))
            ++perms;
        else
            strange = strange || equal_up_to_relabeling(half_integral_tristochastic(), v.tensor());
    }
    // Tristochastic 0/1 tensors of order 3 are Latin cubes: 12 of them.
    EXPECT_EQ(perms, 12u);
    EXPECT_TRUE(strange);
    EXPECT_TRUE(contains(vs, cyclic_permutation_tensor(3).tensor()));
}

TEST(BithermalVertices, QutritFiniteTemperatureCertificates) {
    auto g = gibbs_weights({0.0, 1.0, 2.0}, 1.0);
    auto poly = detail::tensor_polytope(g.gamma.to_vector(), false, true, true);
    auto en = enumerate_vertices(poly);
    EXPECT_GT(en.vertices.size(), 0u);
    EXPECT_TRUE(en.rays.empty());
    for (const auto& v : en.vertices) {
        Tensor3<double> raw(3);
        raw.data = v.point;
        auto t = StochasticTensor::normalised(raw);
        EXPECT_TRUE(is_bithermal(t, g));
        auto cert = basic_solution_certificate(poly, v.active);
        EXPECT_TRUE(is_zero_one(t.tensor()) || cert.basic);
        EXPECT_TRUE(cert.basic);
    }
}

TEST(ThermalTensors, OutputInvarianceAndMajorization) {
    std::mt19937_64 rng(4);
    auto g = gibbs_weights({0.0, 0.8, 1.7}, 0.9);
    auto first = enumerate_thermal_vertices(g, ThermalSlot::First);
    for (int n = 0; n < 100; ++n) {
        std::vector<StochasticTensor> pick;
        for (int m = 0; m < 4; ++m) pick.push_back(first[std::uniform_int_distribution<std::size_t>(0, 999)(rng)]);
        auto t = random_mixture(rng, pick);
        ASSERT_TRUE(is_thermal(t, g, ThermalSlot::First));
        auto p = random_prob(rng, 3, 0.2), q = random_prob(rng, 3, 0.2);
        EXPECT_LT(testutil::max_diff(apply_tensor(t, g.gamma, q), g.gamma), 1e-12);
        EXPECT_TRUE(thermo_majorizes(p, apply_tensor(t, p, q), g));
    }
}

TEST(BithermalTensors, OutputInvarianceAndBothMajorizations) {
    std::mt19937_64 rng(5);
    for (double beta : {0.0, 0.6, 1.5}) {
        auto g = gibbs_weights({0.0, 1.0, 2.0}, beta);
        auto vs = enumerate_bithermal_vertices(g);
        for (int n = 0; n < 60; ++n) {
            auto t = n < 20 ? vs[n % vs.size()] : random_mixture(rng, vs);
            auto p = random_prob(rng, 3, 0.2), q = random_prob(rng, 3, 0.2);
            EXPECT_LT(testutil::max_diff(apply_tensor(t, g.gamma, q), g.gamma), 1e-9);
            EXPECT_LT(testutil::max_diff(apply_tensor(t, p, g.gamma), g.gamma), 1e-9);
            auto r = apply_tensor(t, p, q);
            EXPECT_TRUE(thermo_majorizes(p, r, g));
            EXPECT_TRUE(thermo_majorizes(q, r, g));
        }
    }
}

TEST(Relabeling, DetectsAxisAndValuePermutations) {
    auto s = half_integral_tristochastic();
    Tensor3<double> t(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) t((i + 1) % 3, k, (2 * j) % 3) = s(i, j, k);
    EXPECT_TRUE(equal_up_to_relabeling(s, t));
    EXPECT_FALSE(equal_up_to_relabeling(s, cyclic_permutation_tensor(3).tensor()));
}

TEST(Tangent, QubitReproducesFirstOrderTerms) {
    EnergySpectrum e{0.0, 1.0};
    // d/dbeta at beta = 0 of the printed qubit tensors with g = exp(-beta): g' = -1.
    auto t1 = extremal_bithermal_first(1.0), t2 = extremal_bithermal_second(1.0);
    Tensor3<double> d1(2), d2(2);
    d1(0, 0, 0) = 1;
    d1(1, 0, 0) = -1;
    d2(0, 0, 0) = -1;
    d2(0, 0, 1) = d2(0, 1, 0) = 1;
    d2(1, 0, 0) = 1;
    d2(1, 0, 1) = d2(1, 1, 0) = -1;
    for (auto [base, deriv] : {std::pair{t1, d1}, std::pair{t2, d2}}) {
        auto rep = tangent_cone_extremals(StochasticTensor(base), e);
        bool found = false;
        for (const auto& v : rep.extremals) found = found || tensor_diff(v.a1, deriv) < 1e-12;
        EXPECT_TRUE(found);
    }
}

TEST(Tangent, PermutationTensorReport) {
    auto rep = tangent_cone_extremals(cyclic_permutation_tensor(3), {0.0, 1.0, 2.0});
    EXPECT_EQ(rep.expected, 67u);
    EXPECT_EQ(rep.matches_expected, rep.extremals.size() == 67u);
    EXPECT_EQ(rep.signatures.size(), rep.extremals.size());
    EXPECT_EQ(std::set<std::string>(rep.signatures.begin(), rep.signatures.end()).size(), rep.signatures.size());
    const auto base = cyclic_permutation_tensor(3);
    std::vector<double> e{0.0, 1.0, 2.0};
    for (std::size_t n = 0; n < rep.extremals.size(); ++n) {
        const auto& a = rep.extremals[n].a1;
        EXPECT_TRUE(rep.certificates[n].basic);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                double col = 0;
                for (std::size_t i = 0; i < 3; ++i) col += a(i, j, k);
                EXPECT_NEAR(col, 0.0, 1e-12);
            }
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t f = 0; f < 3; ++f) {
                double s1 = 0, r1 = -e[i], s2 = 0, r2 = -e[i];
                for (std::size_t m = 0; m < 3; ++m) {
                    s1 += a(i, m, f);
                    r1 += base(i, m, f) * e[m];
                    s2 += a(i, f, m);
                    r2 += base(i, f, m) * e[m];
                }
                EXPECT_NEAR(s1, r1, 1e-12);
                EXPECT_NEAR(s2, r2, 1e-12);
            }
        for (std::size_t v = 0; v < 27; ++v)
            if (base.tensor().data[v] == 0.0) EXPECT_GE(a.data[v], -1e-12);
    }
}

TEST(Tangent, DegenerateEnergiesGiveZeroMarginals) {
    auto rep = tangent_cone_extremals(cyclic_permutation_tensor(3), {1.0, 1.0, 1.0});
    auto check = [](const Tensor3<double>& a) {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t f = 0; f < 3; ++f) {
                double s1 = 0, s2 = 0;
                for (std::size_t m = 0; m < 3; ++m) {
                    s1 += a(i, m, f);
                    s2 += a(i, f, m);
                }
                EXPECT_NEAR(s1, 0.0, 1e-12);
                EXPECT_NEAR(s2, 0.0, 1e-12);
            }
    };
    for (const auto& v : rep.extremals) check(v.a1);
    for (const auto& r : rep.rays) check(r);
    EXPECT_FALSE(rep.rays.empty());
}

TEST(Tangent, RejectsNonTristochasticBase) {
    auto [t1, t2] = extremal_bithermal_d2(qubit(0.5));
    EXPECT_THROW(tangent_cone_extremals(t1, {0.0, 1.0}), Error);
}

TEST(Tangent, NormalisedHasUnitMaxNorm) {
    auto rep = tangent_cone_extremals(cyclic_permutation_tensor(3), {0.0, 1.0, 2.0});
    for (const auto& v : rep.extremals) {
        auto n = v.normalised();
        double m = 0;
        for (double x : n.a1.data) m = std::max(m, std::abs(x));
        EXPECT_NEAR(m, 1.0, 1e-12);
    }
}
