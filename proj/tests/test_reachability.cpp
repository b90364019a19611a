#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace thermolocc;
using testutil::max_diff;
using testutil::random_prob;

namespace {

const GibbsWeights& half() {
    static const GibbsWeights g = GibbsWeights::from_reference(ProbVector{2.0 / 3.0, 1.0 / 3.0});
    return g;
}

ProbVector bit(double p0) { return ProbVector{p0, 1.0 - p0}; }

StochasticTensor mixture(std::mt19937_64& rng, const std::vector<StochasticTensor>& vs) {
    std::exponential_distribution<double> ex(1.0);
    Tensor3<double> t(vs.front().dimension());
    double tot = 0.0;
    for (const auto& v : vs) {
        double w = ex(rng);
        w = w * w * w; // skew towards a few vertices
        tot += w;
        for (std::size_t n = 0; n < t.data.size(); ++n) t.data[n] += w * v.tensor().data[n];
    }
    for (auto& x : t.data) x /= tot;
    return StochasticTensor::normalised(t);
}

// Largest violation of curve(r) <= envelope, sampled at the elbows of both curves.
double envelope_violation(const MajorizationCurve& env, const MajorizationCurve& c) {
    double worst = -INFINITY;
    for (const auto& [x, y] : c.elbows) worst = std::max(worst, y - curve_eval(env, x));
    for (const auto& [x, y] : env.elbows) worst = std::max(worst, curve_eval(c, x) - y);
    return worst;
}

} // namespace

TEST(ThermalReachable, Examples) {
    std::mt19937_64 rng(30);
    auto g = gibbs_weights({0.0, 0.6, 1.1}, 1.2);
    for (int n = 0; n < 20; ++n) {
        auto p = random_prob(rng, 3), q = random_prob(rng, 3);
        EXPECT_TRUE(thermal_reachable(p, q, g.gamma, g));
        EXPECT_TRUE(thermal_reachable(p, q, p, g));
        auto r = random_prob(rng, 3);
        if (max_diff(r, g.gamma) > 1e-6) EXPECT_FALSE(thermal_reachable(g.gamma, q, r, g));
    }
}

TEST(ThermalReachable, IndependentOfSecondInput) {
    std::mt19937_64 rng(31);
    auto g = gibbs_weights({0.0, 0.6, 1.1}, 1.2);
    for (int n = 0; n < 100; ++n) {
        auto p = random_prob(rng, 3, 0.3), r = random_prob(rng, 3, 0.3), q = random_prob(rng, 3);
        bool v = thermal_reachable(p, q, r, g);
        std::vector<double> qs = q.to_vector();
        std::sort(qs.begin(), qs.end());
        do {
            EXPECT_EQ(thermal_reachable(p, ProbVector(qs), r, g), v);
        } while (std::next_permutation(qs.begin(), qs.end()));
    }
}

TEST(ThermalReachable, ConstantLayerWitness) {
    std::mt19937_64 rng(32);
    auto g = gibbs_weights({0.0, 0.6, 1.1}, 1.2);
    for (int n = 0; n < 50; ++n) {
        auto p = random_prob(rng, 3), q = random_prob(rng, 3), r = random_prob(rng, 3);
        if (!thermal_reachable(p, q, r, g)) continue;
        auto lam = witness_matrix(p, r, g);
        ASSERT_TRUE(lam.has_value());
        auto t = StochasticTensor::constant_layers(*lam);
        EXPECT_TRUE(is_thermal(t, g, ThermalSlot::First));
        EXPECT_LT(max_diff(apply_tensor(t, p, q), r), 1e-9);
    }
}

TEST(BithermalReachable, ImagesOfBithermalTensorsAreReachable) {
    std::mt19937_64 rng(33);
    for (double beta : {0.0, 0.7}) {
        auto g = gibbs_weights({0.0, 1.0, 1.8}, beta);
        auto vs = enumerate_bithermal_vertices(g);
        for (int n = 0; n < 30; ++n) {
            auto p = random_prob(rng, 3, 0.3), q = random_prob(rng, 3, 0.3);
            auto r = apply_tensor(mixture(rng, vs), p, q);
            auto w = bithermal_witness(p, q, r, g);
            ASSERT_TRUE(w.has_value());
            EXPECT_TRUE(is_bithermal(*w, g, 1e-8));
            EXPECT_LT(max_diff(apply_tensor(*w, p, q), r), 1e-8);
        }
    }
}

TEST(BithermalReachable, GibbsInputsOnlyReachGibbs) {
    auto g = gibbs_weights({0.0, 1.0, 1.8}, 0.7);
    EXPECT_TRUE(bithermal_reachable_exact(g.gamma, g.gamma, g.gamma, g));
    EXPECT_FALSE(bithermal_reachable_exact(g.gamma, g.gamma, ProbVector{0.5, 0.3, 0.2}, g));
    EXPECT_FALSE(bithermal_reachable_exact(half().gamma, half().gamma, bit(0.6), half()));
    EXPECT_THROW(bithermal_reachable_exact(ProbVector::flat(4), ProbVector::flat(4), ProbVector::flat(4),
                                           gibbs_weights({0.0, 1.0, 2.0, 3.0}, 1.0)),
                 Error);
}

TEST(BithermalReachable, ImpliesBothMajorizations) {
    std::mt19937_64 rng(34);
    int positive = 0;
    for (int n = 0; n < 200; ++n) {
        auto p = random_prob(rng, 2), q = random_prob(rng, 2), r = random_prob(rng, 2);
        if (!bithermal_reachable_exact(p, q, r, half())) continue;
        ++positive;
        EXPECT_TRUE(thermo_majorizes(p, r, half()));
        EXPECT_TRUE(thermo_majorizes(q, r, half()));
    }
    EXPECT_GT(positive, 20);
}

TEST(BithermalReachable, QubitInterval) {
    // At d = 2 the reachable outputs interpolate the images of the two extremal tensors.
    std::mt19937_64 rng(35);
    const double g = 0.5;
    for (int n = 0; n < 30; ++n) {
        auto p = random_prob(rng, 2), q = random_prob(rng, 2);
        double a = apply_tensor(StochasticTensor(extremal_bithermal_first(g)), p, q)[0];
        double b = apply_tensor(StochasticTensor(extremal_bithermal_second(g)), p, q)[0];
        double lo = std::min(a, b), hi = std::max(a, b);
        for (double r0 = 0.0; r0 <= 1.0; r0 += 0.05) {
            bool inside = r0 > lo + 1e-9 && r0 < hi - 1e-9, outside = r0 < lo - 1e-9 || r0 > hi + 1e-9;
            if (inside) EXPECT_TRUE(bithermal_reachable_exact(p, q, bit(r0), half()));
            if (outside) EXPECT_FALSE(bithermal_reachable_exact(p, q, bit(r0), half()));
        }
    }
}

TEST(MaxCurveBound, GibbsInputsGiveDiagonal) {
    auto g = gibbs_weights({0.0, 1.0, 1.8}, 0.7);
    auto env = max_curve_bound(g.gamma, g.gamma, g, enumerate_bithermal_vertices(g));
    for (double x = 0.0; x <= 1.0; x += 0.1) EXPECT_NEAR(curve_eval(env, x), x, 1e-9);
    EXPECT_THROW(max_curve_bound(g.gamma, g.gamma, g, {}), Error);
}

TEST(MaxCurveBound, EnvelopeDominatesReachableOutputs) {
    auto vs = enumerate_bithermal_vertices(half());
    ASSERT_EQ(vs.size(), 2u);
    std::size_t checked = 0;
    for (int a = 0; a <= 10; ++a)
        for (int b = 0; b <= 10; ++b) {
            auto p = bit(a / 10.0), q = bit(b / 10.0);
            auto env = max_curve_bound(p, q, half(), vs);
            for (int c = 0; c <= 100; ++c) {
                auto r = bit(c / 100.0);
                if (!bithermal_reachable_exact(p, q, r, half())) continue;
                ++checked;
                EXPECT_LE(envelope_violation(env, thermo_curve(r, half())), 1e-9) << a << " " << b << " " << c;
            }
        }
    EXPECT_GT(checked, 1000u);
}

TEST(MaxCurveBound, EnvelopeIsPointwiseMaximum) {
    std::mt19937_64 rng(36);
    auto g = gibbs_weights({0.0, 1.0, 1.8}, 0.7);
    auto vs = enumerate_bithermal_vertices(g);
    for (int n = 0; n < 10; ++n) {
        auto p = random_prob(rng, 3), q = random_prob(rng, 3);
        auto env = max_curve_bound(p, q, g, vs);
        for (double x = 0.0; x <= 1.0; x += 0.01) {
            double y = 0.0;
            for (const auto& t : vs) y = std::max(y, curve_eval(thermo_curve(apply_tensor(t, p, q), g), x));
            EXPECT_NEAR(curve_eval(env, x), y, 1e-9);
        }
    }
}

// Numerical observation, not a theorem: at infinite temperature the permutation
// tensors alone already give the full envelope.
TEST(MaxCurveBound, PermutationSufficiencyConjecture) {
    std::mt19937_64 rng(37);
    auto g = gibbs_weights({0.0, 1.0, 2.0}, 0.0);
    auto vs = enumerate_bithermal_vertices(g);
    std::vector<StochasticTensor> perms;
    for (const auto& v : vs)
        if (is_zero_one(v.tensor())) perms.push_back(v);
    ASSERT_EQ(perms.size(), 12u);
    ASSERT_GT(vs.size(), perms.size());
    for (int n = 0; n < 100; ++n) {
        auto p = random_prob(rng, 3, 0.3), q = random_prob(rng, 3, 0.3);
        auto full = max_curve_bound(p, q, g, vs), part = max_curve_bound(p, q, g, perms);
        for (double x = 0.0; x <= 1.0; x += 0.02) EXPECT_NEAR(curve_eval(full, x), curve_eval(part, x), 1e-9);
    }
}

TEST(BoundaryDistribution, Examples) {
    auto b = boundary_distribution(bit(0.8), half());
    EXPECT_NEAR(b.weight, 0.6, 1e-15);
    EXPECT_NEAR(b.tilde_p[0], 1.0, 1e-15);
    EXPECT_EQ(b.tilde_p[1], 0.0);

    auto e = boundary_distribution(ProbVector{0.0, 0.3, 0.7}, gibbs_weights({0.0, 1.0, 2.0}, 1.0));
    EXPECT_EQ(e.weight, 0.0);
    EXPECT_EQ(e.tilde_p.to_vector(), (std::vector<double>{0.0, 0.3, 0.7}));

    EXPECT_THROW(boundary_distribution(half().gamma, half()), Error);
    try {
        boundary_distribution(half().gamma, half());
    } catch (const Error& err) {
        EXPECT_STREQ(err.what(), "input is Gibbs; projection undefined");
    }
}

TEST(BoundaryDistribution, ReconstructsInput) {
    std::mt19937_64 rng(38);
    for (int n = 0; n < 100; ++n) {
        std::size_t d = 2 + n % 4;
        auto g = gibbs_weights(testutil::random_spectrum(rng, d), 0.2 + 0.03 * n);
        auto p = random_prob(rng, d, 0.2);
        auto b = boundary_distribution(p, g);
        EXPECT_GE(b.weight, 0.0);
        EXPECT_LT(b.weight, 1.0);
        Eigen::VectorXd back = (1.0 - b.weight) * b.tilde_p.values() + b.weight * g.gamma.values();
        EXPECT_LT((back - p.values()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE(b.tilde_p.values().minCoeff(), kNormTol);
        double w = INFINITY;
        for (std::size_t i = 0; i < d; ++i) w = std::min(w, p[i] / g[i]);
        EXPECT_NEAR(b.weight, w, 1e-15);
    }
}

TEST(Enhanced, GibbsOutputReducesToPlainConditions) {
    std::mt19937_64 rng(39);
    auto g = gibbs_weights({0.0, 0.6, 1.1}, 1.2);
    for (int n = 0; n < 30; ++n) {
        auto p = random_prob(rng, 3), q = random_prob(rng, 3);
        auto c = enhanced_necessary_detail(p, q, g.gamma, g);
        EXPECT_TRUE(c.holds);
        EXPECT_LT((c.rbar - g.gamma.values()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Enhanced, NeverWeakerThanPlainMajorizations) {
    std::mt19937_64 rng(40);
    auto g = gibbs_weights({0.0, 0.6, 1.1}, 1.2);
    for (int n = 0; n < 300; ++n) {
        auto p = random_prob(rng, 3, 0.3), q = random_prob(rng, 3, 0.3), r = random_prob(rng, 3, 0.3);
        if (enhanced_necessary(p, q, r, g)) {
            EXPECT_TRUE(thermo_majorizes(p, r, g));
            EXPECT_TRUE(thermo_majorizes(q, r, g));
        }
    }
}

TEST(Enhanced, SoundOnQubitTriples) {
    std::mt19937_64 rng(41);
    int positive = 0;
    for (int n = 0; n < 200; ++n) {
        auto p = random_prob(rng, 2), q = random_prob(rng, 2);
        auto vs = enumerate_bithermal_vertices(half());
        auto r = n % 2 ? random_prob(rng, 2) : apply_tensor(mixture(rng, vs), p, q);
        if (!bithermal_reachable_exact(p, q, r, half())) continue;
        ++positive;
        EXPECT_TRUE(enhanced_necessary(p, q, r, half())) << p[0] << " " << q[0] << " " << r[0];
    }
    EXPECT_GT(positive, 100);
}

TEST(Enhanced, SoundOnQutritTriples) {
    std::mt19937_64 rng(42);
    auto g = gibbs_weights({0.0, 0.8, 1.5}, 1.0);
    auto vs = enumerate_bithermal_vertices(g);
    for (int n = 0; n < 200; ++n) {
        auto p = random_prob(rng, 3, 0.3), q = random_prob(rng, 3, 0.3);
        auto r = apply_tensor(mixture(rng, vs), p, q);
        ASSERT_TRUE(bithermal_reachable_exact(p, q, r, g));
        EXPECT_TRUE(enhanced_necessary(p, q, r, g));
    }
}

TEST(Enhanced, StrictlyStrongerFixture) {
    // Both inputs sit near the excited level. Their projections are both (0, 1) with
    // weights 0.075 and 0.15, so r_bar_0 = (0.1 - 0.21375 * 2/3) / 0.78625 < 0.
    auto p = bit(0.05), q = bit(0.1), r = bit(0.1);
    EXPECT_TRUE(thermo_majorizes(p, r, half()));
    EXPECT_TRUE(thermo_majorizes(q, r, half()));
    auto c = enhanced_necessary_detail(p, q, r, half());
    EXPECT_FALSE(c.rbar_valid);
    EXPECT_NEAR(c.rbar[0], (0.1 - 0.21375 * 2.0 / 3.0) / 0.78625, 1e-12);
    EXPECT_FALSE(c.holds);
    EXPECT_FALSE(bithermal_reachable_exact(p, q, r, half()));
}

TEST(Enhanced, NotSufficientFixture) {
    // Passes the enhanced test but lies outside the reachable interval.
    auto p = bit(0.7), q = bit(1.0), r = bit(0.7);
    EXPECT_TRUE(enhanced_necessary(p, q, r, half()));
    EXPECT_FALSE(bithermal_reachable_exact(p, q, r, half()));
}
