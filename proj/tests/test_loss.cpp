#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "evifuse/errors.hpp"
#include "evifuse/loss.hpp"
#include "evifuse/numerics.hpp"

using namespace evifuse;

namespace {

// psi(n) = -gamma + H_{n-1} for integer n, so psi(a0) - psi(ak) = H_{a0-1} - H_{ak-1}.
double harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

double harmonic_gap(int a0, int ak) { return harmonic(a0 - 1) - harmonic(ak - 1); }

std::vector<double> random_alpha(std::mt19937_64& gen, std::size_t k) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> a(k);
    for (double& v : a) v = std::pow(10.0, 2.0 * unit(gen));  // [1, 100)
    return a;
}

double fd_relative_error(const std::vector<double>& alpha, const LabelOneHot& y) {
    double worst = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        const double h = 1e-5 * alpha[j];
        // Keep the stencil inside alpha >= 1.
        auto center = alpha;
        if (center[j] - h < 1.0) center[j] = 1.0 + h;
        auto up = center, down = center;
        up[j] += h;
        down[j] -= h;
        const double fd = (reciprocal_loss(DirichletParams(up), y).total -
                           reciprocal_loss(DirichletParams(down), y).total) / (2.0 * h);
        const double an = reciprocal_loss_grad(DirichletParams(center), y)[j];
        worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1e-8));
    }
    return worst;
}

}  // namespace

TEST(LabelOneHot, Validation) {
    EXPECT_THROW(LabelOneHot(3, 3), DomainError);
    EXPECT_THROW(LabelOneHot(0, 1), DimensionError);
    const std::vector<double> ok{0, 1, 0};
    EXPECT_EQ(LabelOneHot::from_vector(ok).label(), 1u);
    const std::vector<double> two{1, 1, 0};
    const std::vector<double> none{0, 0, 0};
    const std::vector<double> frac{0.5, 0.5};
    EXPECT_THROW(LabelOneHot::from_vector(two), DomainError);
    EXPECT_THROW(LabelOneHot::from_vector(none), DomainError);
    EXPECT_THROW(LabelOneHot::from_vector(frac), DomainError);
}

TEST(ReciprocalLoss, HarmonicExamples) {
    const LossBreakdown a = reciprocal_loss(DirichletParams({5, 2, 1}), LabelOneHot(0, 3));
    EXPECT_NEAR(a.positive, 1.0 / 5 + 1.0 / 6 + 1.0 / 7, 1e-13);
    EXPECT_NEAR(a.positive, 0.5095238095238095, 1e-13);
    EXPECT_NEAR(a.negative, 1.0 / harmonic_gap(8, 2) + 1.0 / harmonic_gap(8, 1), 1e-13);
    EXPECT_NEAR(a.negative, 1.0134776217124364, 1e-13);
    EXPECT_DOUBLE_EQ(a.total, a.positive + a.negative);

    EXPECT_NEAR(reciprocal_loss(DirichletParams({2, 1}), LabelOneHot(0, 2)).positive, 0.5, 1e-14);

    const LossBreakdown c = reciprocal_loss(DirichletParams({1, 1, 1}), LabelOneHot(0, 3));
    EXPECT_NEAR(c.positive, 1.5, 1e-14);
    EXPECT_NEAR(c.negative, 4.0 / 3.0, 1e-14);
}

TEST(ReciprocalLoss, IntegerAlphaAgainstHarmonicOracle) {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> a(1, 40);
    for (int i = 0; i < 100; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 9);
        std::vector<double> alpha(k);
        int a0 = 0;
        for (double& v : alpha) {
            v = a(gen);
            a0 += static_cast<int>(v);
        }
        const std::size_t label = static_cast<std::size_t>(i) % k;
        const LossBreakdown l = reciprocal_loss(DirichletParams(alpha), LabelOneHot(label, k));
        double negative = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j != label) negative += 1.0 / harmonic_gap(a0, static_cast<int>(alpha[j]));
        }
        EXPECT_NEAR(l.positive, harmonic_gap(a0, static_cast<int>(alpha[label])), 1e-10);
        EXPECT_NEAR(l.negative, negative, 1e-10);
    }
}

TEST(ReciprocalLoss, Errors) {
    EXPECT_THROW(reciprocal_loss(DirichletParams({1, 1, 1}), LabelOneHot(0, 2)), DimensionError);
}

TEST(BayesRiskCe, IdenticalToPositiveTerm) {
    std::mt19937_64 gen(12);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 12);
        const DirichletParams d(random_alpha(gen, k));
        const LabelOneHot y(static_cast<std::size_t>(i) % k, k);
        EXPECT_EQ(bayes_risk_ce(d, y), reciprocal_loss(d, y).positive);
    }
    EXPECT_NEAR(bayes_risk_ce(DirichletParams({1, 1}), LabelOneHot(0, 2)), 1.0, 1e-14);
    EXPECT_NEAR(bayes_risk_ce(DirichletParams({5, 2, 1}), LabelOneHot(0, 3)), 0.5095238095238095, 1e-13);
}

TEST(BayesRiskCe, MatchesMonteCarloExpectation) {
    // E[-ln p_0] under Dirichlet(5, 2, 1) from gamma-normalized draws.
    std::mt19937_64 gen(77);
    const std::vector<double> alpha{5, 2, 1};
    std::vector<std::gamma_distribution<double>> gam;
    for (double a : alpha) gam.emplace_back(a, 1.0);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double g[3];
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            g[k] = gam[k](gen);
            total += g[k];
        }
        const double v = -std::log(g[0] / total);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(bayes_risk_ce(DirichletParams(alpha), LabelOneHot(0, 3)), mean, 3.0 * se);
}

TEST(ReciprocalLossGrad, FiniteDifferenceExample) {
    EXPECT_LE(fd_relative_error({5, 2, 1}, LabelOneHot(0, 3)), 1e-5);
}

TEST(ReciprocalLossGrad, Signs) {
    EXPECT_LT(reciprocal_loss_grad(DirichletParams({2, 2}), LabelOneHot(0, 2))[0], 0.0);
    EXPECT_GT(reciprocal_loss_grad(DirichletParams({5, 2, 1}), LabelOneHot(0, 3))[2], 0.0);
}

TEST(ReciprocalLossGrad, RandomFiniteDifferences) {
    std::mt19937_64 gen(100);
    for (int i = 0; i < 100; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 10);
        const auto alpha = random_alpha(gen, k);
        EXPECT_LE(fd_relative_error(alpha, LabelOneHot(static_cast<std::size_t>(i) % k, k)), 1e-5);
    }
}

TEST(ReciprocalLoss, MonotoneTerms) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> bump(0.01, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 10);
        auto alpha = random_alpha(gen, k);
        const std::size_t label = static_cast<std::size_t>(i) % k;
        const LabelOneHot y(label, k);
        const LossBreakdown before = reciprocal_loss(DirichletParams(alpha), y);

        // More positive evidence lowers the positive term.
        auto pos = alpha;
        pos[label] += bump(gen);
        EXPECT_LT(reciprocal_loss(DirichletParams(pos), y).positive, before.positive);

        // More evidence on a negative class raises the positive term and that
        // class's own summand of the negative term.
        const std::size_t neg = (label + 1) % k;
        auto more = alpha;
        more[neg] += bump(gen);
        const LossBreakdown after = reciprocal_loss(DirichletParams(more), y);
        EXPECT_GT(after.positive, before.positive);
        const double a0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
        const double m0 = std::accumulate(more.begin(), more.end(), 0.0);
        EXPECT_GT(1.0 / (numerics::digamma(m0) - numerics::digamma(more[neg])), 1.0 / (numerics::digamma(a0) - numerics::digamma(alpha[neg])));
    }
}

TEST(ReciprocalLoss, NegativeTermNotMonotoneAsAWhole) {
    // Raising one negative alpha also raises alpha_0, which widens the other
    // negative gaps. With a dominant negative class the sum can drop.
    const LabelOneHot y(0, 3);
    EXPECT_LT(reciprocal_loss(DirichletParams({1, 2, 50}), y).negative,
              reciprocal_loss(DirichletParams({1, 1, 50}), y).negative);
    EXPECT_GT(reciprocal_loss(DirichletParams({5, 2, 2}), y).negative,
              reciprocal_loss(DirichletParams({5, 2, 1}), y).negative);
}

TEST(ReciprocalLoss, PositiveTermVanishesWithGrowingEvidence) {
    const LabelOneHot y(0, 3);
    double prev = INFINITY;
    for (double a = 1.0; a < 1e7; a *= 10.0) {
        const LossBreakdown l = reciprocal_loss(DirichletParams({a, 2.0, 3.0}), y);
        EXPECT_LT(l.positive, prev);
        prev = l.positive;
        EXPECT_GT(l.negative, 0.0);
    }
    EXPECT_LT(prev, 1e-5);
}

TEST(GlobalLoss, Examples) {
    const DirichletParams d({2, 1});
    const LabelOneHot y(0, 2);
    EXPECT_NEAR(global_loss(d, d, d, y), 3.5, 1e-13);

    const DirichletParams a({5, 2, 1}), b({1, 3, 2}), f({4, 4, 1});
    const LabelOneHot y3(1, 3);
    const double g = global_loss(a, b, f, y3);
    for (const auto* p : {&a, &b, &f}) {
        EXPECT_GT(g, reciprocal_loss(*p, y3).total);
    }
    EXPECT_THROW(global_loss(a, DirichletParams({1, 1}), f, y3), DimensionError);
}

TEST(GlobalLoss, BatchIsMeanOfSamples) {
    const std::vector<GlobalLossSample> batch{
        {DirichletParams({2, 1}), DirichletParams({2, 1}), DirichletParams({2, 1}), LabelOneHot(0, 2)},
        {DirichletParams({1, 3}), DirichletParams({2, 2}), DirichletParams({4, 1}), LabelOneHot(1, 2)}};
    const double expected = (global_loss(batch[0].a, batch[0].b, batch[0].fused, batch[0].y) +
                             global_loss(batch[1].a, batch[1].b, batch[1].fused, batch[1].y)) / 2.0;
    EXPECT_DOUBLE_EQ(batch_global_loss(batch), expected);
    EXPECT_THROW(batch_global_loss({}), DimensionError);
}
