#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "evifuse/errors.hpp"
#include "evifuse/opinion.hpp"

using namespace evifuse;

namespace {

double mass(const Opinion& o) {
    return o.uncertainty() + std::accumulate(o.credibility().begin(), o.credibility().end(), 0.0);
}

std::vector<double> random_evidence(std::mt19937_64& gen, std::size_t k) {
    std::uniform_real_distribution<double> scale(0.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> e(k);
    const double s = std::pow(10.0, scale(gen)) / 10.0;  // spread over [0.1, 100]
    for (double& v : e) {
        v = unit(gen) < 0.2 ? 0.0 : s * unit(gen);
    }
    return e;
}

void expect_vec_near(std::span<const double> a, std::span<const double> b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
    }
}

}  // namespace

TEST(EvidenceToOpinion, ZeroEvidenceIsVacuous) {
    const Opinion o = evidence_to_opinion(Evidence({0, 0, 0}));
    expect_vec_near(o.credibility(), std::vector<double>{0, 0, 0}, 0.0);
    EXPECT_EQ(o.uncertainty(), 1.0);
}

TEST(EvidenceToOpinion, HandArithmetic) {
    const Opinion o = evidence_to_opinion(Evidence({4, 1, 0}));
    expect_vec_near(o.credibility(), std::vector<double>{0.5, 0.125, 0.0}, 1e-15);
    EXPECT_NEAR(o.uncertainty(), 0.375, 1e-15);
}

TEST(EvidenceToOpinion, AerialStadiumCase) {
    std::vector<double> e(11, 0.0);
    e[0] = 31.589;
    e[1] = 6.135;
    const Opinion o = evidence_to_opinion(Evidence(e));
    EXPECT_NEAR(o.uncertainty(), 11.0 / 48.724, 1e-15);
    EXPECT_NEAR(o.uncertainty(), 0.226, 0.01);
}

TEST(EvidenceToOpinion, Errors) {
    EXPECT_THROW(Evidence({1.0}), DimensionError);
    EXPECT_THROW(Evidence({1.0, -0.5}), DomainError);
    EXPECT_THROW(Evidence({1.0, NAN}), DomainError);
}

TEST(EvidenceToDirichlet, Examples) {
    const DirichletParams a = evidence_to_dirichlet(Evidence({0, 0}));
    expect_vec_near(a.alpha(), std::vector<double>{1, 1}, 0.0);
    EXPECT_EQ(a.alpha0(), 2.0);
    const DirichletParams b = evidence_to_dirichlet(Evidence({4, 1, 0}));
    expect_vec_near(b.alpha(), std::vector<double>{5, 2, 1}, 0.0);
    EXPECT_EQ(b.alpha0(), 8.0);
    std::vector<double> e(11, 0.0);
    e[0] = 31.589;
    e[1] = 6.135;
    EXPECT_NEAR(evidence_to_dirichlet(Evidence(e)).alpha0(), 48.724, 1e-12);
}

TEST(DirichletToOpinion, Examples) {
    const Opinion v = dirichlet_to_opinion(DirichletParams({1, 1, 1}));
    expect_vec_near(v.credibility(), std::vector<double>{0, 0, 0}, 0.0);
    EXPECT_EQ(v.uncertainty(), 1.0);
    const Opinion o = dirichlet_to_opinion(DirichletParams({5, 2, 1}));
    expect_vec_near(o.credibility(), std::vector<double>{0.5, 0.125, 0.0}, 1e-15);
    EXPECT_NEAR(o.uncertainty(), 0.375, 1e-15);
    const Opinion h = dirichlet_to_opinion(DirichletParams({2, 2}));
    expect_vec_near(h.credibility(), std::vector<double>{0.25, 0.25}, 1e-15);
    EXPECT_NEAR(h.uncertainty(), 0.5, 1e-15);
    EXPECT_THROW(DirichletParams({0.5, 2.0}), DomainError);
}

TEST(OpinionToEvidence, Examples) {
    expect_vec_near(opinion_to_evidence(Opinion::vacuous(3)).values(), std::vector<double>{0, 0, 0}, 0.0);
    expect_vec_near(opinion_to_evidence(Opinion({0.5, 0.125, 0.0}, 0.375)).values(),
                    std::vector<double>{4, 1, 0}, 1e-12);
    // Fused opinion of the two-view worked example, to six printed digits.
    const Opinion fused({0.363636, 0.272727, 0.145455}, 0.218182);
    expect_vec_near(opinion_to_evidence(fused).values(), std::vector<double>{5.0, 3.75, 2.0}, 1e-4);
}

TEST(Opinion, ValidationRejectsMalformedInput) {
    EXPECT_THROW(Opinion({0.5, 0.5}, 0.5), DomainError);        // mass 1.5
    EXPECT_THROW(Opinion({0.6, -0.1}, 0.5), DomainError);       // negative credibility
    EXPECT_THROW(Opinion({0.5, 0.5}, 0.0), DomainError);        // u must be > 0
    EXPECT_THROW(Opinion({1.0}, 0.0), DimensionError);
    EXPECT_NO_THROW(Opinion({0.25, 0.25}, 0.5 + 5e-10));        // inside tolerance
    EXPECT_THROW(Opinion({0.25, 0.25}, 0.5 + 2e-9), DomainError);
}

TEST(DirichletLogDensity, Examples) {
    EXPECT_NEAR(dirichlet_log_density(DirichletParams({1, 1, 1}), SimplexPoint({0.2, 0.3, 0.5})),
                0.6931471805599453, 1e-14);
    EXPECT_NEAR(dirichlet_log_density(DirichletParams({2, 1}), SimplexPoint({0.75, 0.25})),
                std::log(1.5), 1e-14);
    EXPECT_NEAR(dirichlet_log_density(DirichletParams({1, 1}), SimplexPoint({0.5, 0.5})), 0.0, 1e-14);
}

TEST(DirichletLogDensity, BoundaryAndErrors) {
    EXPECT_EQ(dirichlet_log_density(DirichletParams({2, 1}), SimplexPoint({0.0, 1.0})),
              -std::numeric_limits<double>::infinity());
    // alpha_k = 1 makes the p_k = 0 face harmless
    EXPECT_NEAR(dirichlet_log_density(DirichletParams({1, 2}), SimplexPoint({0.0, 1.0})), std::log(2.0), 1e-14);
    EXPECT_THROW(SimplexPoint({0.5, 0.6}), DomainError);
    EXPECT_THROW(dirichlet_log_density(DirichletParams({1, 1, 1}), SimplexPoint({0.5, 0.5})), DimensionError);
}

TEST(DirichletLogDensity, IntegratesToOneMonteCarlo) {
    // Uniform draws on the 3-simplex have density 2, so E_uniform[D / 2] = 1.
    std::mt19937_64 gen(5);
    std::exponential_distribution<double> expo(1.0);
    const DirichletParams d({3.0, 2.0, 1.5});
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = expo(gen), b = expo(gen), c = expo(gen);
        const double s = a + b + c;
        const double v = std::exp(dirichlet_log_density(d, SimplexPoint({a / s, b / s, 1.0 - a / s - b / s}))) / 2.0;
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, 1.0, 4.0 * se);
}

TEST(OpinionProperties, MassAndRoundTrips) {
    std::mt19937_64 gen(1234);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 15);
        const Evidence e(random_evidence(gen, k));
        const Opinion o = evidence_to_opinion(e);
        EXPECT_NEAR(mass(o), 1.0, 1e-12);
        EXPECT_GT(o.uncertainty(), 0.0);

        const Evidence back = opinion_to_evidence(o);
        const Evidence via_dirichlet = opinion_to_evidence(dirichlet_to_opinion(evidence_to_dirichlet(e)));
        for (std::size_t j = 0; j < k; ++j) {
            EXPECT_NEAR(back[j], e[j], 1e-10 * std::max(1.0, e[j]));
            EXPECT_NEAR(via_dirichlet[j], e[j], 1e-10 * std::max(1.0, e[j]));
        }

        const Opinion o2 = dirichlet_to_opinion(evidence_to_dirichlet(e));
        expect_vec_near(o2.credibility(), o.credibility(), 1e-12);
        EXPECT_NEAR(o2.uncertainty(), o.uncertainty(), 1e-12);
    }
}

TEST(OpinionProperties, MonotoneInEvidence) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> bump(0.01, 5.0);
    for (int i = 0; i < 500; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 9);
        std::vector<double> e = random_evidence(gen, k);
        const Opinion before = evidence_to_opinion(Evidence(e));
        const std::size_t j = static_cast<std::size_t>(i) % k;
        e[j] += bump(gen);
        const Opinion after = evidence_to_opinion(Evidence(e));
        EXPECT_LT(after.uncertainty(), before.uncertainty());
        EXPECT_GT(after.credibility()[j], before.credibility()[j]);
    }
}

TEST(OpinionProperties, ArgmaxAgreesAcrossRepresentations) {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> small(0, 3);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 15);
        // Small integers make ties frequent.
        std::vector<double> e(k);
        for (double& v : e) v = small(gen);
        const Evidence ev(e);
        const std::size_t top = argmax(ev.values());
        EXPECT_EQ(argmax(evidence_to_opinion(ev).credibility()), top);
        EXPECT_EQ(argmax(evidence_to_dirichlet(ev).alpha()), top);
        EXPECT_EQ(static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin()), top);
    }
}

TEST(OpinionJson, RoundTrip) {
    const Opinion o({0.5, 0.125, 0.0}, 0.375);
    const auto j = to_json(o);
    EXPECT_EQ(j.at("uncertainty").get<double>(), 0.375);
    EXPECT_EQ(opinion_from_json(j), o);
    const Evidence e({4.0, 1.0, 0.0});
    EXPECT_EQ(evidence_from_json(to_json(e)), e);
    EXPECT_THROW(opinion_from_json(nlohmann::json{{"credibility", {0.5, 0.5}}}), ConfigError);
}
