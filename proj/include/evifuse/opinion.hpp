#pragma once

// Evidence / opinion / Dirichlet algebra.
//
// A K-class classifier head emits non-negative evidence e. With S = sum(e_k + 1):
//   credibility  c_k = e_k / S
//   uncertainty  u   = K / S
//   Dirichlet    alpha_k = e_k + 1, alpha_0 = S
// so that u + sum(c) = 1 and u > 0 for any finite evidence.

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace evifuse {

// Global tolerance for simplex membership checks.
inline constexpr double kSimplexTolerance = 1e-9;

class Evidence {
public:
    // Throws DimensionError if fewer than 2 entries, DomainError on negative
    // or non-finite entries.
    explicit Evidence(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t num_classes() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double total() const noexcept;

    friend bool operator==(const Evidence&, const Evidence&) = default;

private:
    std::vector<double> values_;
};

class Opinion {
public:
    // Validated construction from raw (c, u). Rejects negative credibility,
    // u outside (0, 1], and |u + sum(c) - 1| > kSimplexTolerance.
    Opinion(std::vector<double> credibility, double uncertainty);

    // The vacuous opinion: c = 0, u = 1.
    static Opinion vacuous(std::size_t num_classes);

    std::span<const double> credibility() const noexcept { return credibility_; }
    double uncertainty() const noexcept { return uncertainty_; }
    std::size_t num_classes() const noexcept { return credibility_.size(); }

    friend bool operator==(const Opinion&, const Opinion&) = default;

private:
    std::vector<double> credibility_;
    double uncertainty_;
};

class DirichletParams {
public:
    // Throws DomainError if any alpha_k < 1 or non-finite.
    explicit DirichletParams(std::vector<double> alpha);

    std::span<const double> alpha() const noexcept { return alpha_; }
    double alpha0() const noexcept { return alpha0_; }
    std::size_t num_classes() const noexcept { return alpha_.size(); }
    double operator[](std::size_t k) const { return alpha_[k]; }

private:
    std::vector<double> alpha_;
    double alpha0_;
};

class SimplexPoint {
public:
    // Entries in [0, 1] summing to 1 within kSimplexTolerance.
    explicit SimplexPoint(std::vector<double> probs);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }

private:
    std::vector<double> probs_;
};

Opinion evidence_to_opinion(const Evidence& e);
DirichletParams evidence_to_dirichlet(const Evidence& e);
Opinion dirichlet_to_opinion(const DirichletParams& d);
Evidence dirichlet_to_evidence(const DirichletParams& d);

// e_k = K c_k / u. Also used to recover evidence from a fused opinion.
Evidence opinion_to_evidence(const Opinion& o);

// ln D(p | alpha). Returns -infinity when some p_k = 0 with alpha_k > 1.
double dirichlet_log_density(const DirichletParams& d, const SimplexPoint& p);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

nlohmann::json to_json(const Opinion& o);
nlohmann::json to_json(const Evidence& e);
Opinion opinion_from_json(const nlohmann::json& j);
Evidence evidence_from_json(const nlohmann::json& j);

}  // namespace evifuse
