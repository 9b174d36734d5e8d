#include "evifuse/opinion.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "evifuse/errors.hpp"
#include "evifuse/numerics.hpp"

namespace evifuse {

namespace {

double sum(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

Evidence::Evidence(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw DimensionError("evidence needs at least 2 classes");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("evidence entries must be finite and non-negative");
        }
    }
}

double Evidence::total() const noexcept { return sum(values_); }

Opinion::Opinion(std::vector<double> credibility, double uncertainty)
    : credibility_(std::move(credibility)), uncertainty_(uncertainty) {
    if (credibility_.size() < 2) {
        throw DimensionError("opinion needs at least 2 classes");
    }
    if (!std::isfinite(uncertainty_) || uncertainty_ <= 0.0 || uncertainty_ > 1.0 + kSimplexTolerance) {
        throw DomainError("opinion uncertainty must lie in (0, 1]");
    }
    for (double c : credibility_) {
        if (!std::isfinite(c) || c < 0.0) {
            throw DomainError("opinion credibility must be finite and non-negative");
        }
    }
    const double mass = uncertainty_ + sum(credibility_);
    if (std::abs(mass - 1.0) > kSimplexTolerance) {
        throw DomainError("opinion mass u + sum(c) = " + std::to_string(mass) + " is not 1");
    }
}

Opinion Opinion::vacuous(std::size_t num_classes) {
    return Opinion(std::vector<double>(num_classes, 0.0), 1.0);
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) {
        throw DimensionError("Dirichlet needs at least 2 classes");
    }
    for (double a : alpha_) {
        if (!std::isfinite(a) || a < 1.0) {
            throw DomainError("Dirichlet concentration must be finite and >= 1");
        }
    }
    alpha0_ = sum(alpha_);
}

SimplexPoint::SimplexPoint(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
        throw DimensionError("simplex point needs at least 2 entries");
    }
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw DomainError("simplex entries must lie in [0, 1]");
        }
    }
    if (std::abs(sum(probs_) - 1.0) > kSimplexTolerance) {
        throw DomainError("simplex entries must sum to 1");
    }
}

Opinion evidence_to_opinion(const Evidence& e) {
    const auto k = static_cast<double>(e.num_classes());
    const double strength = e.total() + k;
    std::vector<double> c(e.num_classes());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = e[i] / strength;
    }
    return Opinion(std::move(c), k / strength);
}

DirichletParams evidence_to_dirichlet(const Evidence& e) {
    std::vector<double> alpha(e.values().begin(), e.values().end());
    for (double& a : alpha) {
        a += 1.0;
    }
    return DirichletParams(std::move(alpha));
}

Opinion dirichlet_to_opinion(const DirichletParams& d) {
    const double a0 = d.alpha0();
    std::vector<double> c(d.num_classes());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = (d[i] - 1.0) / a0;
    }
    return Opinion(std::move(c), static_cast<double>(d.num_classes()) / a0);
}

Evidence dirichlet_to_evidence(const DirichletParams& d) {
    std::vector<double> e(d.alpha().begin(), d.alpha().end());
    for (double& v : e) {
        v -= 1.0;
    }
    return Evidence(std::move(e));
}

Evidence opinion_to_evidence(const Opinion& o) {
    const double u = o.uncertainty();
    if (!(u > 0.0)) {
        throw DomainError("cannot recover evidence from an opinion with u <= 0");
    }
    const auto k = static_cast<double>(o.num_classes());
    std::vector<double> e(o.num_classes());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = k * o.credibility()[i] / u;
    }
    return Evidence(std::move(e));
}

double dirichlet_log_density(const DirichletParams& d, const SimplexPoint& p) {
    if (p.size() != d.num_classes()) {
        throw DimensionError("Dirichlet and simplex point differ in dimension");
    }
    double log_kernel = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double exponent = d[i] - 1.0;
        if (exponent == 0.0) {
            continue;
        }
        if (p.probs()[i] == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        log_kernel += exponent * std::log(p.probs()[i]);
    }
    return log_kernel - numerics::log_multivariate_beta(d.alpha());
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

nlohmann::json to_json(const Opinion& o) {
    return {{"credibility", std::vector<double>(o.credibility().begin(), o.credibility().end())},
            {"uncertainty", o.uncertainty()}};
}

nlohmann::json to_json(const Evidence& e) {
    return {{"evidence", std::vector<double>(e.values().begin(), e.values().end())}};
}

Opinion opinion_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("credibility") || !j.contains("uncertainty")) {
        throw ConfigError("opinion JSON needs \"credibility\" and \"uncertainty\"");
    }
    try {
        return Opinion(j.at("credibility").get<std::vector<double>>(), j.at("uncertainty").get<double>());
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed opinion JSON: ") + ex.what());
    }
}

Evidence evidence_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("evidence")) {
        throw ConfigError("evidence JSON needs \"evidence\"");
    }
    try {
        return Evidence(j.at("evidence").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed evidence JSON: ") + ex.what());
    }
}

}  // namespace evifuse
