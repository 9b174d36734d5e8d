#include "evifuse/fusion.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "evifuse/errors.hpp"

namespace evifuse {

FusionTerms fusion_terms(const Opinion& a, const Opinion& b) {
    if (a.num_classes() != b.num_classes()) {
        throw DimensionError("cannot fuse opinions over different class counts");
    }
    const std::size_t k = a.num_classes();
    const double ua = a.uncertainty();
    const double ub = b.uncertainty();
    const auto ca = a.credibility();
    const auto cb = b.credibility();

    FusionTerms t;
    t.credibility_numerators.resize(k);
    double agreement = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double both = ca[i] * cb[i];
        agreement += both;
        t.credibility_numerators[i] = both + (1.0 - ua) * ca[i] + (1.0 - ub) * cb[i];
    }
    t.uncertainty_numerator = ua * ub;
    t.lambda = ua * ub + (1.0 - ua) * (1.0 - ua) + (1.0 - ub) * (1.0 - ub) + agreement;
    return t;
}

FusedDecision fuse_opinions(const Opinion& a, const Opinion& b) {
    FusionTerms t = fusion_terms(a, b);
    std::vector<double> c = std::move(t.credibility_numerators);
    for (double& v : c) {
        v /= t.lambda;
    }
    Opinion fused(std::move(c), t.uncertainty_numerator / t.lambda);
    Evidence e = opinion_to_evidence(fused);
    const std::size_t predicted = argmax(e.values());
    return FusedDecision{std::move(fused), std::move(e), predicted, t.lambda};
}

FusedDecision fuse_sequence(std::span<const Opinion> opinions) {
    if (opinions.size() < 2) {
        throw DimensionError("fuse_sequence needs at least two opinions");
    }
    FusedDecision acc = fuse_opinions(opinions[0], opinions[1]);
    for (std::size_t i = 2; i < opinions.size(); ++i) {
        acc = fuse_opinions(acc.opinion, opinions[i]);
    }
    return acc;
}

namespace {

// Gradient of L(c, u) with c_k = e_k / S, u = K / S, S = sum(e) + K,
// pulled back to e:  dL/de_j = (gc_j - sum_k gc_k c_k - gu u) / S.
std::vector<double> opinion_vjp(const Evidence& e, std::span<const double> grad_c, double grad_u) {
    const auto k = static_cast<double>(e.num_classes());
    const double strength = e.total() + k;
    double dot = 0.0;
    for (std::size_t i = 0; i < e.num_classes(); ++i) {
        dot += grad_c[i] * e[i] / strength;
    }
    dot += grad_u * k / strength;
    std::vector<double> out(e.num_classes());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (grad_c[i] - dot) / strength;
    }
    return out;
}

}  // namespace

FusionGradient fuse_evidence_vjp(const Evidence& a, const Evidence& b,
                                 std::span<const double> upstream) {
    const std::size_t n = a.num_classes();
    if (b.num_classes() != n || upstream.size() != n) {
        throw DimensionError("fuse_evidence_vjp: dimension mismatch");
    }
    const auto k = static_cast<double>(n);
    const Opinion oa = evidence_to_opinion(a);
    const Opinion ob = evidence_to_opinion(b);
    const FusionTerms t = fusion_terms(oa, ob);
    const double lambda = t.lambda;
    const double u = t.uncertainty_numerator / lambda;
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = t.credibility_numerators[i] / lambda;
    }

    // e_k = K c_k / u
    std::vector<double> grad_c(n);
    double grad_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        grad_c[i] = k * upstream[i] / u;
        grad_u -= k * upstream[i] * c[i] / (u * u);
    }

    // c_k = num_k / lambda, u = num_u / lambda
    std::vector<double> grad_num(n);
    double grad_lambda = -grad_u * u / lambda;
    for (std::size_t i = 0; i < n; ++i) {
        grad_num[i] = grad_c[i] / lambda;
        grad_lambda -= grad_c[i] * c[i] / lambda;
    }
    const double grad_num_u = grad_u / lambda;

    const double ua = oa.uncertainty();
    const double ub = ob.uncertainty();
    const auto ca = oa.credibility();
    const auto cb = ob.credibility();
    std::vector<double> grad_ca(n);
    std::vector<double> grad_cb(n);
    double grad_ua = grad_num_u * ub + grad_lambda * (ub - 2.0 * (1.0 - ua));
    double grad_ub = grad_num_u * ua + grad_lambda * (ua - 2.0 * (1.0 - ub));
    for (std::size_t i = 0; i < n; ++i) {
        grad_ca[i] = grad_num[i] * (cb[i] + 1.0 - ua) + grad_lambda * cb[i];
        grad_cb[i] = grad_num[i] * (ca[i] + 1.0 - ub) + grad_lambda * ca[i];
        grad_ua -= grad_num[i] * ca[i];
        grad_ub -= grad_num[i] * cb[i];
    }

    return FusionGradient{opinion_vjp(a, grad_ca, grad_ua), opinion_vjp(b, grad_cb, grad_ub)};
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
        throw DimensionError("probability vector needs at least 2 entries");
    }
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw DomainError("probabilities must lie in [0, 1]");
        }
    }
    if (std::abs(std::accumulate(probs_.begin(), probs_.end(), 0.0) - 1.0) > kSimplexTolerance) {
        throw DomainError("probabilities must sum to 1");
    }
}

std::size_t fuse_baseline(const ProbVector& a, const ProbVector& b, BaselineRule rule,
                          BaselineMode mode) {
    if (a.size() != b.size()) {
        throw DimensionError("cannot fuse probability vectors of different length");
    }
    const auto pa = a.probs();
    const auto pb = b.probs();

    if (mode == BaselineMode::ViewSelect && (rule == BaselineRule::Max || rule == BaselineRule::Min)) {
        const std::size_t top_a = argmax(pa);
        const std::size_t top_b = argmax(pb);
        if (pa[top_a] == pb[top_b]) {
            return std::min(top_a, top_b);
        }
        const bool a_larger = pa[top_a] > pb[top_b];
        return (rule == BaselineRule::Max) == a_larger ? top_a : top_b;
    }

    std::vector<double> combined(pa.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        switch (rule) {
            case BaselineRule::Sum: combined[i] = pa[i] + pb[i]; break;
            case BaselineRule::Product: combined[i] = pa[i] * pb[i]; break;
            case BaselineRule::Max: combined[i] = std::max(pa[i], pb[i]); break;
            case BaselineRule::Min: combined[i] = std::min(pa[i], pb[i]); break;
        }
    }
    return argmax(combined);
}

BaselineRule parse_baseline_rule(std::string_view name) {
    if (name == "sum") return BaselineRule::Sum;
    if (name == "product") return BaselineRule::Product;
    if (name == "max") return BaselineRule::Max;
    if (name == "min") return BaselineRule::Min;
    throw ConfigError("unknown baseline rule: " + std::string(name));
}

std::string_view to_string(BaselineRule rule) {
    switch (rule) {
        case BaselineRule::Sum: return "sum";
        case BaselineRule::Product: return "product";
        case BaselineRule::Max: return "max";
        case BaselineRule::Min: return "min";
    }
    return "unknown";
}

}  // namespace evifuse
