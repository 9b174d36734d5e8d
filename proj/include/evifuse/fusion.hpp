#pragma once

// Two-view evidential fusion and fixed decision-level baseline rules.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "evifuse/opinion.hpp"

namespace evifuse {

struct FusedDecision {
    Opinion opinion;
    Evidence evidence;
    std::size_t predicted_class;
    // Normalizer of the fusion rule, kept for inspection.
    double lambda;
};

// Unnormalized fusion terms: credibility numerators, uncertainty numerator,
// and the normalizer computed from its closed form. The numerators sum to
// the normalizer up to rounding.
struct FusionTerms {
    std::vector<double> credibility_numerators;
    double uncertainty_numerator;
    double lambda;
};

FusionTerms fusion_terms(const Opinion& a, const Opinion& b);

// c_k = [c_k^a c_k^b + (1-u^a) c_k^a + (1-u^b) c_k^b] / lambda
// u   = u^a u^b / lambda
// lambda = u^a u^b + (1-u^a)^2 + (1-u^b)^2 + sum_k c_k^a c_k^b
// Fused evidence is recovered as e_k = K c_k / u and predicts its argmax.
FusedDecision fuse_opinions(const Opinion& a, const Opinion& b);

// Left fold of fuse_opinions over two or more opinions. The pairwise rule is
// not associative, so the order of `opinions` matters.
FusedDecision fuse_sequence(std::span<const Opinion> opinions);

// Reverse-mode derivatives of fuse-then-recover-evidence for training. Given
// the two per-view evidence vectors and the upstream gradient with respect
// to the fused evidence, returns gradients with respect to each view's
// evidence. The chain runs evidence -> opinion -> fused opinion -> evidence.
struct FusionGradient {
    std::vector<double> view_a;
    std::vector<double> view_b;
};

FusionGradient fuse_evidence_vjp(const Evidence& a, const Evidence& b,
                                 std::span<const double> upstream);

class ProbVector {
public:
    // Entries in [0, 1] summing to 1 within kSimplexTolerance.
    explicit ProbVector(std::vector<double> probs);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }

private:
    std::vector<double> probs_;
};

enum class BaselineRule { Sum, Product, Max, Min };

// Elementwise: combine the two vectors entry by entry, then argmax.
// ViewSelect (max/min only): each view votes its own top class with its top
// probability; the vote with the larger (max) or smaller (min) probability
// wins. Sum and Product are identical in both modes.
enum class BaselineMode { Elementwise, ViewSelect };

std::size_t fuse_baseline(const ProbVector& a, const ProbVector& b, BaselineRule rule,
                          BaselineMode mode = BaselineMode::Elementwise);

BaselineRule parse_baseline_rule(std::string_view name);
std::string_view to_string(BaselineRule rule);

}  // namespace evifuse
