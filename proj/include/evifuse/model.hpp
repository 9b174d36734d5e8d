#pragma once

// Per-view two-layer heads:
//   hidden = tanh(W1^T x + b1)        W1: D x H
//   logits = W2^T hidden + b2         W2: H x K
// An EvidenceHead squashes logits with relu or softplus into evidence; a
// SoftmaxClassifier applies softmax and trains with cross-entropy.

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "json.hpp"
#include "evifuse/fusion.hpp"
#include "evifuse/opinion.hpp"
#include "evifuse/rng.hpp"

namespace evifuse {

struct HeadParams {
    Eigen::MatrixXd w1;  // D x H
    Eigen::VectorXd b1;  // H
    Eigen::MatrixXd w2;  // H x K
    Eigen::VectorXd b2;  // K

    static HeadParams zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes);
    // Uniform in [-s, s], s = 1/sqrt(fan_in), drawn in the order W1 (row-major), b1, W2, b2.
    static HeadParams random(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                             CounterRng& rng);

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w1.rows()); }
    std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(w1.cols()); }
    std::size_t num_classes() const noexcept { return static_cast<std::size_t>(w2.cols()); }

    void axpy(double scale, const HeadParams& other);  // this += scale * other
    void set_zero();
    bool all_finite() const;
};

// Intermediate values of one forward pass, needed by the backward pass.
struct HeadActivations {
    Eigen::VectorXd input;
    Eigen::VectorXd hidden;
    Eigen::VectorXd logits;
};

HeadActivations forward_logits(const HeadParams& p, std::span<const double> x);

// Accumulates dL/dparams into `grad` given dL/dlogits.
void backward_logits(const HeadParams& p, const HeadActivations& act,
                     const Eigen::VectorXd& grad_logits, HeadParams& grad);

enum class OutputActivation { Relu, Softplus };

OutputActivation parse_activation(std::string_view name);
std::string_view to_string(OutputActivation act);

struct EvidenceHead {
    HeadParams params;
    OutputActivation activation = OutputActivation::Softplus;
};

Evidence forward(const EvidenceHead& h, std::span<const double> x);

// Forward pass keeping the activations for backward().
Evidence forward(const EvidenceHead& h, std::span<const double> x, HeadActivations& act);

// Parameter gradients for upstream dL/d(evidence). `act` must come from
// forward() on the same head and input.
HeadParams backward(const EvidenceHead& h, const HeadActivations& act,
                    std::span<const double> upstream);

struct SoftmaxClassifier {
    HeadParams params;
};

ProbVector predict_proba(const SoftmaxClassifier& m, std::span<const double> x);

nlohmann::json to_json(const EvidenceHead& h);
nlohmann::json to_json(const SoftmaxClassifier& m);
EvidenceHead evidence_head_from_json(const nlohmann::json& j);
SoftmaxClassifier softmax_classifier_from_json(const nlohmann::json& j);

}  // namespace evifuse
