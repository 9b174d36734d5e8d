#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "evifuse/datagen.hpp"
#include "evifuse/loss.hpp"
#include "evifuse/model.hpp"

namespace evifuse {

enum class Schedule { Constant, Cosine };

struct TrainConfig {
    double step_size = 0.01;
    std::size_t epochs = 200;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    Schedule schedule = Schedule::Cosine;
    std::size_t hidden_dim = 32;
    OutputActivation activation = OutputActivation::Softplus;

    void validate() const;
    // Step size used during `epoch` (0-based).
    double step_at(std::size_t epoch) const;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
    double global_loss;  // mean over training samples, measured before each batch update
    double loss_a;
    double loss_b;
    double loss_fused;
    double val_accuracy;  // fused prediction accuracy on the validation split
};

struct TrainedPair {
    EvidenceHead head_a;
    EvidenceHead head_b;
    std::vector<EpochRecord> history;
};

// Everything the joint objective produces for one paired sample.
struct PairForward {
    Evidence evidence_a;
    Evidence evidence_b;
    FusedDecision fused;
    LossBreakdown loss_a;
    LossBreakdown loss_b;
    LossBreakdown loss_fused;
    double global() const { return loss_a.total + loss_b.total + loss_fused.total; }
};

PairForward pair_forward(const EvidenceHead& a, const EvidenceHead& b,
                         std::span<const double> x_a, std::span<const double> x_b, std::size_t label);

// Global loss of one sample and its gradient with respect to both heads,
// accumulated into grad_a / grad_b. The fused term is differentiated through
// the opinion maps, the fusion rule and the evidence recovery.
PairForward pair_loss_gradient(const EvidenceHead& a, const EvidenceHead& b,
                               std::span<const double> x_a, std::span<const double> x_b,
                               std::size_t label, HeadParams& grad_a, HeadParams& grad_b);

TrainedPair train_pair(const Dataset& data, const TrainConfig& cfg);

enum class View { A, B };

// Cross-entropy of softmax(logits) against the label and its parameter gradient.
double softmax_loss_gradient(const SoftmaxClassifier& m, std::span<const double> x, std::size_t label,
                             HeadParams& grad);

SoftmaxClassifier train_softmax_baseline(const Dataset& data, const TrainConfig& cfg, View view);

}  // namespace evifuse
