#pragma once

// Reciprocal Loss over Dirichlet concentration parameters.
//
//   positive = sum_k y_k [psi(alpha_0) - psi(alpha_k)]
//   negative = sum_k (1 - y_k) / [psi(alpha_0) - psi(alpha_k)]
//
// The positive term equals the expected cross-entropy under D(p | alpha).

#include <cstddef>
#include <span>
#include <vector>

#include "evifuse/opinion.hpp"

namespace evifuse {

class LabelOneHot {
public:
    // Throws DimensionError if num_classes < 2, DomainError if label is out of range.
    LabelOneHot(std::size_t label, std::size_t num_classes);

    // Validates an explicit {0,1} vector with exactly one positive entry.
    static LabelOneHot from_vector(std::span<const double> y);

    std::size_t label() const noexcept { return label_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    double operator[](std::size_t k) const noexcept { return k == label_ ? 1.0 : 0.0; }

private:
    std::size_t label_;
    std::size_t num_classes_;
};

struct LossBreakdown {
    double positive;
    double negative;
    double total;
};

LossBreakdown reciprocal_loss(const DirichletParams& d, const LabelOneHot& y);

// Bayes risk of cross-entropy, E_{D(p|alpha)}[-sum y_k ln p_k].
double bayes_risk_ce(const DirichletParams& d, const LabelOneHot& y);

// dL/dalpha of reciprocal_loss(d, y).total.
std::vector<double> reciprocal_loss_grad(const DirichletParams& d, const LabelOneHot& y);

// L(view a) + L(view b) + L(fused), each a full reciprocal_loss total.
double global_loss(const DirichletParams& a, const DirichletParams& b,
                   const DirichletParams& fused, const LabelOneHot& y);

struct GlobalLossSample {
    DirichletParams a;
    DirichletParams b;
    DirichletParams fused;
    LabelOneHot y;
};

// Mean of per-sample global losses.
double batch_global_loss(std::span<const GlobalLossSample> batch);

}  // namespace evifuse
