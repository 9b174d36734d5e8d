#include "evifuse/loss.hpp"

#include <cassert>

#include "evifuse/errors.hpp"
#include "evifuse/numerics.hpp"

namespace evifuse {

LabelOneHot::LabelOneHot(std::size_t label, std::size_t num_classes)
    : label_(label), num_classes_(num_classes) {
    if (num_classes < 2) {
        throw DimensionError("label needs at least 2 classes");
    }
    if (label >= num_classes) {
        throw DomainError("label index out of range");
    }
}

LabelOneHot LabelOneHot::from_vector(std::span<const double> y) {
    std::size_t positive = y.size();
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] == 1.0) {
            if (positive != y.size()) {
                throw DomainError("one-hot label has more than one positive entry");
            }
            positive = k;
        } else if (y[k] != 0.0) {
            throw DomainError("one-hot label entries must be 0 or 1");
        }
    }
    if (positive == y.size()) {
        throw DomainError("one-hot label has no positive entry");
    }
    return LabelOneHot(positive, y.size());
}

namespace {

void check_shapes(const DirichletParams& d, const LabelOneHot& y) {
    if (d.num_classes() != y.num_classes()) {
        throw DimensionError("Dirichlet parameters and label differ in class count");
    }
}

// psi(alpha_0) - psi(alpha_k) for every k. Each gap is at least
// psi(alpha_k + 1) - psi(alpha_k) = 1/alpha_k > 0 because alpha_0 >= alpha_k + 1.
std::vector<double> digamma_gaps(const DirichletParams& d) {
    const double psi0 = numerics::digamma(d.alpha0());
    std::vector<double> gaps(d.num_classes());
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        gaps[k] = psi0 - numerics::digamma(d[k]);
        assert(gaps[k] > 0.0);
    }
    return gaps;
}

}  // namespace

LossBreakdown reciprocal_loss(const DirichletParams& d, const LabelOneHot& y) {
    check_shapes(d, y);
    const std::vector<double> gaps = digamma_gaps(d);
    LossBreakdown out{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        if (k == y.label()) {
            out.positive += gaps[k];
        } else {
            out.negative += 1.0 / gaps[k];
        }
    }
    out.total = out.positive + out.negative;
    return out;
}

double bayes_risk_ce(const DirichletParams& d, const LabelOneHot& y) {
    check_shapes(d, y);
    return numerics::digamma(d.alpha0()) - numerics::digamma(d[y.label()]);
}

std::vector<double> reciprocal_loss_grad(const DirichletParams& d, const LabelOneHot& y) {
    check_shapes(d, y);
    const std::vector<double> gaps = digamma_gaps(d);
    const double tri0 = numerics::trigamma(d.alpha0());

    // Every alpha_j enters alpha_0, so each gap k contributes
    // d gap_k / d alpha_j = tri0 - [j == k] trigamma(alpha_k).
    double shared = tri0;  // positive term through alpha_0
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        if (k != y.label()) {
            shared -= tri0 / (gaps[k] * gaps[k]);
        }
    }
    std::vector<double> grad(d.num_classes(), shared);
    for (std::size_t j = 0; j < grad.size(); ++j) {
        const double tri = numerics::trigamma(d[j]);
        if (j == y.label()) {
            grad[j] -= tri;
        } else {
            grad[j] += tri / (gaps[j] * gaps[j]);
        }
    }
    return grad;
}

double global_loss(const DirichletParams& a, const DirichletParams& b,
                   const DirichletParams& fused, const LabelOneHot& y) {
    if (a.num_classes() != b.num_classes() || a.num_classes() != fused.num_classes()) {
        throw DimensionError("global loss inputs differ in class count");
    }
    return reciprocal_loss(a, y).total + reciprocal_loss(b, y).total + reciprocal_loss(fused, y).total;
}

double batch_global_loss(std::span<const GlobalLossSample> batch) {
    if (batch.empty()) {
        throw DimensionError("batch is empty");
    }
    double sum = 0.0;
    for (const auto& s : batch) {
        sum += global_loss(s.a, s.b, s.fused, s.y);
    }
    return sum / static_cast<double>(batch.size());
}

}  // namespace evifuse
