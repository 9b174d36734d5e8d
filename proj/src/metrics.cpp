#include "evifuse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "evifuse/errors.hpp"

namespace evifuse {

Scores accuracy_and_macro_f1(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                             std::size_t num_classes) {
    if (preds.size() != labels.size()) {
        throw DimensionError("predictions and labels differ in length");
    }
    if (preds.empty()) {
        throw DimensionError("cannot score an empty prediction set");
    }
    if (num_classes == 0) {
        num_classes = 1 + std::max(*std::max_element(preds.begin(), preds.end()),
                                   *std::max_element(labels.begin(), labels.end()));
    }
    std::vector<double> tp(num_classes, 0.0);
    std::vector<double> fp(num_classes, 0.0);
    std::vector<double> fn(num_classes, 0.0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] >= num_classes || labels[i] >= num_classes) {
            throw DomainError("class index out of range");
        }
        if (preds[i] == labels[i]) {
            ++correct;
            tp[labels[i]] += 1.0;
        } else {
            fp[preds[i]] += 1.0;
            fn[labels[i]] += 1.0;
        }
    }
    double f1_sum = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
        // F1 = 2TP / (2TP + FP + FN)
        const double denom = 2.0 * tp[k] + fp[k] + fn[k];
        f1_sum += denom > 0.0 ? 2.0 * tp[k] / denom : 0.0;
    }
    return Scores{static_cast<double>(correct) / static_cast<double>(preds.size()),
                  f1_sum / static_cast<double>(num_classes)};
}

std::vector<std::size_t> credible_count(std::span<const double> uncertainties,
                                        std::span<const std::size_t> labels,
                                        std::size_t num_classes, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw DomainError("credible threshold must lie in (0, 1]");
    }
    if (uncertainties.size() != labels.size()) {
        throw DimensionError("uncertainties and labels differ in length");
    }
    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes) {
            throw DomainError("class index out of range");
        }
        if (uncertainties[i] <= threshold) {
            ++counts[labels[i]];
        }
    }
    return counts;
}

double average_relative_error(std::span<const double> counts, std::span<const double> reference) {
    if (counts.size() != reference.size()) {
        throw DimensionError("count vectors differ in length");
    }
    if (counts.empty()) {
        throw DimensionError("count vectors are empty");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (!(reference[k] > 0.0)) {
            throw DomainError("reference counts must be positive");
        }
        sum += std::abs(counts[k] - reference[k]) / reference[k];
    }
    return sum / static_cast<double>(counts.size());
}

std::array<std::size_t, kHistogramBins> uncertainty_histogram(std::span<const double> uncertainties) {
    std::array<std::size_t, kHistogramBins> bins{};
    for (double u : uncertainties) {
        // right-closed: bin i holds (i/20, (i+1)/20]
        auto idx = static_cast<std::ptrdiff_t>(std::ceil(u * static_cast<double>(kHistogramBins))) - 1;
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(kHistogramBins) - 1);
        ++bins[static_cast<std::size_t>(idx)];
    }
    return bins;
}

EvalReport make_eval_report(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                            std::span<const double> uncertainties, std::span<const bool> degraded,
                            std::size_t num_classes, double credible_threshold) {
    if (uncertainties.size() != labels.size() || degraded.size() != labels.size()) {
        throw DimensionError("report inputs differ in length");
    }
    EvalReport r;
    const Scores s = accuracy_and_macro_f1(preds, labels, num_classes);
    r.accuracy = s.accuracy;
    r.macro_f1 = s.macro_f1;
    double sum_deg = 0.0;
    double sum_clean = 0.0;
    r.class_totals.assign(num_classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        r.mean_u += uncertainties[i];
        ++r.class_totals[labels[i]];
        if (degraded[i]) {
            sum_deg += uncertainties[i];
            ++r.num_degraded;
        } else {
            sum_clean += uncertainties[i];
            ++r.num_clean;
        }
    }
    r.mean_u /= static_cast<double>(labels.size());
    r.mean_u_degraded = r.num_degraded > 0 ? sum_deg / static_cast<double>(r.num_degraded) : 0.0;
    r.mean_u_clean = r.num_clean > 0 ? sum_clean / static_cast<double>(r.num_clean) : 0.0;
    r.credible_threshold = credible_threshold;
    r.credible_counts = credible_count(uncertainties, labels, num_classes, credible_threshold);
    r.histogram = uncertainty_histogram(uncertainties);
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"accuracy", r.accuracy},
            {"macro_f1", r.macro_f1},
            {"mean_u", r.mean_u},
            {"mean_u_degraded", r.mean_u_degraded},
            {"mean_u_clean", r.mean_u_clean},
            {"num_degraded", r.num_degraded},
            {"num_clean", r.num_clean},
            {"class_totals", r.class_totals},
            {"credible_threshold", r.credible_threshold},
            {"credible_counts", r.credible_counts},
            {"histogram", r.histogram}};
}

}  // namespace evifuse
