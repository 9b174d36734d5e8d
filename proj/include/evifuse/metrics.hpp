#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace evifuse {

inline constexpr std::size_t kHistogramBins = 20;

struct Scores {
    double accuracy;
    double macro_f1;
};

// Macro-F1 averages per-class F1 over `num_classes` classes (inferred as
// 1 + the largest index seen when 0). A class with no predictions and no
// instances scores 0.
Scores accuracy_and_macro_f1(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                             std::size_t num_classes = 0);

// Per-class number of samples with u <= threshold. threshold must lie in (0, 1].
std::vector<std::size_t> credible_count(std::span<const double> uncertainties,
                                        std::span<const std::size_t> labels,
                                        std::size_t num_classes, double threshold);

// sigma = (1/K) sum_k |n_k - m_k| / m_k; every m_k must be > 0.
double average_relative_error(std::span<const double> counts, std::span<const double> reference);

// Counts over 20 right-closed bins (i/20, (i+1)/20]; u = 0 falls in bin 0.
std::array<std::size_t, kHistogramBins> uncertainty_histogram(std::span<const double> uncertainties);

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double mean_u = 0.0;
    double mean_u_degraded = 0.0;
    double mean_u_clean = 0.0;
    std::size_t num_degraded = 0;
    std::size_t num_clean = 0;
    std::vector<std::size_t> class_totals;
    std::vector<std::size_t> credible_counts;
    double credible_threshold = 0.4;
    std::array<std::size_t, kHistogramBins> histogram{};
};

// Summarizes one view (or the fused decision) over a sample set. Mean u
// over an empty degraded/clean subset is reported as 0.
EvalReport make_eval_report(std::span<const std::size_t> preds, std::span<const std::size_t> labels,
                            std::span<const double> uncertainties, std::span<const bool> degraded,
                            std::size_t num_classes, double credible_threshold);

nlohmann::json to_json(const EvalReport& r);

}  // namespace evifuse
