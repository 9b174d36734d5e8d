#pragma once

// Multi-seed experiment runner and report writers.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "evifuse/datagen.hpp"
#include "evifuse/fusion.hpp"
#include "evifuse/metrics.hpp"
#include "evifuse/train.hpp"

namespace evifuse {

// Runtime failure inside one seed of an experiment; the message names the
// seed and stage.
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kAllStrategies = {"evidential", "sum", "product", "max", "min"};

struct ExperimentConfig {
    GenConfig gen;
    TrainConfig train;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::string> strategies = kAllStrategies;
    double credible_threshold = 0.4;
    BaselineMode baseline_mode = BaselineMode::Elementwise;
    std::size_t threads = 1;

    void validate() const;
    bool needs_softmax() const;
    // Generator and trainer settings for one seed (both seeds set to `seed`).
    GenConfig gen_for(std::uint64_t seed) const;
    TrainConfig train_for(std::uint64_t seed) const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Per-sample outputs of an evidential pair on a sample set.
struct PairEvaluation {
    std::vector<std::size_t> labels;
    std::vector<bool> degraded_b;
    std::vector<std::size_t> pred_a, pred_b, pred_fused;
    std::vector<double> u_a, u_b, u_fused;
};

PairEvaluation evaluate_pair(const EvidenceHead& a, const EvidenceHead& b,
                             const std::vector<const PairedSample*>& samples);

struct PairReports {
    EvalReport view_a;
    EvalReport view_b;
    EvalReport fused;
};

PairReports make_pair_reports(const PairEvaluation& ev, std::size_t num_classes, double credible_threshold);

struct SeedResult {
    std::uint64_t seed = 0;
    std::map<std::string, Scores> strategies;
    std::map<std::string, Scores> single_views;
    PairReports uncertainty;
    double first_epoch_loss = 0.0;
    double final_epoch_loss = 0.0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1); 0 for a single seed
};

struct Aggregate {
    MeanStd accuracy;
    MeanStd macro_f1;
};

struct ComparisonReport {
    nlohmann::json config;
    std::vector<SeedResult> per_seed;
    std::map<std::string, Aggregate> strategies;
    std::map<std::string, Aggregate> single_views;
};

MeanStd mean_std(const std::vector<double>& values);

// Cross-seed reduction over `per_seed` in its stored order.
void aggregate(ComparisonReport& report);

struct SeedArtifacts {
    SeedResult result;
    TrainedPair pair;
};

SeedArtifacts run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

// Runs every seed (concurrently when cfg.threads > 1) and aggregates.
// `first_pair`, when non-null, receives the trained heads of the first seed.
ComparisonReport run_experiment(const ExperimentConfig& cfg, TrainedPair* first_pair = nullptr);

nlohmann::json to_json(const SeedResult& r);
nlohmann::json to_json(const ComparisonReport& r);

// report.csv: name,kind,seed,accuracy,macro_f1 (seed "mean"/"std" for aggregates)
std::string report_csv(const ComparisonReport& r);
// uncertainty_hist.csv: view,bin_low,bin_high,count, summed over seeds
std::string uncertainty_hist_csv(const std::vector<std::pair<std::string, std::vector<const EvalReport*>>>& views);
// credible_counts.csv: view,class,threshold,count, summed over seeds
std::string credible_counts_csv(const std::vector<std::pair<std::string, std::vector<const EvalReport*>>>& views);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Writes report.json, report.csv, uncertainty_hist.csv, credible_counts.csv,
// model_a.json and model_b.json into `out_dir`.
void write_experiment_outputs(const std::filesystem::path& out_dir, const ComparisonReport& report,
                              const TrainedPair& first_pair);

}  // namespace evifuse
