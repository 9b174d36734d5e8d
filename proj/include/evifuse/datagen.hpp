#pragma once

// Synthetic paired-view dataset.
//
// Both views place K class prototypes on a regular simplex with unit edge
// length, embedded in R^D by a view-specific random orthonormal frame. View A
// prototypes are contracted toward their centroid by `overlap_a` (inter-class
// similarity). Each sample is prototype + N(0, noise_sigma^2) per coordinate.
// With probability `junk_rate_b` the view-B vector is replaced by
// class-independent N(0, (3 noise_sigma)^2) noise and flagged as degraded.
//
// Random draw order, all from CounterRng(seed):
//   frames:  split(1).split(view), view 0 = A, 1 = B; K*D normals, row-major,
//            orthonormalized by Gram-Schmidt in row order
//   sample i: split(2).split(i): label uniform, junk uniform, D normals for
//            view A, D normals for view B (junk noise reuses the view-B draws)
//   splits:  split(3).split(k) shuffles the indices of class k
//
// Split: per class, round(0.2 n_k) test, then round(0.1 * rest) validation,
// remainder train (72/8/20 overall).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace evifuse {

struct GenConfig {
    std::size_t num_classes = 5;
    std::size_t dim = 16;
    std::size_t num_samples = 2000;
    double overlap_a = 0.35;
    double junk_rate_b = 0.4;
    // Empty means uniform.
    std::vector<double> class_weights;
    double noise_sigma = 0.3;
    std::uint64_t seed = 0;

    // Throws ConfigError on invalid settings.
    void validate() const;
    // Normalized class weights (uniform if none were given).
    std::vector<double> normalized_weights() const;
};

enum class Split { Train, Val, Test };

struct PairedSample {
    std::vector<double> x_a;
    std::vector<double> x_b;
    std::size_t label;
    bool degraded_b;
    Split split;

    friend bool operator==(const PairedSample&, const PairedSample&) = default;
};

struct Dataset {
    std::vector<PairedSample> samples;
    GenConfig config;

    std::vector<const PairedSample*> subset(Split split) const;
    std::size_t num_classes() const noexcept { return config.num_classes; }
    std::size_t dim() const noexcept { return config.dim; }
};

Dataset generate(const GenConfig& cfg);

// Geometric class weights with w_0 / w_{K-1} = ratio, normalized to sum 1.
std::vector<double> long_tail_weights(std::size_t num_classes, double ratio);

// Prototype matrix (K rows of length D) used for a view; exposed for tests.
std::vector<std::vector<double>> view_prototypes(const GenConfig& cfg, int view);

std::string to_string(Split split);
Split parse_split(const std::string& name);

nlohmann::json to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const nlohmann::json& j);

// CSV: header then one row per sample: split,label,degraded_b,xa_0..,xb_0..
void write_csv(const Dataset& data, std::ostream& out);
Dataset read_csv(std::istream& in, const GenConfig& cfg);

// Writes <stem>.csv and <stem>.json (GenConfig sidecar).
void save_dataset(const Dataset& data, const std::filesystem::path& csv_path);
Dataset load_dataset(const std::filesystem::path& csv_path);

}  // namespace evifuse
