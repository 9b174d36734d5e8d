#include "evifuse/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "evifuse/errors.hpp"
#include "evifuse/rng.hpp"

namespace evifuse {

namespace {

constexpr std::uint64_t kFrameStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr double kTestFraction = 0.2;
constexpr double kValFraction = 0.1;
constexpr double kJunkScale = 3.0;

std::vector<std::vector<double>> orthonormal_frame(CounterRng rng, std::size_t rows, std::size_t dim) {
    std::vector<std::vector<double>> q(rows, std::vector<double>(dim));
    for (auto& row : q) {
        for (double& v : row) {
            v = rng.normal();
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double dot = std::inner_product(q[i].begin(), q[i].end(), q[j].begin(), 0.0);
            for (std::size_t d = 0; d < dim; ++d) {
                q[i][d] -= dot * q[j][d];
            }
        }
        const double norm = std::sqrt(std::inner_product(q[i].begin(), q[i].end(), q[i].begin(), 0.0));
        for (double& v : q[i]) {
            v /= norm;
        }
    }
    return q;
}

}  // namespace

void GenConfig::validate() const {
    if (num_classes < 2) throw ConfigError("gen: num_classes must be >= 2");
    if (dim < num_classes) throw ConfigError("gen: dim must be >= num_classes");
    if (num_samples == 0) throw ConfigError("gen: num_samples must be > 0");
    if (!(overlap_a >= 0.0 && overlap_a <= 1.0)) throw ConfigError("gen: overlap_a must lie in [0, 1]");
    if (!(junk_rate_b >= 0.0 && junk_rate_b <= 1.0)) throw ConfigError("gen: junk_rate_b must lie in [0, 1]");
    if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("gen: noise_sigma must be > 0");
    if (!class_weights.empty()) {
        if (class_weights.size() != num_classes) {
            throw ConfigError("gen: class_weights must have num_classes entries");
        }
        for (double w : class_weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("gen: class_weights must be positive");
        }
    }
}

std::vector<double> GenConfig::normalized_weights() const {
    if (class_weights.empty()) {
        return std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes));
    }
    const double total = std::accumulate(class_weights.begin(), class_weights.end(), 0.0);
    std::vector<double> w = class_weights;
    for (double& v : w) {
        v /= total;
    }
    return w;
}

std::vector<const PairedSample*> Dataset::subset(Split split) const {
    std::vector<const PairedSample*> out;
    for (const auto& s : samples) {
        if (s.split == split) {
            out.push_back(&s);
        }
    }
    return out;
}

std::vector<std::vector<double>> view_prototypes(const GenConfig& cfg, int view) {
    const std::size_t k = cfg.num_classes;
    const std::size_t dim = cfg.dim;
    const auto frame = orthonormal_frame(CounterRng(cfg.seed).split(kFrameStream).split(static_cast<std::uint64_t>(view)), k, dim);

    // Vertices q_k / sqrt(2) are pairwise at distance 1; center them.
    const double scale = 1.0 / std::sqrt(2.0);
    std::vector<double> centroid(dim, 0.0);
    for (const auto& row : frame) {
        for (std::size_t d = 0; d < dim; ++d) {
            centroid[d] += scale * row[d] / static_cast<double>(k);
        }
    }
    const double shrink = view == 0 ? 1.0 - cfg.overlap_a : 1.0;
    std::vector<std::vector<double>> protos(k, std::vector<double>(dim));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < dim; ++d) {
            protos[c][d] = shrink * (scale * frame[c][d] - centroid[d]);
        }
    }
    return protos;
}

Dataset generate(const GenConfig& cfg) {
    cfg.validate();
    const auto protos_a = view_prototypes(cfg, 0);
    const auto protos_b = view_prototypes(cfg, 1);
    const auto weights = cfg.normalized_weights();
    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

    const CounterRng root(cfg.seed);
    const CounterRng sample_root = root.split(kSampleStream);

    Dataset data;
    data.config = cfg;
    data.samples.reserve(cfg.num_samples);
    for (std::size_t i = 0; i < cfg.num_samples; ++i) {
        CounterRng rng = sample_root.split(i);
        const double pick = rng.uniform();
        std::size_t label = cfg.num_classes - 1;
        for (std::size_t c = 0; c < cumulative.size(); ++c) {
            if (pick < cumulative[c]) {
                label = c;
                break;
            }
        }
        const bool junk = rng.uniform() < cfg.junk_rate_b;

        PairedSample s{std::vector<double>(cfg.dim), std::vector<double>(cfg.dim), label, junk, Split::Train};
        for (std::size_t d = 0; d < cfg.dim; ++d) {
            s.x_a[d] = protos_a[label][d] + cfg.noise_sigma * rng.normal();
        }
        for (std::size_t d = 0; d < cfg.dim; ++d) {
            const double z = rng.normal();
            s.x_b[d] = junk ? kJunkScale * cfg.noise_sigma * z : protos_b[label][d] + cfg.noise_sigma * z;
        }
        data.samples.push_back(std::move(s));
    }

    const CounterRng split_root = root.split(kSplitStream);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.samples.size(); ++i) {
            if (data.samples[i].label == c) {
                idx.push_back(i);
            }
        }
        CounterRng rng = split_root.split(c);
        rng.shuffle(std::span<std::size_t>(idx));
        const auto n = static_cast<double>(idx.size());
        const auto n_test = static_cast<std::size_t>(std::llround(kTestFraction * n));
        const auto n_val = static_cast<std::size_t>(std::llround(kValFraction * (n - static_cast<double>(n_test))));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            data.samples[idx[j]].split = j < n_test ? Split::Test : (j < n_test + n_val ? Split::Val : Split::Train);
        }
    }
    return data;
}

std::vector<double> long_tail_weights(std::size_t num_classes, double ratio) {
    if (num_classes < 2) {
        throw DimensionError("long_tail_weights: need at least 2 classes");
    }
    if (!(ratio > 1.0) || !std::isfinite(ratio)) {
        throw DomainError("long_tail_weights: ratio must be > 1");
    }
    const double step = std::pow(ratio, -1.0 / static_cast<double>(num_classes - 1));
    std::vector<double> w(num_classes);
    double v = 1.0;
    for (double& x : w) {
        x = v;
        v *= step;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) {
        x /= total;
    }
    return w;
}

std::string to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split tag: " + name);
}

nlohmann::json to_json(const GenConfig& cfg) {
    return {{"num_classes", cfg.num_classes},
            {"dim", cfg.dim},
            {"num_samples", cfg.num_samples},
            {"overlap_a", cfg.overlap_a},
            {"junk_rate_b", cfg.junk_rate_b},
            {"class_weights", cfg.class_weights},
            {"noise_sigma", cfg.noise_sigma},
            {"seed", cfg.seed}};
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("gen config must be a JSON object");
    }
    static const char* known[] = {"num_classes", "dim", "num_samples", "overlap_a", "junk_rate_b",
                                  "class_weights", "long_tail_ratio", "noise_sigma", "seed"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("gen config: unknown key \"" + key + "\"");
        }
    }
    GenConfig cfg;
    try {
        cfg.num_classes = j.value("num_classes", cfg.num_classes);
        cfg.dim = j.value("dim", cfg.dim);
        cfg.num_samples = j.value("num_samples", cfg.num_samples);
        cfg.overlap_a = j.value("overlap_a", cfg.overlap_a);
        cfg.junk_rate_b = j.value("junk_rate_b", cfg.junk_rate_b);
        cfg.class_weights = j.value("class_weights", cfg.class_weights);
        cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("long_tail_ratio")) {
            if (!cfg.class_weights.empty()) {
                throw ConfigError("gen config: give class_weights or long_tail_ratio, not both");
            }
            cfg.class_weights = long_tail_weights(cfg.num_classes, j.at("long_tail_ratio").get<double>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("gen config: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("gen config: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

void write_csv(const Dataset& data, std::ostream& out) {
    out << "split,label,degraded_b";
    for (std::size_t d = 0; d < data.dim(); ++d) out << ",xa_" << d;
    for (std::size_t d = 0; d < data.dim(); ++d) out << ",xb_" << d;
    out << '\n';
    out << std::setprecision(17);
    for (const auto& s : data.samples) {
        out << to_string(s.split) << ',' << s.label << ',' << (s.degraded_b ? 1 : 0);
        for (double v : s.x_a) out << ',' << v;
        for (double v : s.x_b) out << ',' << v;
        out << '\n';
    }
}

Dataset read_csv(std::istream& in, const GenConfig& cfg) {
    Dataset data;
    data.config = cfg;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("dataset CSV is empty");
    }
    const std::size_t expected = 3 + 2 * cfg.dim;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != expected) {
            throw ConfigError("dataset CSV row " + std::to_string(row) + ": expected " +
                              std::to_string(expected) + " columns");
        }
        try {
            PairedSample s{std::vector<double>(cfg.dim), std::vector<double>(cfg.dim),
                           std::stoul(cells[1]), cells[2] == "1", parse_split(cells[0])};
            if (s.label >= cfg.num_classes) {
                throw ConfigError("label out of range");
            }
            for (std::size_t d = 0; d < cfg.dim; ++d) {
                s.x_a[d] = std::stod(cells[3 + d]);
                s.x_b[d] = std::stod(cells[3 + cfg.dim + d]);
            }
            data.samples.push_back(std::move(s));
        } catch (const std::logic_error& ex) {
            throw ConfigError("dataset CSV row " + std::to_string(row) + ": " + ex.what());
        }
    }
    if (data.samples.empty()) {
        throw ConfigError("dataset CSV has no samples");
    }
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& csv_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    write_csv(data, csv);
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    std::ofstream js(sidecar);
    if (!js) throw std::runtime_error("cannot write " + sidecar.string());
    js << to_json(data.config).dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& csv_path) {
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    std::ifstream js(sidecar);
    if (!js) throw ConfigError("missing dataset sidecar " + sidecar.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("bad dataset sidecar: " + std::string(ex.what()));
    }
    const GenConfig cfg = gen_config_from_json(j);
    std::ifstream csv(csv_path);
    if (!csv) throw ConfigError("cannot read " + csv_path.string());
    return read_csv(csv, cfg);
}

}  // namespace evifuse
