#include "evifuse/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>

#include "evifuse/errors.hpp"

namespace evifuse {

namespace {

template <typename F>
auto stage(std::uint64_t seed, const char* name, F&& fn) {
    try {
        return fn();
    } catch (const std::exception& ex) {
        throw ExperimentError("seed " + std::to_string(seed) + ", stage " + name + ": " + ex.what());
    }
}

// Shortest text that parses back to the same double.
std::string csv_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void ExperimentConfig::validate() const {
    gen.validate();
    train.validate();
    if (seeds.empty()) throw ConfigError("experiment: at least one seed is required");
    if (strategies.empty()) throw ConfigError("experiment: at least one strategy is required");
    for (const auto& s : strategies) {
        if (std::find(kAllStrategies.begin(), kAllStrategies.end(), s) == kAllStrategies.end()) {
            throw ConfigError("experiment: unknown strategy \"" + s + "\"");
        }
    }
    if (!(credible_threshold > 0.0 && credible_threshold <= 1.0)) {
        throw ConfigError("experiment: credible_threshold must lie in (0, 1]");
    }
    if (threads == 0) throw ConfigError("experiment: threads must be >= 1");
}

bool ExperimentConfig::needs_softmax() const {
    return std::any_of(strategies.begin(), strategies.end(), [](const auto& s) { return s != "evidential"; });
}

GenConfig ExperimentConfig::gen_for(std::uint64_t seed) const {
    GenConfig g = gen;
    g.seed = seed;
    return g;
}

TrainConfig ExperimentConfig::train_for(std::uint64_t seed) const {
    TrainConfig t = train;
    t.seed = seed;
    return t;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    return {{"gen", to_json(cfg.gen)},
            {"train", to_json(cfg.train)},
            {"seeds", cfg.seeds},
            {"strategies", cfg.strategies},
            {"credible_threshold", cfg.credible_threshold},
            {"baseline_mode", cfg.baseline_mode == BaselineMode::Elementwise ? "elementwise" : "view_select"},
            {"threads", cfg.threads}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("experiment config must be a JSON object");
    }
    static const char* known[] = {"gen", "train", "seeds", "strategies", "credible_threshold", "baseline_mode", "threads"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("experiment config: unknown key \"" + key + "\"");
        }
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("gen")) cfg.gen = gen_config_from_json(j.at("gen"));
        if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
        cfg.seeds = j.value("seeds", cfg.seeds);
        cfg.strategies = j.value("strategies", cfg.strategies);
        cfg.credible_threshold = j.value("credible_threshold", cfg.credible_threshold);
        cfg.threads = j.value("threads", cfg.threads);
        const std::string mode = j.value("baseline_mode", std::string("elementwise"));
        if (mode == "elementwise") {
            cfg.baseline_mode = BaselineMode::Elementwise;
        } else if (mode == "view_select") {
            cfg.baseline_mode = BaselineMode::ViewSelect;
        } else {
            throw ConfigError("experiment config: unknown baseline_mode \"" + mode + "\"");
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("experiment config: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + ex.what());
    }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_config_from_json(read_json(path));
}

PairEvaluation evaluate_pair(const EvidenceHead& a, const EvidenceHead& b,
                             const std::vector<const PairedSample*>& samples) {
    PairEvaluation ev;
    for (const PairedSample* s : samples) {
        const Evidence ea = forward(a, s->x_a);
        const Evidence eb = forward(b, s->x_b);
        const Opinion oa = evidence_to_opinion(ea);
        const Opinion ob = evidence_to_opinion(eb);
        const FusedDecision fd = fuse_opinions(oa, ob);
        ev.labels.push_back(s->label);
        ev.degraded_b.push_back(s->degraded_b);
        ev.pred_a.push_back(argmax(ea.values()));
        ev.pred_b.push_back(argmax(eb.values()));
        ev.pred_fused.push_back(fd.predicted_class);
        ev.u_a.push_back(oa.uncertainty());
        ev.u_b.push_back(ob.uncertainty());
        ev.u_fused.push_back(fd.opinion.uncertainty());
    }
    return ev;
}

PairReports make_pair_reports(const PairEvaluation& ev, std::size_t num_classes, double credible_threshold) {
    // std::vector<bool> has no contiguous storage; copy into a plain array.
    const std::unique_ptr<bool[]> degraded(new bool[ev.degraded_b.size()]);
    std::copy(ev.degraded_b.begin(), ev.degraded_b.end(), degraded.get());
    const std::span<const bool> deg(degraded.get(), ev.degraded_b.size());
    return PairReports{
        make_eval_report(ev.pred_a, ev.labels, ev.u_a, deg, num_classes, credible_threshold),
        make_eval_report(ev.pred_b, ev.labels, ev.u_b, deg, num_classes, credible_threshold),
        make_eval_report(ev.pred_fused, ev.labels, ev.u_fused, deg, num_classes, credible_threshold)};
}

SeedArtifacts run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    const Dataset data = stage(seed, "generate", [&] { return generate(cfg.gen_for(seed)); });
    const TrainConfig tcfg = cfg.train_for(seed);
    const std::size_t k = data.num_classes();

    SeedArtifacts out;
    out.result.seed = seed;
    out.pair = stage(seed, "train_pair", [&] { return train_pair(data, tcfg); });
    out.result.first_epoch_loss = out.pair.history.front().global_loss;
    out.result.final_epoch_loss = out.pair.history.back().global_loss;

    const auto test = data.subset(Split::Test);
    stage(seed, "evaluate", [&] {
        if (test.empty()) {
            throw ConfigError("test split is empty");
        }
        const PairEvaluation ev = evaluate_pair(out.pair.head_a, out.pair.head_b, test);
        out.result.uncertainty = make_pair_reports(ev, k, cfg.credible_threshold);
        out.result.single_views["evidential_a"] = accuracy_and_macro_f1(ev.pred_a, ev.labels, k);
        out.result.single_views["evidential_b"] = accuracy_and_macro_f1(ev.pred_b, ev.labels, k);
        if (std::find(cfg.strategies.begin(), cfg.strategies.end(), "evidential") != cfg.strategies.end()) {
            out.result.strategies["evidential"] = accuracy_and_macro_f1(ev.pred_fused, ev.labels, k);
        }
        return 0;
    });

    if (!cfg.needs_softmax()) {
        return out;
    }
    const SoftmaxClassifier soft_a = stage(seed, "train_softmax_a", [&] { return train_softmax_baseline(data, tcfg, View::A); });
    const SoftmaxClassifier soft_b = stage(seed, "train_softmax_b", [&] { return train_softmax_baseline(data, tcfg, View::B); });

    stage(seed, "evaluate_baselines", [&] {
        std::vector<std::size_t> labels;
        std::vector<ProbVector> pa;
        std::vector<ProbVector> pb;
        for (const PairedSample* s : test) {
            labels.push_back(s->label);
            pa.push_back(predict_proba(soft_a, s->x_a));
            pb.push_back(predict_proba(soft_b, s->x_b));
        }
        std::vector<std::size_t> preds_a;
        std::vector<std::size_t> preds_b;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            preds_a.push_back(argmax(pa[i].probs()));
            preds_b.push_back(argmax(pb[i].probs()));
        }
        out.result.single_views["softmax_a"] = accuracy_and_macro_f1(preds_a, labels, k);
        out.result.single_views["softmax_b"] = accuracy_and_macro_f1(preds_b, labels, k);
        for (const auto& name : cfg.strategies) {
            if (name == "evidential") continue;
            const BaselineRule rule = parse_baseline_rule(name);
            std::vector<std::size_t> preds;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                preds.push_back(fuse_baseline(pa[i], pb[i], rule, cfg.baseline_mode));
            }
            out.result.strategies[name] = accuracy_and_macro_f1(preds, labels, k);
        }
        return 0;
    });
    return out;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    const auto n = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

void aggregate(ComparisonReport& report) {
    auto reduce = [&](auto member, std::map<std::string, Aggregate>& target) {
        target.clear();
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cols;
        for (const auto& r : report.per_seed) {
            for (const auto& [name, s] : r.*member) {
                cols[name].first.push_back(s.accuracy);
                cols[name].second.push_back(s.macro_f1);
            }
        }
        for (const auto& [name, c] : cols) {
            target[name] = Aggregate{mean_std(c.first), mean_std(c.second)};
        }
    };
    reduce(&SeedResult::strategies, report.strategies);
    reduce(&SeedResult::single_views, report.single_views);
}

ComparisonReport run_experiment(const ExperimentConfig& cfg, TrainedPair* first_pair) {
    cfg.validate();
    ComparisonReport report;
    report.config = to_json(cfg);
    std::vector<SeedArtifacts> results(cfg.seeds.size());

    if (cfg.threads <= 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            results[i] = run_seed(cfg, cfg.seeds[i]);
        }
    } else {
        for (std::size_t start = 0; start < cfg.seeds.size(); start += cfg.threads) {
            const std::size_t end = std::min(start + cfg.threads, cfg.seeds.size());
            std::vector<std::future<SeedArtifacts>> jobs;
            for (std::size_t i = start; i < end; ++i) {
                jobs.push_back(std::async(std::launch::async, run_seed, std::cref(cfg), cfg.seeds[i]));
            }
            for (std::size_t i = start; i < end; ++i) {
                results[i] = jobs[i - start].get();
            }
        }
    }

    for (auto& r : results) {
        report.per_seed.push_back(std::move(r.result));
    }
    if (first_pair != nullptr) {
        *first_pair = std::move(results.front().pair);
    }
    aggregate(report);
    return report;
}

namespace {

nlohmann::json scores_json(const std::map<std::string, Scores>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, s] : m) {
        j[name] = {{"accuracy", s.accuracy}, {"macro_f1", s.macro_f1}};
    }
    return j;
}

nlohmann::json aggregate_json(const std::map<std::string, Aggregate>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, a] : m) {
        j[name] = {{"accuracy_mean", a.accuracy.mean}, {"accuracy_std", a.accuracy.std},
                   {"macro_f1_mean", a.macro_f1.mean}, {"macro_f1_std", a.macro_f1.std}};
    }
    return j;
}

}  // namespace

nlohmann::json to_json(const SeedResult& r) {
    return {{"seed", r.seed},
            {"strategies", scores_json(r.strategies)},
            {"single_views", scores_json(r.single_views)},
            {"first_epoch_loss", r.first_epoch_loss},
            {"final_epoch_loss", r.final_epoch_loss},
            {"uncertainty", {{"view_a", to_json(r.uncertainty.view_a)},
                             {"view_b", to_json(r.uncertainty.view_b)},
                             {"fused", to_json(r.uncertainty.fused)}}}};
}

nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : r.per_seed) {
        seeds.push_back(to_json(s));
    }
    return {{"config", r.config},
            {"strategies", aggregate_json(r.strategies)},
            {"single_views", aggregate_json(r.single_views)},
            {"per_seed", seeds}};
}

std::string report_csv(const ComparisonReport& r) {
    std::ostringstream os;
    os << "name,kind,seed,accuracy,macro_f1\n";
    auto emit = [&](const char* kind, auto member, const std::map<std::string, Aggregate>& agg) {
        for (const auto& [name, a] : agg) {
            for (const auto& s : r.per_seed) {
                const auto& m = s.*member;
                if (auto it = m.find(name); it != m.end()) {
                    os << name << ',' << kind << ',' << s.seed << ',' << csv_number(it->second.accuracy) << ','
                       << csv_number(it->second.macro_f1) << '\n';
                }
            }
            os << name << ',' << kind << ",mean," << csv_number(a.accuracy.mean) << ',' << csv_number(a.macro_f1.mean) << '\n';
            os << name << ',' << kind << ",std," << csv_number(a.accuracy.std) << ',' << csv_number(a.macro_f1.std) << '\n';
        }
    };
    emit("strategy", &SeedResult::strategies, r.strategies);
    emit("single_view", &SeedResult::single_views, r.single_views);
    return os.str();
}

std::string uncertainty_hist_csv(const std::vector<std::pair<std::string, std::vector<const EvalReport*>>>& views) {
    std::ostringstream os;
    os << "view,bin_low,bin_high,count\n";
    for (const auto& [view, reports] : views) {
        for (std::size_t b = 0; b < kHistogramBins; ++b) {
            std::size_t count = 0;
            for (const EvalReport* r : reports) count += r->histogram[b];
            os << view << ',' << csv_number(static_cast<double>(b) / kHistogramBins) << ','
               << csv_number(static_cast<double>(b + 1) / kHistogramBins) << ',' << count << '\n';
        }
    }
    return os.str();
}

std::string credible_counts_csv(const std::vector<std::pair<std::string, std::vector<const EvalReport*>>>& views) {
    std::ostringstream os;
    os << "view,class,threshold,count\n";
    for (const auto& [view, reports] : views) {
        if (reports.empty()) continue;
        const std::size_t k = reports.front()->credible_counts.size();
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t count = 0;
            for (const EvalReport* r : reports) count += r->credible_counts[c];
            os << view << ',' << c << ',' << csv_number(reports.front()->credible_threshold) << ',' << count << '\n';
        }
    }
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_experiment_outputs(const std::filesystem::path& out_dir, const ComparisonReport& report,
                              const TrainedPair& first_pair) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::pair<std::string, std::vector<const EvalReport*>>> views = {{"a", {}}, {"b", {}}, {"fused", {}}};
    for (const auto& s : report.per_seed) {
        views[0].second.push_back(&s.uncertainty.view_a);
        views[1].second.push_back(&s.uncertainty.view_b);
        views[2].second.push_back(&s.uncertainty.fused);
    }
    write_json(out_dir / "report.json", to_json(report));
    write_text(out_dir / "report.csv", report_csv(report));
    write_text(out_dir / "uncertainty_hist.csv", uncertainty_hist_csv(views));
    write_text(out_dir / "credible_counts.csv", credible_counts_csv(views));
    write_json(out_dir / "model_a.json", to_json(first_pair.head_a));
    write_json(out_dir / "model_b.json", to_json(first_pair.head_b));
}

}  // namespace evifuse
