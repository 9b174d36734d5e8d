// evifuse command-line harness.
//
// Exit codes: 0 success, 2 configuration/usage error, 1 runtime error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "evifuse/datagen.hpp"
#include "evifuse/errors.hpp"
#include "evifuse/experiment.hpp"
#include "evifuse/fusion.hpp"
#include "evifuse/metrics.hpp"
#include "evifuse/train.hpp"

namespace fs = std::filesystem;
using namespace evifuse;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Paths {
    std::string config;
    std::string out;
    std::string data;
    std::string model_a;
    std::string model_b;
};

// Config files may hold a full experiment config or just a generator block.
ExperimentConfig load_config(const std::string& path) {
    const nlohmann::json j = read_json(path);
    if (j.is_object() && !j.contains("gen") && j.contains("num_classes")) {
        ExperimentConfig cfg;
        cfg.gen = gen_config_from_json(j);
        cfg.seeds = {cfg.gen.seed};
        return cfg;
    }
    return experiment_config_from_json(j);
}

Dataset dataset_for(const ExperimentConfig& cfg, const Paths& p) {
    if (!p.data.empty()) {
        return load_dataset(p.data);
    }
    return generate(cfg.gen_for(cfg.seeds.front()));
}

TrainedPair heads_for(const ExperimentConfig& cfg, const Paths& p, const Dataset& data) {
    if (!p.model_a.empty() || !p.model_b.empty()) {
        if (p.model_a.empty() || p.model_b.empty()) {
            throw ConfigError("--model-a and --model-b must be given together");
        }
        TrainedPair pair;
        pair.head_a = evidence_head_from_json(read_json(p.model_a));
        pair.head_b = evidence_head_from_json(read_json(p.model_b));
        if (pair.head_a.params.input_dim() != data.dim() || pair.head_a.params.num_classes() != data.num_classes() ||
            pair.head_b.params.input_dim() != data.dim() || pair.head_b.params.num_classes() != data.num_classes()) {
            throw ConfigError("model shapes do not match the dataset");
        }
        return pair;
    }
    return train_pair(data, cfg.train_for(cfg.seeds.front()));
}

using ViewReports = std::vector<std::pair<std::string, std::vector<const EvalReport*>>>;

int cmd_datagen(const Paths& p) {
    const ExperimentConfig cfg = load_config(p.config);
    fs::create_directories(p.out);
    const Dataset data = generate(cfg.gen_for(cfg.seeds.front()));
    save_dataset(data, fs::path(p.out) / "dataset.csv");
    return 0;
}

int cmd_train(const Paths& p) {
    const ExperimentConfig cfg = load_config(p.config);
    const Dataset data = dataset_for(cfg, p);
    const TrainedPair pair = train_pair(data, cfg.train_for(cfg.seeds.front()));
    fs::create_directories(p.out);
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : pair.history) {
        history.push_back({{"global_loss", h.global_loss}, {"loss_a", h.loss_a}, {"loss_b", h.loss_b},
                           {"loss_fused", h.loss_fused}, {"val_accuracy", h.val_accuracy}});
    }
    write_json(fs::path(p.out) / "report.json", {{"config", to_json(cfg)}, {"history", history}});
    write_json(fs::path(p.out) / "model_a.json", to_json(pair.head_a));
    write_json(fs::path(p.out) / "model_b.json", to_json(pair.head_b));
    return 0;
}

int cmd_eval(const Paths& p) {
    const ExperimentConfig cfg = load_config(p.config);
    const Dataset data = dataset_for(cfg, p);
    const TrainedPair pair = heads_for(cfg, p, data);
    const auto test = data.subset(Split::Test);
    if (test.empty()) {
        throw ConfigError("dataset has no test samples");
    }
    const PairEvaluation ev = evaluate_pair(pair.head_a, pair.head_b, test);
    const PairReports reports = make_pair_reports(ev, data.num_classes(), cfg.credible_threshold);

    fs::create_directories(p.out);
    write_json(fs::path(p.out) / "report.json",
               {{"view_a", to_json(reports.view_a)}, {"view_b", to_json(reports.view_b)}, {"fused", to_json(reports.fused)}});
    std::string csv = "view,accuracy,macro_f1,mean_u,mean_u_degraded,mean_u_clean\n";
    for (const auto& [name, r] : {std::pair{"a", &reports.view_a}, {"b", &reports.view_b}, {"fused", &reports.fused}}) {
        csv += std::string(name) + ',' + nlohmann::json(r->accuracy).dump() + ',' + nlohmann::json(r->macro_f1).dump() + ',' +
               nlohmann::json(r->mean_u).dump() + ',' + nlohmann::json(r->mean_u_degraded).dump() + ',' +
               nlohmann::json(r->mean_u_clean).dump() + '\n';
    }
    write_text(fs::path(p.out) / "report.csv", csv);
    const ViewReports views = {{"a", {&reports.view_a}}, {"b", {&reports.view_b}}, {"fused", {&reports.fused}}};
    write_text(fs::path(p.out) / "uncertainty_hist.csv", uncertainty_hist_csv(views));
    write_text(fs::path(p.out) / "credible_counts.csv", credible_counts_csv(views));
    return 0;
}

int cmd_fuse(const std::string& a_path, const std::string& b_path) {
    const Opinion a = opinion_from_json(read_json(a_path));
    const Opinion b = opinion_from_json(read_json(b_path));
    const FusedDecision fd = fuse_opinions(a, b);
    nlohmann::json out = to_json(fd.opinion);
    out["evidence"] = to_json(fd.evidence)["evidence"];
    out["predicted_class"] = fd.predicted_class;
    out["lambda"] = fd.lambda;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_experiment(const Paths& p) {
    const ExperimentConfig cfg = load_config(p.config);
    TrainedPair first;
    const ComparisonReport report = run_experiment(cfg, &first);
    write_experiment_outputs(p.out, report, first);
    return 0;
}

int cmd_uncertainty_report(const Paths& p, const std::vector<double>& thresholds, const std::string& reference) {
    const ExperimentConfig cfg = load_config(p.config);
    const Dataset data = dataset_for(cfg, p);
    const TrainedPair pair = heads_for(cfg, p, data);
    const auto test = data.subset(Split::Test);
    if (test.empty()) {
        throw ConfigError("dataset has no test samples");
    }
    std::vector<double> sweep = thresholds.empty() ? std::vector<double>{cfg.credible_threshold} : thresholds;
    const PairEvaluation ev = evaluate_pair(pair.head_a, pair.head_b, test);

    std::optional<nlohmann::json> ref;
    if (!reference.empty()) {
        ref = read_json(reference);
    }

    fs::create_directories(p.out);
    std::string credible = "view,class,threshold,count\n";
    nlohmann::json summary = nlohmann::json::object();
    const std::size_t k = data.num_classes();
    for (const auto& [view, us] : {std::pair{"a", &ev.u_a}, {"b", &ev.u_b}, {"fused", &ev.u_fused}}) {
        nlohmann::json per_threshold = nlohmann::json::array();
        for (double t : sweep) {
            const auto counts = credible_count(*us, ev.labels, k, t);
            for (std::size_t c = 0; c < k; ++c) {
                credible += std::string(view) + ',' + std::to_string(c) + ',' + nlohmann::json(t).dump() + ',' +
                            std::to_string(counts[c]) + '\n';
            }
            nlohmann::json entry = {{"threshold", t}, {"counts", counts}};
            if (ref && ref->contains(view)) {
                const auto m = ref->at(view).get<std::vector<double>>();
                const std::vector<double> n(counts.begin(), counts.end());
                entry["average_relative_error"] = average_relative_error(n, m);
            }
            per_threshold.push_back(entry);
        }
        summary[view] = per_threshold;
    }
    const PairReports reports = make_pair_reports(ev, k, sweep.front());
    const ViewReports views = {{"a", {&reports.view_a}}, {"b", {&reports.view_b}}, {"fused", {&reports.fused}}};
    write_text(fs::path(p.out) / "uncertainty_hist.csv", uncertainty_hist_csv(views));
    write_text(fs::path(p.out) / "credible_counts.csv", credible);
    write_json(fs::path(p.out) / "report.json",
               {{"credible", summary},
                {"view_a", to_json(reports.view_a)},
                {"view_b", to_json(reports.view_b)},
                {"fused", to_json(reports.fused)}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evidential two-view fusion harness"};
    app.require_subcommand(1);

    Paths p;
    std::string fuse_a;
    std::string fuse_b;
    std::vector<double> thresholds;
    std::string reference;

    auto* datagen = app.add_subcommand("datagen", "Generate a synthetic paired-view dataset");
    auto* train = app.add_subcommand("train", "Train an evidential head pair with the global loss");
    auto* eval = app.add_subcommand("eval", "Evaluate a head pair on the test split");
    auto* fuse = app.add_subcommand("fuse", "Fuse two opinions given as JSON files");
    auto* experiment = app.add_subcommand("experiment", "Multi-seed fusion-strategy comparison");
    auto* ureport = app.add_subcommand("uncertainty-report", "Uncertainty histogram and credible counts");

    for (auto* sub : {datagen, train, eval, experiment, ureport}) {
        sub->add_option("--config", p.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", p.out, "Output directory")->required();
    }
    for (auto* sub : {train, eval, ureport}) {
        sub->add_option("--data", p.data, "Dataset CSV written by datagen")->check(CLI::ExistingFile);
    }
    for (auto* sub : {eval, ureport}) {
        sub->add_option("--model-a", p.model_a, "View A model JSON")->check(CLI::ExistingFile);
        sub->add_option("--model-b", p.model_b, "View B model JSON")->check(CLI::ExistingFile);
    }
    ureport->add_option("--thresholds", thresholds, "Credibility thresholds on u");
    ureport->add_option("--reference", reference, "JSON of reference credible counts per view")->check(CLI::ExistingFile);
    fuse->add_option("--a", fuse_a, "Opinion JSON for view A")->required()->check(CLI::ExistingFile);
    fuse->add_option("--b", fuse_b, "Opinion JSON for view B")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (*datagen) return cmd_datagen(p);
        if (*train) return cmd_train(p);
        if (*eval) return cmd_eval(p);
        if (*fuse) return cmd_fuse(fuse_a, fuse_b);
        if (*experiment) return cmd_experiment(p);
        if (*ureport) return cmd_uncertainty_report(p, thresholds, reference);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
