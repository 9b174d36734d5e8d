#include "evifuse/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "evifuse/errors.hpp"

namespace evifuse {

namespace {

constexpr std::uint64_t kInitA = 1;
constexpr std::uint64_t kInitB = 2;
constexpr std::uint64_t kShufflePair = 3;
constexpr std::uint64_t kInitSoftmax = 4;  // + view
constexpr std::uint64_t kShuffleSoftmax = 6;  // + view

std::vector<std::size_t> training_indices(const Dataset& data) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        if (data.samples[i].split == Split::Train) {
            idx.push_back(i);
        }
    }
    if (idx.empty()) {
        throw ConfigError("dataset has no training samples");
    }
    return idx;
}

void check_dataset(const Dataset& data) {
    if (data.samples.empty()) {
        throw ConfigError("dataset is empty");
    }
    if (data.num_classes() < 2) {
        throw ConfigError("dataset needs at least 2 classes");
    }
    for (const auto& s : data.samples) {
        if (s.x_a.size() != data.dim() || s.x_b.size() != data.dim()) {
            throw DimensionError("sample feature length does not match dataset dimension");
        }
    }
}

}  // namespace

void TrainConfig::validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("train: step_size must be > 0");
    if (epochs == 0) throw ConfigError("train: epochs must be > 0");
    if (batch_size == 0) throw ConfigError("train: batch_size must be > 0");
    if (hidden_dim == 0) throw ConfigError("train: hidden_dim must be > 0");
}

double TrainConfig::step_at(std::size_t epoch) const {
    if (schedule == Schedule::Constant) {
        return step_size;
    }
    const double t = static_cast<double>(epoch) / static_cast<double>(epochs);
    return 0.5 * step_size * (1.0 + std::cos(std::numbers::pi * t));
}

nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"step_size", cfg.step_size},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"seed", cfg.seed},
            {"schedule", cfg.schedule == Schedule::Cosine ? "cosine" : "constant"},
            {"hidden_dim", cfg.hidden_dim},
            {"activation", std::string(to_string(cfg.activation))}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("train config must be a JSON object");
    }
    static const char* known[] = {"step_size", "epochs", "batch_size", "seed", "schedule", "hidden_dim", "activation"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("train config: unknown key \"" + key + "\"");
        }
    }
    TrainConfig cfg;
    try {
        cfg.step_size = j.value("step_size", cfg.step_size);
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
        const std::string schedule = j.value("schedule", std::string("cosine"));
        if (schedule == "cosine") {
            cfg.schedule = Schedule::Cosine;
        } else if (schedule == "constant") {
            cfg.schedule = Schedule::Constant;
        } else {
            throw ConfigError("train config: unknown schedule \"" + schedule + "\"");
        }
        cfg.activation = parse_activation(j.value("activation", std::string("softplus")));
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("train config: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

PairForward pair_forward(const EvidenceHead& a, const EvidenceHead& b,
                         std::span<const double> x_a, std::span<const double> x_b, std::size_t label) {
    Evidence ea = forward(a, x_a);
    Evidence eb = forward(b, x_b);
    FusedDecision fused = fuse_opinions(evidence_to_opinion(ea), evidence_to_opinion(eb));
    const LabelOneHot y(label, ea.num_classes());
    const LossBreakdown la = reciprocal_loss(evidence_to_dirichlet(ea), y);
    const LossBreakdown lb = reciprocal_loss(evidence_to_dirichlet(eb), y);
    const LossBreakdown lf = reciprocal_loss(evidence_to_dirichlet(fused.evidence), y);
    return PairForward{std::move(ea), std::move(eb), std::move(fused), la, lb, lf};
}

PairForward pair_loss_gradient(const EvidenceHead& a, const EvidenceHead& b,
                               std::span<const double> x_a, std::span<const double> x_b,
                               std::size_t label, HeadParams& grad_a, HeadParams& grad_b) {
    HeadActivations act_a;
    HeadActivations act_b;
    Evidence ea = forward(a, x_a, act_a);
    Evidence eb = forward(b, x_b, act_b);
    FusedDecision fused = fuse_opinions(evidence_to_opinion(ea), evidence_to_opinion(eb));
    const LabelOneHot y(label, ea.num_classes());

    const DirichletParams da = evidence_to_dirichlet(ea);
    const DirichletParams db = evidence_to_dirichlet(eb);
    const DirichletParams df = evidence_to_dirichlet(fused.evidence);

    // alpha = e + 1, so dL/de = dL/dalpha.
    std::vector<double> up_a = reciprocal_loss_grad(da, y);
    std::vector<double> up_b = reciprocal_loss_grad(db, y);
    const std::vector<double> up_f = reciprocal_loss_grad(df, y);
    const FusionGradient through = fuse_evidence_vjp(ea, eb, up_f);
    for (std::size_t k = 0; k < up_a.size(); ++k) {
        up_a[k] += through.view_a[k];
        up_b[k] += through.view_b[k];
    }

    grad_a.axpy(1.0, backward(a, act_a, up_a));
    grad_b.axpy(1.0, backward(b, act_b, up_b));

    PairForward out{std::move(ea), std::move(eb), std::move(fused),
                    reciprocal_loss(da, y), reciprocal_loss(db, y), reciprocal_loss(df, y)};
    return out;
}

TrainedPair train_pair(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    check_dataset(data);
    std::vector<std::size_t> order = training_indices(data);
    const auto val = data.subset(Split::Val);

    const std::size_t d = data.dim();
    const std::size_t k = data.num_classes();
    const CounterRng root(cfg.seed);
    CounterRng init_a = root.split(kInitA);
    CounterRng init_b = root.split(kInitB);

    TrainedPair out;
    out.head_a = EvidenceHead{HeadParams::random(d, cfg.hidden_dim, k, init_a), cfg.activation};
    out.head_b = EvidenceHead{HeadParams::random(d, cfg.hidden_dim, k, init_b), cfg.activation};
    out.history.reserve(cfg.epochs);

    HeadParams grad_a = HeadParams::zeros(d, cfg.hidden_dim, k);
    HeadParams grad_b = HeadParams::zeros(d, cfg.hidden_dim, k);
    const CounterRng shuffle_root = root.split(kShufflePair);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        CounterRng shuffler = shuffle_root.split(epoch);
        shuffler.shuffle(std::span<std::size_t>(order));
        const double step = cfg.step_at(epoch);

        EpochRecord rec{0.0, 0.0, 0.0, 0.0, 0.0};
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            grad_a.set_zero();
            grad_b.set_zero();
            for (std::size_t i = start; i < end; ++i) {
                const auto& s = data.samples[order[i]];
                const PairForward f = pair_loss_gradient(out.head_a, out.head_b, s.x_a, s.x_b, s.label, grad_a, grad_b);
                rec.global_loss += f.global();
                rec.loss_a += f.loss_a.total;
                rec.loss_b += f.loss_b.total;
                rec.loss_fused += f.loss_fused.total;
            }
            const double scale = -step / static_cast<double>(end - start);
            out.head_a.params.axpy(scale, grad_a);
            out.head_b.params.axpy(scale, grad_b);
            if (!out.head_a.params.all_finite() || !out.head_b.params.all_finite()) {
                throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
            }
        }
        const auto n = static_cast<double>(order.size());
        rec.global_loss /= n;
        rec.loss_a /= n;
        rec.loss_b /= n;
        rec.loss_fused /= n;

        if (!val.empty()) {
            std::size_t correct = 0;
            for (const PairedSample* s : val) {
                const FusedDecision fd = fuse_opinions(evidence_to_opinion(forward(out.head_a, s->x_a)),
                                                       evidence_to_opinion(forward(out.head_b, s->x_b)));
                correct += fd.predicted_class == s->label ? 1 : 0;
            }
            rec.val_accuracy = static_cast<double>(correct) / static_cast<double>(val.size());
        }
        out.history.push_back(rec);
    }
    return out;
}

double softmax_loss_gradient(const SoftmaxClassifier& m, std::span<const double> x, std::size_t label,
                             HeadParams& grad) {
    const HeadActivations act = forward_logits(m.params, x);
    const double top = act.logits.maxCoeff();
    Eigen::VectorXd p = (act.logits.array() - top).exp().matrix();
    const double total = p.sum();
    p /= total;
    const auto y = static_cast<Eigen::Index>(label);
    const double loss = -(act.logits(y) - top - std::log(total));
    p(y) -= 1.0;  // d CE / d logits = softmax - onehot
    backward_logits(m.params, act, p, grad);
    return loss;
}

SoftmaxClassifier train_softmax_baseline(const Dataset& data, const TrainConfig& cfg, View view) {
    cfg.validate();
    check_dataset(data);
    std::vector<std::size_t> order = training_indices(data);

    const std::size_t d = data.dim();
    const std::size_t k = data.num_classes();
    const auto v = static_cast<std::uint64_t>(view == View::A ? 0 : 1);
    const CounterRng root(cfg.seed);
    CounterRng init = root.split(kInitSoftmax + v);
    SoftmaxClassifier model{HeadParams::random(d, cfg.hidden_dim, k, init)};
    HeadParams grad = HeadParams::zeros(d, cfg.hidden_dim, k);
    const CounterRng shuffle_root = root.split(kShuffleSoftmax + v);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        CounterRng shuffler = shuffle_root.split(epoch);
        shuffler.shuffle(std::span<std::size_t>(order));
        const double step = cfg.step_at(epoch);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            grad.set_zero();
            for (std::size_t i = start; i < end; ++i) {
                const auto& s = data.samples[order[i]];
                softmax_loss_gradient(model, view == View::A ? s.x_a : s.x_b, s.label, grad);
            }
            model.params.axpy(-step / static_cast<double>(end - start), grad);
        }
        if (!model.params.all_finite()) {
            throw std::runtime_error("softmax training diverged at epoch " + std::to_string(epoch));
        }
    }
    return model;
}

}  // namespace evifuse
