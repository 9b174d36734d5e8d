#include "evifuse/model.hpp"

#include <cmath>
#include <string>

#include "evifuse/errors.hpp"

namespace evifuse {

namespace {

constexpr const char* kModelFormat = "evifuse-model-v1";

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
}

void fill_uniform(Eigen::MatrixXd& m, double bound, CounterRng& rng) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-bound, bound);
        }
    }
}

void fill_uniform(Eigen::VectorXd& v, double bound, CounterRng& rng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = rng.uniform(-bound, bound);
    }
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c));
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (j.at("rows").get<Eigen::Index>() != rows || j.at("cols").get<Eigen::Index>() != cols) {
        throw ConfigError(std::string("model: bad shape for ") + name);
    }
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw ConfigError(std::string("model: wrong element count for ") + name);
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index size, const char* name) {
    const auto data = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != size) {
        throw ConfigError(std::string("model: wrong length for ") + name);
    }
    return Eigen::Map<const Eigen::VectorXd>(data.data(), size);
}

nlohmann::json params_json(const HeadParams& p, const char* kind) {
    return {{"format", kModelFormat},
            {"kind", kind},
            {"input_dim", p.input_dim()},
            {"hidden_dim", p.hidden_dim()},
            {"num_classes", p.num_classes()},
            {"w1", matrix_json(p.w1)},
            {"b1", vector_json(p.b1)},
            {"w2", matrix_json(p.w2)},
            {"b2", vector_json(p.b2)}};
}

HeadParams params_from_json(const nlohmann::json& j, const char* kind) {
    if (!j.is_object() || j.value("format", std::string()) != kModelFormat) {
        throw ConfigError(std::string("model: expected format \"") + kModelFormat + "\"");
    }
    if (j.value("kind", std::string()) != kind) {
        throw ConfigError(std::string("model: expected kind \"") + kind + "\"");
    }
    try {
        const auto d = j.at("input_dim").get<Eigen::Index>();
        const auto h = j.at("hidden_dim").get<Eigen::Index>();
        const auto k = j.at("num_classes").get<Eigen::Index>();
        HeadParams p;
        p.w1 = matrix_from_json(j.at("w1"), d, h, "w1");
        p.b1 = vector_from_json(j.at("b1"), h, "b1");
        p.w2 = matrix_from_json(j.at("w2"), h, k, "w2");
        p.b2 = vector_from_json(j.at("b2"), k, "b2");
        if (!p.all_finite()) {
            throw ConfigError("model: non-finite parameter");
        }
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("model: ") + ex.what());
    }
}

}  // namespace

HeadParams HeadParams::zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes) {
    const auto d = static_cast<Eigen::Index>(input_dim);
    const auto h = static_cast<Eigen::Index>(hidden_dim);
    const auto k = static_cast<Eigen::Index>(num_classes);
    return HeadParams{Eigen::MatrixXd::Zero(d, h), Eigen::VectorXd::Zero(h),
                      Eigen::MatrixXd::Zero(h, k), Eigen::VectorXd::Zero(k)};
}

HeadParams HeadParams::random(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                              CounterRng& rng) {
    HeadParams p = zeros(input_dim, hidden_dim, num_classes);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    fill_uniform(p.w1, s1, rng);
    fill_uniform(p.b1, s1, rng);
    fill_uniform(p.w2, s2, rng);
    fill_uniform(p.b2, s2, rng);
    return p;
}

void HeadParams::axpy(double scale, const HeadParams& other) {
    w1 += scale * other.w1;
    b1 += scale * other.b1;
    w2 += scale * other.w2;
    b2 += scale * other.b2;
}

void HeadParams::set_zero() {
    w1.setZero();
    b1.setZero();
    w2.setZero();
    b2.setZero();
}

bool HeadParams::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

HeadActivations forward_logits(const HeadParams& p, std::span<const double> x) {
    if (x.size() != p.input_dim()) {
        throw DimensionError("head input has " + std::to_string(x.size()) + " features, expected " +
                             std::to_string(p.input_dim()));
    }
    HeadActivations act;
    act.input = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    act.hidden = (p.w1.transpose() * act.input + p.b1).array().tanh().matrix();
    act.logits = p.w2.transpose() * act.hidden + p.b2;
    return act;
}

void backward_logits(const HeadParams& p, const HeadActivations& act,
                     const Eigen::VectorXd& grad_logits, HeadParams& grad) {
    grad.w2.noalias() += act.hidden * grad_logits.transpose();
    grad.b2 += grad_logits;
    const Eigen::VectorXd grad_pre =
        ((p.w2 * grad_logits).array() * (1.0 - act.hidden.array().square())).matrix();
    grad.w1.noalias() += act.input * grad_pre.transpose();
    grad.b1 += grad_pre;
}

OutputActivation parse_activation(std::string_view name) {
    if (name == "relu") return OutputActivation::Relu;
    if (name == "softplus") return OutputActivation::Softplus;
    throw ConfigError("unknown output activation: " + std::string(name));
}

std::string_view to_string(OutputActivation act) {
    return act == OutputActivation::Relu ? "relu" : "softplus";
}

Evidence forward(const EvidenceHead& h, std::span<const double> x) {
    HeadActivations act;
    return forward(h, x, act);
}

Evidence forward(const EvidenceHead& h, std::span<const double> x, HeadActivations& act) {
    act = forward_logits(h.params, x);
    std::vector<double> e(static_cast<std::size_t>(act.logits.size()));
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double z = act.logits(static_cast<Eigen::Index>(k));
        e[k] = h.activation == OutputActivation::Relu ? std::max(z, 0.0) : softplus(z);
    }
    return Evidence(std::move(e));
}

HeadParams backward(const EvidenceHead& h, const HeadActivations& act,
                    std::span<const double> upstream) {
    if (upstream.size() != h.params.num_classes()) {
        throw DimensionError("upstream gradient length does not match class count");
    }
    Eigen::VectorXd grad_logits(act.logits.size());
    for (Eigen::Index k = 0; k < grad_logits.size(); ++k) {
        const double z = act.logits(k);
        const double slope = h.activation == OutputActivation::Relu ? (z > 0.0 ? 1.0 : 0.0) : sigmoid(z);
        grad_logits(k) = upstream[static_cast<std::size_t>(k)] * slope;
    }
    HeadParams grad = HeadParams::zeros(h.params.input_dim(), h.params.hidden_dim(), h.params.num_classes());
    backward_logits(h.params, act, grad_logits, grad);
    return grad;
}

ProbVector predict_proba(const SoftmaxClassifier& m, std::span<const double> x) {
    const HeadActivations act = forward_logits(m.params, x);
    const double top = act.logits.maxCoeff();
    std::vector<double> p(static_cast<std::size_t>(act.logits.size()));
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::exp(act.logits(static_cast<Eigen::Index>(k)) - top);
        total += p[k];
    }
    for (double& v : p) {
        v /= total;
    }
    return ProbVector(std::move(p));
}

nlohmann::json to_json(const EvidenceHead& h) {
    auto j = params_json(h.params, "evidence");
    j["output_activation"] = std::string(to_string(h.activation));
    return j;
}

nlohmann::json to_json(const SoftmaxClassifier& m) { return params_json(m.params, "softmax"); }

EvidenceHead evidence_head_from_json(const nlohmann::json& j) {
    EvidenceHead h;
    h.params = params_from_json(j, "evidence");
    h.activation = parse_activation(j.value("output_activation", std::string("softplus")));
    return h;
}

SoftmaxClassifier softmax_classifier_from_json(const nlohmann::json& j) {
    return SoftmaxClassifier{params_from_json(j, "softmax")};
}

}  // namespace evifuse
