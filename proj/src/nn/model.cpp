// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace bmsim::nn {

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::sbp1_dnn: return "sbp1-dnn";
        case ModelFamily::sbp2_cnn_dnn: return "sbp2-cnn-dnn";
        default: return "tbp-lstm-cnn";
    }
}

ModelFamily model_family_from_string(const std::string& s) {
    if (s == "sbp1-dnn") return ModelFamily::sbp1_dnn;
    if (s == "sbp2-cnn-dnn") return ModelFamily::sbp2_cnn_dnn;
    if (s == "tbp-lstm-cnn") return ModelFamily::tbp_lstm_cnn;
    throw std::invalid_argument("unknown model family: " + s);
}

ModelConfig ModelConfig::sbp1(int n_b, int n_a) {
    ModelConfig c;
    c.family = ModelFamily::sbp1_dnn;
    c.n_b = n_b;
    c.n_a = n_a;
    c.hidden1 = 256;
    c.hidden2 = 256;
    c.validate();
    return c;
}

ModelConfig ModelConfig::sbp2(int n_b, int n_a) {
    ModelConfig c;
    c.family = ModelFamily::sbp2_cnn_dnn;
    c.n_b = n_b;
    c.n_a = n_a;
    c.conv_channels = 16;
    // Smaller Set B grids get a wider dense stage to stay inside the
    // family's parameter budget.
    c.hidden1 = (n_b >= 16) ? 256 : 288;
    c.validate();
    return c;
}

ModelConfig ModelConfig::tbp(int n_b, int n_a, int l_o) {
    ModelConfig c;
    c.family = ModelFamily::tbp_lstm_cnn;
    c.n_b = n_b;
    c.n_a = n_a;
    c.l_o = l_o;
    c.conv_channels = std::max(1, 256 / n_b);
    c.lstm_hidden = 96;
    c.validate();
    return c;
}

int ModelConfig::input_dim() const {
    switch (family) {
        case ModelFamily::sbp1_dnn: return 2 * n_b;
        case ModelFamily::sbp2_cnn_dnn: return n_b;
        default: return l_o * n_b;
    }
}

long ModelConfig::param_count() const {
    long total = 0;
    switch (family) {
        case ModelFamily::sbp1_dnn: {
            const long in = 2 * n_b;
            total += (in + 1L) * hidden1;
            total += (hidden1 + 1L) * hidden2;
            total += (hidden2 + 1L) * n_a;
            break;
        }
        case ModelFamily::sbp2_cnn_dnn: {
            total += (3L + 1L) * conv_channels;                 // k=3, 1 input channel
            total += (static_cast<long>(conv_channels) * n_b + 1L) * hidden1;
            total += (hidden1 + 1L) * n_a;
            break;
        }
        default: {
            total += (3L + 1L) * conv_channels;
            const long in = static_cast<long>(conv_channels) * n_b;
            total += 4L * lstm_hidden * (in + lstm_hidden + 1L);
            total += (lstm_hidden + 1L) * n_a;
        }
    }
    return total;
}

long ModelConfig::mac_count() const {
    switch (family) {
        case ModelFamily::sbp1_dnn:
            return 2L * n_b * hidden1 + static_cast<long>(hidden1) * hidden2 +
                   static_cast<long>(hidden2) * n_a;
        case ModelFamily::sbp2_cnn_dnn:
            return static_cast<long>(n_b) * conv_channels * 3 +
                   static_cast<long>(conv_channels) * n_b * hidden1 +
                   static_cast<long>(hidden1) * n_a;
        default:
            return static_cast<long>(l_o) * n_b * conv_channels * 3 +
                   static_cast<long>(l_o) * 4 * lstm_hidden *
                       (static_cast<long>(conv_channels) * n_b + lstm_hidden) +
                   static_cast<long>(lstm_hidden) * n_a;
    }
}

long ModelConfig::serialized_bytes() const {
    // float32 tensors, base64 expands by 4/3; ~2 KB of JSON scaffolding.
    return param_count() * 4L * 4L / 3L + 2048;
}

void ModelConfig::validate() const {
    if (n_b < 1 || n_a < 1) throw std::invalid_argument("model dims must be positive");
    const bool tbp = family == ModelFamily::tbp_lstm_cnn;
    if (tbp && l_o < 1) throw std::invalid_argument("TBP model needs l_o >= 1");
    const long lo_params = tbp ? 100'000 : 50'000;
    const long hi_params = tbp ? 200'000 : 150'000;
    const long p = param_count();
    if (p < lo_params || p > hi_params)
        throw std::invalid_argument(to_string(family) + ": parameter count " + std::to_string(p) +
                                    " outside budget [" + std::to_string(lo_params) + ", " +
                                    std::to_string(hi_params) + "]");
    const long mac_budget = tbp ? 2'000'000 : 1'200'000;
    if (mac_count() > mac_budget)
        throw std::invalid_argument(to_string(family) + ": inference MACs exceed budget");
    if (serialized_bytes() >= 1'048'576)
        throw std::invalid_argument(to_string(family) + ": serialized size exceeds 1 MB");
}

nlohmann::json ModelConfig::to_json() const {
    return {{"family", to_string(family)}, {"n_b", n_b},         {"n_a", n_a},
            {"l_o", l_o},                  {"hidden1", hidden1}, {"hidden2", hidden2},
            {"conv_channels", conv_channels},                    {"lstm_hidden", lstm_hidden}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.family = model_family_from_string(j.at("family").get<std::string>());
    c.n_b = j.at("n_b").get<int>();
    c.n_a = j.at("n_a").get<int>();
    c.l_o = j.at("l_o").get<int>();
    c.hidden1 = j.at("hidden1").get<int>();
    c.hidden2 = j.at("hidden2").get<int>();
    c.conv_channels = j.at("conv_channels").get<int>();
    c.lstm_hidden = j.at("lstm_hidden").get<int>();
    c.validate();
    return c;
}

std::vector<int> predict_top_k(const Vec& probs, int k) {
    const int n = static_cast<int>(probs.size());
    if (k < 1 || k > n) throw std::invalid_argument("k out of range");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        if (probs(a) != probs(b)) return probs(a) > probs(b);
        return a < b;
    });
    idx.resize(k);
    return idx;
}

Model::Model(const ModelConfig& config, std::uint64_t init_seed)
    : config_(config), init_seed_(init_seed) {
    config_.validate();
    switch (config_.family) {
        case ModelFamily::sbp1_dnn:
            layers_.push_back(std::make_unique<Dense>(config_.input_dim(), config_.hidden1));
            layers_.push_back(std::make_unique<Relu>());
            layers_.push_back(std::make_unique<Dense>(config_.hidden1, config_.hidden2));
            layers_.push_back(std::make_unique<Relu>());
            layers_.push_back(std::make_unique<Dense>(config_.hidden2, config_.n_a));
            break;
        case ModelFamily::sbp2_cnn_dnn:
            layers_.push_back(std::make_unique<Conv1D>(1, config_.conv_channels, 3, config_.n_b));
            layers_.push_back(std::make_unique<Relu>());
            layers_.push_back(
                std::make_unique<Dense>(config_.conv_channels * config_.n_b, config_.hidden1));
            layers_.push_back(std::make_unique<Relu>());
            layers_.push_back(std::make_unique<Dense>(config_.hidden1, config_.n_a));
            break;
        default:
            layers_.push_back(std::make_unique<TimeDistributedConv>(
                config_.l_o, 1, config_.conv_channels, 3, config_.n_b));
            layers_.push_back(std::make_unique<Lstm>(
                config_.l_o, config_.conv_channels * config_.n_b, config_.lstm_hidden));
            layers_.push_back(std::make_unique<Dense>(config_.lstm_hidden, config_.n_a));
    }
    Rng rng(hash_tag(init_seed, "init"));
    for (auto& l : layers_) l->init(rng);
}

Mat Model::forward_logits(const Mat& x) {
    if (x.rows() != config_.input_dim()) throw std::invalid_argument("input shape mismatch");
    Mat h = x;
    for (auto& l : layers_) h = l->forward(h);
    return h;
}

Mat Model::backward(const Mat& dlogits) {
    Mat d = dlogits;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) d = (*it)->backward(d);
    return d;
}

PredictionOutput Model::predict(const Vec& input, int k) {
    const Mat logits = forward_logits(input);
    PredictionOutput out;
    out.probs = softmax(logits).col(0);
    out.top_k = predict_top_k(out.probs, k);
    return out;
}

std::vector<Mat*> Model::params() {
    std::vector<Mat*> out;
    for (auto& l : layers_)
        for (Mat* p : l->params()) out.push_back(p);
    return out;
}

std::vector<Mat*> Model::grads() {
    std::vector<Mat*> out;
    for (auto& l : layers_)
        for (Mat* g : l->grads()) out.push_back(g);
    return out;
}

void Model::zero_grads() {
    for (Mat* g : grads()) g->setZero();
}

long Model::param_count() const {
    long n = 0;
    for (Mat* p : const_cast<Model*>(this)->params()) n += p->size();
    return n;
}

Adam::Adam(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(std::vector<Mat*> params, std::vector<Mat*> grads, double lr) {
    if (m_.empty()) {
        for (Mat* p : params) {
            m_.push_back(Mat::Zero(p->rows(), p->cols()));
            v_.push_back(Mat::Zero(p->rows(), p->cols()));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Mat& m = m_[i];
        Mat& v = v_[i];
        const Mat& g = *grads[i];
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
        params[i]->array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps_);
    }
}

double steplr(double lr0, double gamma, int step_epochs, int epoch) {
    return lr0 * std::pow(gamma, static_cast<double>(epoch / step_epochs));
}

namespace {

Mat gather_inputs(const Dataset& dataset, const std::vector<std::size_t>& idx) {
    const int dim = dataset.schema.input_dim();
    Mat x(dim, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        x.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Vec>(dataset.samples[idx[j]].input.data(), dim);
    return x;
}

std::vector<int> gather_labels(const Dataset& dataset, const std::vector<std::size_t>& idx) {
    std::vector<int> y(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) y[j] = dataset.samples[idx[j]].label;
    return y;
}

}  // namespace

TrainResult train(const ModelConfig& config, const Dataset& dataset, const Hyper& hyper) {
    if (dataset.schema.input_dim() != config.input_dim() || dataset.schema.n_a != config.n_a)
        throw std::invalid_argument("dataset schema does not match model config");
    const auto train_idx = dataset.indices_of(Split::train);
    const auto val_idx = dataset.indices_of(Split::val);
    if (train_idx.empty()) throw std::invalid_argument("empty train split");

    TrainResult result;
    result.model = std::make_shared<Model>(config, hyper.seed);
    Model& model = *result.model;
    Adam adam;
    Rng shuffle_rng(hash_tag(hyper.seed, "shuffle"));

    std::vector<std::size_t> order = train_idx;
    const Mat val_x = val_idx.empty() ? Mat() : gather_inputs(dataset, val_idx);
    const std::vector<int> val_y = gather_labels(dataset, val_idx);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const double lr = steplr(hyper.lr0, hyper.gamma, hyper.step_epochs, epoch);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(static_cast<int>(i))]);

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
            const std::size_t end = std::min(order.size(), start + hyper.batch);
            const std::vector<std::size_t> batch_idx(order.begin() + start, order.begin() + end);
            const Mat x = gather_inputs(dataset, batch_idx);
            const std::vector<int> y = gather_labels(dataset, batch_idx);

            model.zero_grads();
            const Mat logits = model.forward_logits(x);
            Mat dlogits;
            const double loss = softmax_cross_entropy(logits, y, &dlogits);
            if (!std::isfinite(loss))
                throw std::runtime_error("numeric: NaN loss at epoch " + std::to_string(epoch));
            model.backward(dlogits);
            adam.step(model.params(), model.grads(), lr);
            epoch_loss += loss;
            ++n_batches;
        }

        result.curve.train_loss.push_back(epoch_loss / static_cast<double>(n_batches));
        result.curve.lr.push_back(lr);
        if (!val_idx.empty()) {
            const Mat logits = model.forward_logits(val_x);
            result.curve.val_loss.push_back(cross_entropy_loss(softmax(logits), val_y));
            int correct = 0;
            for (Eigen::Index n = 0; n < logits.cols(); ++n) {
                Eigen::Index best;
                logits.col(n).maxCoeff(&best);
                if (static_cast<int>(best) == val_y[n]) ++correct;
            }
            result.curve.val_acc.push_back(static_cast<double>(correct) /
                                           static_cast<double>(val_y.size()));
        }
    }
    return result;
}

double evaluate_accuracy(Model& model, const Dataset& dataset,
                         const std::vector<std::size_t>& indices) {
    if (indices.empty()) return 0.0;
    const Mat x = gather_inputs(dataset, indices);
    const std::vector<int> y = gather_labels(dataset, indices);
    const Mat logits = model.forward_logits(x);
    int correct = 0;
    for (Eigen::Index n = 0; n < logits.cols(); ++n) {
        Eigen::Index best;
        logits.col(n).maxCoeff(&best);
        if (static_cast<int>(best) == y[n]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

// --- weights persistence ---------------------------------------------------

namespace {
constexpr char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= data[i + 2];
        out.push_back(kB64Chars[(chunk >> 18) & 63]);
        out.push_back(kB64Chars[(chunk >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64Chars[(chunk >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kB64Chars[chunk & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    std::uint32_t chunk = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') break;
        const int v = val(c);
        if (v < 0) throw std::runtime_error("invalid base64 payload");
        chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((chunk >> bits) & 0xff));
        }
    }
    return out;
}

void save_weights(Model& model, const TrainCurve& curve, const std::string& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = model.config().to_json();
    j["seed"] = model.init_seed();
    auto& tensors = j["tensors"] = nlohmann::json::array();
    for (Mat* p : model.params()) {
        std::vector<float> data(static_cast<std::size_t>(p->size()));
        for (Eigen::Index i = 0; i < p->size(); ++i)
            data[static_cast<std::size_t>(i)] = static_cast<float>((*p)(i));
        tensors.push_back({{"rows", p->rows()},
                           {"cols", p->cols()},
                           {"data", base64_encode(reinterpret_cast<const std::uint8_t*>(data.data()),
                                                  data.size() * sizeof(float))}});
    }
    j["curve"] = {{"train_loss", curve.train_loss},
                  {"val_loss", curve.val_loss},
                  {"val_acc", curve.val_acc},
                  {"lr", curve.lr}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump();
    if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedWeights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt weights file " + path + ": " + e.what());
    }
    if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported weights version");

    LoadedWeights out;
    const ModelConfig config = ModelConfig::from_json(j.at("config"));
    out.model = std::make_shared<Model>(config, j.at("seed").get<std::uint64_t>());
    auto params = out.model->params();
    const auto& tensors = j.at("tensors");
    if (tensors.size() != params.size()) throw std::runtime_error("weights tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = tensors[i];
        Mat& p = *params[i];
        if (t.at("rows").get<Eigen::Index>() != p.rows() ||
            t.at("cols").get<Eigen::Index>() != p.cols())
            throw std::runtime_error("weights tensor shape mismatch");
        const auto bytes = base64_decode(t.at("data").get<std::string>());
        if (bytes.size() != static_cast<std::size_t>(p.size()) * sizeof(float))
            throw std::runtime_error("weights tensor payload size mismatch");
        const float* data = reinterpret_cast<const float*>(bytes.data());
        for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = static_cast<double>(data[k]);
    }
    const auto& c = j.at("curve");
    out.curve.train_loss = c.at("train_loss").get<std::vector<double>>();
    out.curve.val_loss = c.at("val_loss").get<std::vector<double>>();
    out.curve.val_acc = c.at("val_acc").get<std::vector<double>>();
    out.curve.lr = c.at("lr").get<std::vector<double>>();
    return out;
}

}  // namespace bmsim::nn
