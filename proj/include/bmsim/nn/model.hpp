// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// The three classifier families (DNN, CNN-DNN, LSTM-CNN), Top-K inference,
// Adam/StepLR training and weights persistence. Every config asserts its
// parameter-count, inference-MAC and serialized-size budget at build time.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmsim/dataset.hpp"
#include "bmsim/nn/layers.hpp"

namespace bmsim::nn {

enum class ModelFamily { sbp1_dnn, sbp2_cnn_dnn, tbp_lstm_cnn };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

struct ModelConfig {
    ModelFamily family = ModelFamily::sbp2_cnn_dnn;
    int n_b = 16;             // Set B size (input beams)
    int n_a = 64;             // Set A size (output classes)
    int l_o = 1;              // observation window (TBP only)
    int hidden1 = 0;          // dense widths (family-dependent defaults)
    int hidden2 = 0;
    int conv_channels = 0;
    int lstm_hidden = 0;

    static ModelConfig sbp1(int n_b, int n_a);
    static ModelConfig sbp2(int n_b, int n_a);
    static ModelConfig tbp(int n_b, int n_a, int l_o);

    int input_dim() const;
    long param_count() const;
    long mac_count() const;
    long serialized_bytes() const;   // float32 tensors, base64-encoded
    // Throws when outside the family's parameter/MAC/size budget.
    void validate() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
    bool operator==(const ModelConfig&) const = default;
};

struct PredictionOutput {
    Vec probs;
    std::vector<int> top_k;
};

// k highest-probability indices, descending, ties toward the lower index.
std::vector<int> predict_top_k(const Vec& probs, int k);

class Model {
  public:
    Model(const ModelConfig& config, std::uint64_t init_seed);

    // Logits for a batch (training path; caches activations).
    Mat forward_logits(const Mat& x);
    Mat backward(const Mat& dlogits);

    // Softmax probabilities and Top-K for one input.
    PredictionOutput predict(const Vec& input, int k);

    std::vector<Mat*> params();
    std::vector<Mat*> grads();
    void zero_grads();
    long param_count() const;

    const ModelConfig& config() const { return config_; }
    std::uint64_t init_seed() const { return init_seed_; }

  private:
    ModelConfig config_;
    std::uint64_t init_seed_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

struct Hyper {
    double lr0 = 0.01;
    int step_epochs = 20;   // StepLR period
    double gamma = 0.5;     // StepLR decay
    int epochs = 100;
    int batch = 64;
    std::uint64_t seed = 1;
};

struct TrainCurve {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_acc;
    std::vector<double> lr;
};

class Adam {
  public:
    Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(std::vector<Mat*> params, std::vector<Mat*> grads, double lr);

  private:
    double beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<Mat> m_, v_;
};

double steplr(double lr0, double gamma, int step_epochs, int epoch);

struct TrainResult {
    std::shared_ptr<Model> model;
    TrainCurve curve;
};

// Trains on the dataset's train split, evaluating the val split each epoch.
// Deterministic under (config, dataset, hyper). Throws std::runtime_error
// carrying "numeric" on NaN loss.
TrainResult train(const ModelConfig& config, const Dataset& dataset, const Hyper& hyper);

// Top-1 accuracy of the model on the samples at `indices`.
double evaluate_accuracy(Model& model, const Dataset& dataset,
                         const std::vector<std::size_t>& indices);

// Versioned weights file: config, init seed, float32 tensors (base64) and
// the training curve. Loading reconstructs the model with float32-rounded
// parameters, which is also what in-pipeline evaluation consumes.
void save_weights(Model& model, const TrainCurve& curve, const std::string& path);
struct LoadedWeights {
    std::shared_ptr<Model> model;
    TrainCurve curve;
};
LoadedWeights load_weights(const std::string& path);

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace bmsim::nn
