// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Minimal dense/conv/recurrent layer stack with manual backpropagation.
// Batches are column-major: one sample per column, features down the rows.
// All parameter initialization is driven by an explicit Rng so training is
// bit-reproducible.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmsim/rng.hpp"

namespace bmsim::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

class Layer {
  public:
    virtual ~Layer() = default;
    virtual Mat forward(const Mat& x) = 0;
    // dy is the loss gradient w.r.t. the forward output; returns the
    // gradient w.r.t. the input and accumulates parameter gradients.
    virtual Mat backward(const Mat& dy) = 0;
    virtual std::vector<Mat*> params() { return {}; }
    virtual std::vector<Mat*> grads() { return {}; }
    virtual void init(Rng& rng) {}
    virtual long mac_count() const = 0;
    virtual std::string name() const = 0;
};

class Dense : public Layer {
  public:
    Dense(int in_dim, int out_dim);
    Mat forward(const Mat& x) override;
    Mat backward(const Mat& dy) override;
    std::vector<Mat*> params() override { return {&w_, &b_}; }
    std::vector<Mat*> grads() override { return {&dw_, &db_}; }
    void init(Rng& rng) override;
    long mac_count() const override { return static_cast<long>(w_.rows()) * w_.cols(); }
    std::string name() const override { return "dense"; }

  private:
    Mat w_, b_, dw_, db_, x_cache_;
};

class Relu : public Layer {
  public:
    Mat forward(const Mat& x) override;
    Mat backward(const Mat& dy) override;
    long mac_count() const override { return 0; }
    std::string name() const override { return "relu"; }

  private:
    Mat mask_;
};

// 1-D convolution over a single-channel (or multi-channel) signal laid out
// channel-major per sample: [c0 p0..L-1, c1 p0..L-1, ...]. Zero padding
// keeps the output length equal to the input length.
class Conv1D : public Layer {
  public:
    Conv1D(int in_channels, int out_channels, int kernel, int length);
    Mat forward(const Mat& x) override;
    Mat backward(const Mat& dy) override;
    std::vector<Mat*> params() override { return {&w_, &b_}; }
    std::vector<Mat*> grads() override { return {&dw_, &db_}; }
    void init(Rng& rng) override;
    long mac_count() const override {
        return static_cast<long>(length_) * out_ch_ * in_ch_ * kernel_;
    }
    std::string name() const override { return "conv1d"; }

  private:
    Mat im2col(const Vec& sample) const;
    int in_ch_, out_ch_, kernel_, length_, pad_;
    Mat w_, b_, dw_, db_;
    Mat x_cache_;
};

// Applies a shared Conv1D + ReLU to each of `steps` equal segments of the
// input; used as the per-timestep feature extractor in front of the LSTM.
class TimeDistributedConv : public Layer {
  public:
    TimeDistributedConv(int steps, int in_channels, int out_channels, int kernel, int length);
    Mat forward(const Mat& x) override;
    Mat backward(const Mat& dy) override;
    std::vector<Mat*> params() override { return conv_.params(); }
    std::vector<Mat*> grads() override { return conv_.grads(); }
    void init(Rng& rng) override { conv_.init(rng); }
    long mac_count() const override { return steps_ * conv_.mac_count(); }
    std::string name() const override { return "td-conv1d"; }
    int out_dim_per_step() const { return out_per_step_; }

  private:
    int steps_, in_per_step_, out_per_step_;
    Conv1D conv_;
    Relu relu_;
    std::vector<Mat> step_inputs_;
};

// Single-layer LSTM over `steps` timesteps; emits the final hidden state.
// Gate order in the stacked weight rows: input, forget, cell, output.
class Lstm : public Layer {
  public:
    Lstm(int steps, int in_dim, int hidden);
    Mat forward(const Mat& x) override;
    Mat backward(const Mat& dy) override;
    std::vector<Mat*> params() override { return {&w_ih_, &w_hh_, &b_}; }
    std::vector<Mat*> grads() override { return {&dw_ih_, &dw_hh_, &db_}; }
    void init(Rng& rng) override;
    long mac_count() const override {
        return static_cast<long>(steps_) * 4 * hidden_ * (in_dim_ + hidden_);
    }
    std::string name() const override { return "lstm"; }

  private:
    int steps_, in_dim_, hidden_;
    Mat w_ih_, w_hh_, b_, dw_ih_, dw_hh_, db_;
    struct StepCache {
        Mat x, h_prev, c_prev, i, f, g, o, c, tanh_c;
    };
    std::vector<StepCache> cache_;
};

// Numerically stable column-wise softmax.
Mat softmax(const Mat& logits);

// Mean negative log-likelihood of the true class over the batch; probability
// of the true class is clamped at 1e-12 before the log.
double cross_entropy_loss(const Mat& probs, const std::vector<int>& labels);

// Fused softmax + cross-entropy: returns the loss and writes the gradient
// w.r.t. the logits (already divided by the batch size).
double softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* dlogits);

}  // namespace bmsim::nn
