// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace bmsim::nn {

namespace {
void uniform_fan_in(Mat& m, double fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
}
}  // namespace

Dense::Dense(int in_dim, int out_dim)
    : w_(Mat::Zero(out_dim, in_dim)), b_(Mat::Zero(out_dim, 1)),
      dw_(Mat::Zero(out_dim, in_dim)), db_(Mat::Zero(out_dim, 1)) {}

void Dense::init(Rng& rng) {
    uniform_fan_in(w_, static_cast<double>(w_.cols()), rng);
    b_.setZero();
}

Mat Dense::forward(const Mat& x) {
    if (x.rows() != w_.cols()) throw std::invalid_argument("dense: input dimension mismatch");
    x_cache_ = x;
    Mat y = w_ * x;
    y.colwise() += b_.col(0);
    return y;
}

Mat Dense::backward(const Mat& dy) {
    dw_ += dy * x_cache_.transpose();
    db_.col(0) += dy.rowwise().sum();
    return w_.transpose() * dy;
}

Mat Relu::forward(const Mat& x) {
    mask_ = (x.array() > 0.0).cast<double>();
    return x.cwiseProduct(mask_);
}

Mat Relu::backward(const Mat& dy) { return dy.cwiseProduct(mask_); }

Conv1D::Conv1D(int in_channels, int out_channels, int kernel, int length)
    : in_ch_(in_channels), out_ch_(out_channels), kernel_(kernel), length_(length),
      pad_((kernel - 1) / 2),
      w_(Mat::Zero(out_channels, in_channels * kernel)), b_(Mat::Zero(out_channels, 1)),
      dw_(Mat::Zero(out_channels, in_channels * kernel)), db_(Mat::Zero(out_channels, 1)) {
    if (kernel % 2 == 0) throw std::invalid_argument("conv1d: kernel must be odd");
}

void Conv1D::init(Rng& rng) {
    uniform_fan_in(w_, static_cast<double>(in_ch_ * kernel_), rng);
    b_.setZero();
}

Mat Conv1D::im2col(const Vec& sample) const {
    Mat col(in_ch_ * kernel_, length_);
    for (int p = 0; p < length_; ++p) {
        for (int c = 0; c < in_ch_; ++c) {
            for (int k = 0; k < kernel_; ++k) {
                const int src = p + k - pad_;
                col(c * kernel_ + k, p) =
                    (src >= 0 && src < length_) ? sample(c * length_ + src) : 0.0;
            }
        }
    }
    return col;
}

Mat Conv1D::forward(const Mat& x) {
    if (x.rows() != in_ch_ * length_) throw std::invalid_argument("conv1d: input dimension mismatch");
    x_cache_ = x;
    Mat y(out_ch_ * length_, x.cols());
    for (Eigen::Index n = 0; n < x.cols(); ++n) {
        Mat out = w_ * im2col(x.col(n));  // out_ch x length
        out.colwise() += b_.col(0);
        for (int c = 0; c < out_ch_; ++c)
            y.col(n).segment(c * length_, length_) = out.row(c).transpose();
    }
    return y;
}

Mat Conv1D::backward(const Mat& dy) {
    Mat dx = Mat::Zero(x_cache_.rows(), x_cache_.cols());
    for (Eigen::Index n = 0; n < dy.cols(); ++n) {
        Mat dout(out_ch_, length_);
        for (int c = 0; c < out_ch_; ++c)
            dout.row(c) = dy.col(n).segment(c * length_, length_).transpose();
        const Mat col = im2col(x_cache_.col(n));
        dw_ += dout * col.transpose();
        db_.col(0) += dout.rowwise().sum();
        const Mat dcol = w_.transpose() * dout;  // (in_ch*kernel) x length
        for (int p = 0; p < length_; ++p) {
            for (int c = 0; c < in_ch_; ++c) {
                for (int k = 0; k < kernel_; ++k) {
                    const int src = p + k - pad_;
                    if (src >= 0 && src < length_)
                        dx(c * length_ + src, n) += dcol(c * kernel_ + k, p);
                }
            }
        }
    }
    return dx;
}

TimeDistributedConv::TimeDistributedConv(int steps, int in_channels, int out_channels, int kernel,
                                         int length)
    : steps_(steps), in_per_step_(in_channels * length), out_per_step_(out_channels * length),
      conv_(in_channels, out_channels, kernel, length) {}

Mat TimeDistributedConv::forward(const Mat& x) {
    if (x.rows() != steps_ * in_per_step_)
        throw std::invalid_argument("td-conv: input dimension mismatch");
    step_inputs_.clear();
    Mat y(steps_ * out_per_step_, x.cols());
    for (int t = 0; t < steps_; ++t) {
        Mat xt = x.middleRows(t * in_per_step_, in_per_step_);
        step_inputs_.push_back(xt);
        y.middleRows(t * out_per_step_, out_per_step_) = relu_.forward(conv_.forward(xt));
    }
    return y;
}

Mat TimeDistributedConv::backward(const Mat& dy) {
    // forward caches only the last step inside conv_/relu_, so replay each
    // step's forward before taking its backward.
    Mat dx(steps_ * in_per_step_, dy.cols());
    for (int t = 0; t < steps_; ++t) {
        relu_.forward(conv_.forward(step_inputs_[t]));
        const Mat d = relu_.backward(dy.middleRows(t * out_per_step_, out_per_step_));
        dx.middleRows(t * in_per_step_, in_per_step_) = conv_.backward(d);
    }
    return dx;
}

Lstm::Lstm(int steps, int in_dim, int hidden)
    : steps_(steps), in_dim_(in_dim), hidden_(hidden),
      w_ih_(Mat::Zero(4 * hidden, in_dim)), w_hh_(Mat::Zero(4 * hidden, hidden)),
      b_(Mat::Zero(4 * hidden, 1)),
      dw_ih_(Mat::Zero(4 * hidden, in_dim)), dw_hh_(Mat::Zero(4 * hidden, hidden)),
      db_(Mat::Zero(4 * hidden, 1)) {}

void Lstm::init(Rng& rng) {
    uniform_fan_in(w_ih_, static_cast<double>(hidden_), rng);
    uniform_fan_in(w_hh_, static_cast<double>(hidden_), rng);
    b_.setZero();
    // forget-gate bias starts at 1 so early training keeps cell memory
    b_.block(hidden_, 0, hidden_, 1).setOnes();
}

namespace {
inline Mat sigmoid(const Mat& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }
}  // namespace

Mat Lstm::forward(const Mat& x) {
    if (x.rows() != steps_ * in_dim_) throw std::invalid_argument("lstm: input dimension mismatch");
    const Eigen::Index batch = x.cols();
    cache_.assign(steps_, {});
    Mat h = Mat::Zero(hidden_, batch);
    Mat c = Mat::Zero(hidden_, batch);
    for (int t = 0; t < steps_; ++t) {
        StepCache& sc = cache_[t];
        sc.x = x.middleRows(t * in_dim_, in_dim_);
        sc.h_prev = h;
        sc.c_prev = c;
        Mat z = w_ih_ * sc.x + w_hh_ * h;
        z.colwise() += b_.col(0);
        sc.i = sigmoid(z.topRows(hidden_));
        sc.f = sigmoid(z.middleRows(hidden_, hidden_));
        sc.g = z.middleRows(2 * hidden_, hidden_).array().tanh().matrix();
        sc.o = sigmoid(z.bottomRows(hidden_));
        c = sc.f.cwiseProduct(c) + sc.i.cwiseProduct(sc.g);
        sc.c = c;
        sc.tanh_c = c.array().tanh().matrix();
        h = sc.o.cwiseProduct(sc.tanh_c);
    }
    return h;
}

Mat Lstm::backward(const Mat& dy) {
    const Eigen::Index batch = dy.cols();
    Mat dx(steps_ * in_dim_, batch);
    Mat dh = dy;
    Mat dc = Mat::Zero(hidden_, batch);
    for (int t = steps_ - 1; t >= 0; --t) {
        const StepCache& sc = cache_[t];
        const Mat d_o = dh.cwiseProduct(sc.tanh_c);
        dc += dh.cwiseProduct(sc.o).cwiseProduct(
            (1.0 - sc.tanh_c.array().square()).matrix());
        const Mat d_i = dc.cwiseProduct(sc.g);
        const Mat d_f = dc.cwiseProduct(sc.c_prev);
        const Mat d_g = dc.cwiseProduct(sc.i);

        Mat dz(4 * hidden_, batch);
        dz.topRows(hidden_) = d_i.cwiseProduct(sc.i).cwiseProduct((1.0 - sc.i.array()).matrix());
        dz.middleRows(hidden_, hidden_) =
            d_f.cwiseProduct(sc.f).cwiseProduct((1.0 - sc.f.array()).matrix());
        dz.middleRows(2 * hidden_, hidden_) =
            d_g.cwiseProduct((1.0 - sc.g.array().square()).matrix());
        dz.bottomRows(hidden_) =
            d_o.cwiseProduct(sc.o).cwiseProduct((1.0 - sc.o.array()).matrix());

        dw_ih_ += dz * sc.x.transpose();
        dw_hh_ += dz * sc.h_prev.transpose();
        db_.col(0) += dz.rowwise().sum();
        dx.middleRows(t * in_dim_, in_dim_) = w_ih_.transpose() * dz;
        dh = w_hh_.transpose() * dz;
        dc = dc.cwiseProduct(sc.f);
    }
    return dx;
}

Mat softmax(const Mat& logits) {
    Mat p = logits;
    for (Eigen::Index n = 0; n < p.cols(); ++n) {
        const double mx = p.col(n).maxCoeff();
        p.col(n) = (p.col(n).array() - mx).exp();
        p.col(n) /= p.col(n).sum();
    }
    return p;
}

double cross_entropy_loss(const Mat& probs, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != probs.cols())
        throw std::invalid_argument("label count must match batch size");
    double loss = 0.0;
    for (Eigen::Index n = 0; n < probs.cols(); ++n) {
        const int y = labels[n];
        if (y < 0 || y >= probs.rows()) throw std::invalid_argument("label out of range");
        loss -= std::log(std::max(probs(y, n), 1e-12));
    }
    return loss / static_cast<double>(probs.cols());
}

double softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* dlogits) {
    const Mat probs = softmax(logits);
    const double loss = cross_entropy_loss(probs, labels);
    if (dlogits != nullptr) {
        *dlogits = probs;
        const double inv_batch = 1.0 / static_cast<double>(probs.cols());
        for (Eigen::Index n = 0; n < probs.cols(); ++n) (*dlogits)(labels[n], n) -= 1.0;
        *dlogits *= inv_batch;
    }
    return loss;
}

}  // namespace bmsim::nn
