#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "roadseg/tensor.hpp"

namespace roadseg::nn {

/// Named learnable tensor with its gradient accumulator.
struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;
};

/// Named non-learnable state (batch-norm running statistics).
struct BufferRef {
    std::string name;
    Tensor* value = nullptr;
};

void kaiming_init(Tensor& w, int fan_in, std::mt19937_64& rng);

// --- Layers ----------------------------------------------------------------
//
// All layers run on row-major batched tensors, single threaded. forward()
// may be called in train or eval mode; backward() assumes the preceding
// forward ran in train mode and accumulates parameter gradients.

/// kxk convolution, stride 1, symmetric zero padding keeping the spatial
/// size. Input (N, C, H, W); weight stored as (out_ch, in_ch*k*k).
struct Conv2d {
    int in_ch = 0, out_ch = 0, ksize = 3, pad = 1;
    Tensor w, b, gw, gb;

    void init(int in, int out, int k, std::mt19937_64& rng);
    void forward(const Tensor& x, Tensor& y) const;
    void backward(const Tensor& x, const Tensor& dy, Tensor* dx);
    void zero_grad();
    int64_t param_count() const { return w.numel() + b.numel(); }
};

/// 3x3x3 volumetric convolution over (N, C, T, H, W), stride 1, padding 1
/// on every axis.
struct Conv3d {
    int in_ch = 0, out_ch = 0;
    Tensor w, b, gw, gb;  // w: (out_ch, in_ch*27)

    void init(int in, int out, std::mt19937_64& rng);
    void forward(const Tensor& x, Tensor& y) const;
    void backward(const Tensor& x, const Tensor& dy, Tensor* dx);
    void zero_grad();
};

/// Per-channel batch normalization over all remaining axes. Works for both
/// (N, C, H, W) and (N, C, T, H, W) inputs. Train mode normalizes with
/// batch statistics and updates the running averages (momentum 0.1); eval
/// mode uses the running averages.
struct BatchNorm {
    int channels = 0;
    float momentum = 0.1f;
    float eps = 1e-5f;
    Tensor gamma, beta, ggamma, gbeta;
    Tensor running_mean, running_var;

    void init(int ch);
    void forward(const Tensor& x, Tensor& y, bool train);
    void backward(const Tensor& x, const Tensor& dy, Tensor& dx);
    void zero_grad();

  private:
    Tensor mean_, var_;  // batch stats cached by the last train-mode forward
};

void relu_forward(const Tensor& x, Tensor& y);
/// dx = dy where the forward output was positive. May alias dy and dx.
void relu_backward(const Tensor& y, const Tensor& dy, Tensor& dx);

/// 2x2 max pooling, stride 2; caches argmax positions for the backward pass.
struct MaxPool2 {
    void forward(const Tensor& x, Tensor& y);
    void backward(const Tensor& dy, Tensor& dx) const;  // dx must be sized like x

  private:
    std::vector<int64_t> argmax_;
};

/// (N, r^2*C, H, W) -> (N, C, rH, rW): out[c, r*i+a, r*j+b] = in[c*r^2+a*r+b, i, j].
Tensor pixel_shuffle(const Tensor& x, int r);
/// Exact inverse of pixel_shuffle.
Tensor pixel_unshuffle(const Tensor& y, int r);

/// Bilinear resize with half-pixel sampling, (N, C, H, W) -> (N, C, oh, ow).
Tensor resize_bilinear(const Tensor& x, int64_t oh, int64_t ow);
/// Transpose of resize_bilinear: scatters dy back onto the input grid.
Tensor resize_bilinear_backward(const Tensor& dy, int64_t in_h, int64_t in_w);

Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Splits dy of concat_channels(a, b) back into da, db.
void split_channels(const Tensor& dy, int64_t ca, Tensor& da, Tensor& db);

void sigmoid(const Tensor& x, Tensor& y);

// --- Optimizer ---------------------------------------------------------------

/// Adam with decoupled weight decay. The decay multiplier is independent of
/// the learning-rate schedule, so parameters shrink even at lr = 0.
struct AdamW {
    float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
    int64_t t = 0;

    void step(const std::vector<ParamRef>& params, float lr, float weight_decay);
    void reset() {
        t = 0;
        m_.clear();
        v_.clear();
    }

  private:
    std::vector<Tensor> m_, v_;
};

}  // namespace roadseg::nn
