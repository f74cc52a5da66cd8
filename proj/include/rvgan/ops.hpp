#pragma once

#include "rvgan/autodiff.hpp"

namespace rvgan::ops {

using ad::Value;

// Spatial size of a "same"-padded convolution along one axis.
int conv_out_dim(int in, int kernel, int stride, int dilation);

// 2-D convolution, zero "same" padding (kernel must be odd), NCHW.
// weight: (out_ch, in_ch/groups, k, k); bias: (1, out_ch, 1, 1) or null.
Value conv2d(const Value& x, const Value& weight, const Value& bias,
             int stride = 1, int dilation = 1, int groups = 1);

// Transposed 2-D convolution producing exactly stride x the input size.
// weight: (in_ch, out_ch, k, k). Throws ShapeError when no output padding
// in [0, stride) can realize the exact-multiple output size.
Value conv_transpose2d(const Value& x, const Value& weight, const Value& bias,
                       int stride = 2);

// Batch norm with batch statistics (training). mean/var are the biased
// per-channel batch moments, computed by the caller from x->value.
Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       const Tensor& mean, const Tensor& var, real eps);

// Batch norm with fixed statistics (eval / gradient-check mode).
Value batch_norm_eval(const Value& x, const Value& gamma, const Value& beta,
                      const Tensor& running_mean, const Tensor& running_var, real eps);

// Per-channel biased moments over (N, H, W).
void channel_moments(const Tensor& x, Tensor& mean, Tensor& var);

Value leaky_relu(const Value& x, real slope);
Value tanh_op(const Value& x);
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value scale(const Value& x, real s);
Value add_scalar(const Value& x, real c);
Value neg(const Value& x);
Value abs_op(const Value& x);       // subgradient 0 at 0
Value square(const Value& x);
Value min_zero(const Value& x);     // min(0, x), subgradient 0 at the kink
Value mean_all(const Value& x);     // scalar (1,1,1,1)
Value avg_pool2(const Value& x);    // 2x2 window, stride 2 (area downsample)
Value concat_channels(const Value& a, const Value& b);

// Mean absolute difference and mean squared difference, as graph ops.
Value mean_abs_diff(const Value& a, const Value& b);
Value mean_sq_diff(const Value& a, const Value& b);

}  // namespace rvgan::ops
