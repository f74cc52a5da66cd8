#include "rvgan/ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstring>

namespace rvgan::ops {

using ad::make_op;
using ad::Node;

using RowMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

namespace {

// cols layout: ((c*k + kh)*k + kw) rows, (ho*wo + ...) columns, row-major.
void im2col(const real* src, int C, int H, int W, int K, int stride, int pad,
            int dil, int Ho, int Wo, real* cols) {
    for (int c = 0; c < C; ++c) {
        for (int kh = 0; kh < K; ++kh) {
            for (int kw = 0; kw < K; ++kw) {
                real* dst = cols + (int64_t((c * K + kh) * K + kw)) * Ho * Wo;
                for (int ho = 0; ho < Ho; ++ho) {
                    const int h = ho * stride - pad + kh * dil;
                    if (h < 0 || h >= H) {
                        std::memset(dst + int64_t(ho) * Wo, 0, sizeof(real) * Wo);
                        continue;
                    }
                    const real* row = src + (int64_t(c) * H + h) * W;
                    real* out = dst + int64_t(ho) * Wo;
                    for (int wo = 0; wo < Wo; ++wo) {
                        const int w = wo * stride - pad + kw * dil;
                        out[wo] = (w < 0 || w >= W) ? real(0) : row[w];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds columns back onto the image plane.
void col2im(const real* cols, int C, int H, int W, int K, int stride, int pad,
            int dil, int Ho, int Wo, real* dst) {
    for (int c = 0; c < C; ++c) {
        for (int kh = 0; kh < K; ++kh) {
            for (int kw = 0; kw < K; ++kw) {
                const real* src = cols + (int64_t((c * K + kh) * K + kw)) * Ho * Wo;
                for (int ho = 0; ho < Ho; ++ho) {
                    const int h = ho * stride - pad + kh * dil;
                    if (h < 0 || h >= H) continue;
                    real* row = dst + (int64_t(c) * H + h) * W;
                    const real* in = src + int64_t(ho) * Wo;
                    for (int wo = 0; wo < Wo; ++wo) {
                        const int w = wo * stride - pad + kw * dil;
                        if (w >= 0 && w < W) row[w] += in[wo];
                    }
                }
            }
        }
    }
}

void check_same_shape(const Value& a, const Value& b, const char* op) {
    if (!(a->shape() == b->shape())) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a->shape().str() +
                         " vs " + b->shape().str());
    }
}

// y = f(x) elementwise with dy/dx = g(x, y).
template <typename F, typename G>
Value elementwise(const Value& x, F f, G dfdx) {
    Tensor out(x->shape());
    const real* xv = x->value.data();
    real* ov = out.data();
    const int64_t n = out.numel();
    for (int64_t i = 0; i < n; ++i) ov[i] = f(xv[i]);
    return make_op(std::move(out), {x}, [dfdx](Node& node) {
        const Value& xp = node.parents[0];
        if (!xp->requires_grad) return;
        Tensor gx(xp->shape());
        const real* xv = xp->value.data();
        const real* yv = node.value.data();
        const real* gy = node.grad.data();
        real* g = gx.data();
        const int64_t n = gx.numel();
        for (int64_t i = 0; i < n; ++i) g[i] = gy[i] * dfdx(xv[i], yv[i]);
        xp->accumulate_grad(gx);
    });
}

}  // namespace

int conv_out_dim(int in, int kernel, int stride, int dilation) {
    const int pad = dilation * (kernel - 1) / 2;
    return (in + 2 * pad - dilation * (kernel - 1) - 1) / stride + 1;
}

Value conv2d(const Value& x, const Value& weight, const Value& bias,
             int stride, int dilation, int groups) {
    const TensorSpec xs = x->shape();
    const TensorSpec ws = weight->shape();
    const int K = ws.height;
    if (K != ws.width || K % 2 == 0) {
        throw ShapeError("conv2d: kernel must be square and odd, got " + ws.str());
    }
    if (xs.channels % groups != 0 || ws.batch % groups != 0 ||
        ws.channels != xs.channels / groups) {
        throw ShapeError("conv2d: channel/group mismatch, x " + xs.str() + " w " + ws.str());
    }
    const int Ci = xs.channels, Co = ws.batch;
    const int Cig = Ci / groups, Cog = Co / groups;
    const int pad = dilation * (K - 1) / 2;
    const int Ho = conv_out_dim(xs.height, K, stride, dilation);
    const int Wo = conv_out_dim(xs.width, K, stride, dilation);
    if (bias && !(bias->shape() == TensorSpec{1, Co, 1, 1})) {
        throw ShapeError("conv2d: bias shape must be (1, Co, 1, 1)");
    }

    Tensor out({xs.batch, Co, Ho, Wo});
    const int64_t col_rows = int64_t(Cig) * K * K;
    const int64_t col_cols = int64_t(Ho) * Wo;
    std::vector<real> cols(size_t(col_rows * col_cols));

    for (int n = 0; n < xs.batch; ++n) {
        for (int g = 0; g < groups; ++g) {
            const real* xg = x->value.data() + (int64_t(n) * Ci + g * Cig) * xs.height * xs.width;
            im2col(xg, Cig, xs.height, xs.width, K, stride, pad, dilation, Ho, Wo, cols.data());
            CMapMat Wm(weight->value.data() + int64_t(g) * Cog * col_rows, Cog, col_rows);
            CMapMat Cm(cols.data(), col_rows, col_cols);
            MapMat Ym(out.data() + (int64_t(n) * Co + g * Cog) * col_cols, Cog, col_cols);
            Ym.noalias() = Wm * Cm;
        }
        if (bias) {
            for (int c = 0; c < Co; ++c) {
                real* dst = out.data() + (int64_t(n) * Co + c) * col_cols;
                const real b = bias->value[c];
                for (int64_t i = 0; i < col_cols; ++i) dst[i] += b;
            }
        }
    }

    std::vector<Value> parents = bias ? std::vector<Value>{x, weight, bias}
                                      : std::vector<Value>{x, weight};
    auto backward = [stride, dilation, groups, K, pad, Ho, Wo](Node& node) {
        const Value& xp = node.parents[0];
        const Value& wp = node.parents[1];
        const Value bp = node.parents.size() > 2 ? node.parents[2] : nullptr;
        const TensorSpec xs = xp->shape();
        const int Ci = xs.channels, Co = node.shape().channels;
        const int Cig = Ci / groups, Cog = Co / groups;
        const int64_t col_rows = int64_t(Cig) * K * K;
        const int64_t col_cols = int64_t(Ho) * Wo;

        Tensor dx, dw;
        if (xp->requires_grad) dx = Tensor(xs);
        if (wp->requires_grad) dw = Tensor(wp->shape());
        std::vector<real> cols(size_t(col_rows * col_cols));
        std::vector<real> dcols(size_t(col_rows * col_cols));

        for (int n = 0; n < xs.batch; ++n) {
            for (int g = 0; g < groups; ++g) {
                CMapMat dYm(node.grad.data() + (int64_t(n) * Co + g * Cog) * col_cols, Cog, col_cols);
                if (wp->requires_grad) {
                    const real* xg = xp->value.data() + (int64_t(n) * Ci + g * Cig) * xs.height * xs.width;
                    im2col(xg, Cig, xs.height, xs.width, K, stride, pad, dilation, Ho, Wo, cols.data());
                    CMapMat Cm(cols.data(), col_rows, col_cols);
                    MapMat dWm(dw.data() + int64_t(g) * Cog * col_rows, Cog, col_rows);
                    dWm.noalias() += dYm * Cm.transpose();
                }
                if (xp->requires_grad) {
                    CMapMat Wm(wp->value.data() + int64_t(g) * Cog * col_rows, Cog, col_rows);
                    MapMat dCm(dcols.data(), col_rows, col_cols);
                    dCm.noalias() = Wm.transpose() * dYm;
                    real* dxg = dx.data() + (int64_t(n) * Ci + g * Cig) * xs.height * xs.width;
                    col2im(dcols.data(), Cig, xs.height, xs.width, K, stride, pad, dilation, Ho, Wo, dxg);
                }
            }
        }
        if (bp && bp->requires_grad) {
            Tensor db(bp->shape());
            for (int n = 0; n < node.shape().batch; ++n) {
                for (int c = 0; c < Co; ++c) {
                    const real* g = node.grad.data() + (int64_t(n) * Co + c) * col_cols;
                    real acc = 0;
                    for (int64_t i = 0; i < col_cols; ++i) acc += g[i];
                    db[c] += acc;
                }
            }
            bp->accumulate_grad(db);
        }
        if (wp->requires_grad) wp->accumulate_grad(dw);
        if (xp->requires_grad) xp->accumulate_grad(dx);
    };
    return make_op(std::move(out), std::move(parents), std::move(backward));
}

Value conv_transpose2d(const Value& x, const Value& weight, const Value& bias, int stride) {
    const TensorSpec xs = x->shape();
    const TensorSpec ws = weight->shape();
    const int K = ws.height;
    if (K != ws.width) throw ShapeError("conv_transpose2d: kernel must be square");
    if (ws.batch != xs.channels) {
        throw ShapeError("conv_transpose2d: weight in-channels " + ws.str() +
                         " do not match input " + xs.str());
    }
    const int pad = (K - 1) / 2;
    const int out_pad = stride + 2 * pad - K;
    if (K % 2 == 0 || out_pad < 0 || out_pad >= stride) {
        throw ShapeError("conv_transpose2d: kernel " + std::to_string(K) + " stride " +
                         std::to_string(stride) + " cannot produce an exact multiple output");
    }
    const int Ci = xs.channels, Co = ws.channels;
    const int Ho = xs.height * stride, Wo = xs.width * stride;
    if (bias && !(bias->shape() == TensorSpec{1, Co, 1, 1})) {
        throw ShapeError("conv_transpose2d: bias shape must be (1, Co, 1, 1)");
    }

    const int64_t col_rows = int64_t(Co) * K * K;
    const int64_t col_cols = int64_t(xs.height) * xs.width;
    Tensor out({xs.batch, Co, Ho, Wo});
    std::vector<real> cols(size_t(col_rows * col_cols));

    for (int n = 0; n < xs.batch; ++n) {
        CMapMat Wm(weight->value.data(), Ci, col_rows);
        CMapMat Xm(x->value.data() + int64_t(n) * Ci * col_cols, Ci, col_cols);
        MapMat Cm(cols.data(), col_rows, col_cols);
        Cm.noalias() = Wm.transpose() * Xm;
        real* dst = out.data() + int64_t(n) * Co * Ho * Wo;
        col2im(cols.data(), Co, Ho, Wo, K, stride, pad, 1, xs.height, xs.width, dst);
        if (bias) {
            for (int c = 0; c < Co; ++c) {
                real* o = dst + int64_t(c) * Ho * Wo;
                const real b = bias->value[c];
                for (int64_t i = 0; i < int64_t(Ho) * Wo; ++i) o[i] += b;
            }
        }
    }

    std::vector<Value> parents = bias ? std::vector<Value>{x, weight, bias}
                                      : std::vector<Value>{x, weight};
    auto backward = [stride, K, pad](Node& node) {
        const Value& xp = node.parents[0];
        const Value& wp = node.parents[1];
        const Value bp = node.parents.size() > 2 ? node.parents[2] : nullptr;
        const TensorSpec xs = xp->shape();
        const TensorSpec os = node.shape();
        const int Ci = xs.channels, Co = os.channels;
        const int64_t col_rows = int64_t(Co) * K * K;
        const int64_t col_cols = int64_t(xs.height) * xs.width;

        std::vector<real> dcols(size_t(col_rows * col_cols));
        Tensor dx, dw;
        if (xp->requires_grad) dx = Tensor(xs);
        if (wp->requires_grad) dw = Tensor(wp->shape());

        for (int n = 0; n < xs.batch; ++n) {
            const real* go = node.grad.data() + int64_t(n) * Co * os.height * os.width;
            im2col(go, Co, os.height, os.width, K, stride, pad, 1, xs.height, xs.width, dcols.data());
            CMapMat dCm(dcols.data(), col_rows, col_cols);
            if (xp->requires_grad) {
                CMapMat Wm(wp->value.data(), Ci, col_rows);
                MapMat dXm(dx.data() + int64_t(n) * Ci * col_cols, Ci, col_cols);
                dXm.noalias() = Wm * dCm;
            }
            if (wp->requires_grad) {
                CMapMat Xm(xp->value.data() + int64_t(n) * Ci * col_cols, Ci, col_cols);
                MapMat dWm(dw.data(), Ci, col_rows);
                dWm.noalias() += Xm * dCm.transpose();
            }
        }
        if (bp && bp->requires_grad) {
            Tensor db(bp->shape());
            const int64_t hw = int64_t(os.height) * os.width;
            for (int n = 0; n < os.batch; ++n) {
                for (int c = 0; c < Co; ++c) {
                    const real* g = node.grad.data() + (int64_t(n) * Co + c) * hw;
                    real acc = 0;
                    for (int64_t i = 0; i < hw; ++i) acc += g[i];
                    db[c] += acc;
                }
            }
            bp->accumulate_grad(db);
        }
        if (wp->requires_grad) wp->accumulate_grad(dw);
        if (xp->requires_grad) xp->accumulate_grad(dx);
    };
    return make_op(std::move(out), std::move(parents), std::move(backward));
}

void channel_moments(const Tensor& x, Tensor& mean, Tensor& var) {
    const TensorSpec s = x.shape();
    mean = Tensor({1, s.channels, 1, 1});
    var = Tensor({1, s.channels, 1, 1});
    const int64_t hw = int64_t(s.height) * s.width;
    const int64_t m = int64_t(s.batch) * hw;
    for (int c = 0; c < s.channels; ++c) {
        real acc = 0;
        for (int n = 0; n < s.batch; ++n) {
            const real* p = x.data() + (int64_t(n) * s.channels + c) * hw;
            for (int64_t i = 0; i < hw; ++i) acc += p[i];
        }
        const real mu = acc / real(m);
        real vacc = 0;
        for (int n = 0; n < s.batch; ++n) {
            const real* p = x.data() + (int64_t(n) * s.channels + c) * hw;
            for (int64_t i = 0; i < hw; ++i) {
                const real d = p[i] - mu;
                vacc += d * d;
            }
        }
        mean[c] = mu;
        var[c] = vacc / real(m);
    }
}

namespace {

void check_bn_args(const Value& x, const Value& gamma, const Value& beta, const Tensor& mean,
                   const Tensor& var) {
    const int C = x->shape().channels;
    const TensorSpec want{1, C, 1, 1};
    if (!(gamma->shape() == want) || !(beta->shape() == want) || !(mean.shape() == want) ||
        !(var.shape() == want)) {
        throw ShapeError("batch_norm: gamma/beta/stats must be (1, C, 1, 1)");
    }
}

}  // namespace

Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       const Tensor& mean, const Tensor& var, real eps) {
    check_bn_args(x, gamma, beta, mean, var);
    const TensorSpec s = x->shape();
    const int64_t hw = int64_t(s.height) * s.width;
    const int64_t m = int64_t(s.batch) * hw;

    std::vector<real> invstd(size_t(s.channels));
    for (int c = 0; c < s.channels; ++c) invstd[size_t(c)] = real(1) / std::sqrt(var[c] + eps);

    auto xhat = std::make_shared<Tensor>(s);
    Tensor out(s);
    for (int n = 0; n < s.batch; ++n) {
        for (int c = 0; c < s.channels; ++c) {
            const real* xv = x->value.data() + (int64_t(n) * s.channels + c) * hw;
            real* xh = xhat->data() + (int64_t(n) * s.channels + c) * hw;
            real* ov = out.data() + (int64_t(n) * s.channels + c) * hw;
            const real mu = mean[c], is = invstd[size_t(c)], g = gamma->value[c], b = beta->value[c];
            for (int64_t i = 0; i < hw; ++i) {
                xh[i] = (xv[i] - mu) * is;
                ov[i] = g * xh[i] + b;
            }
        }
    }

    auto backward = [xhat, invstd, m, hw](Node& node) {
        const Value& xp = node.parents[0];
        const Value& gp = node.parents[1];
        const Value& bp = node.parents[2];
        const TensorSpec s = node.shape();

        Tensor dgamma({1, s.channels, 1, 1});
        Tensor dbeta({1, s.channels, 1, 1});
        for (int c = 0; c < s.channels; ++c) {
            real dg = 0, db = 0;
            for (int n = 0; n < s.batch; ++n) {
                const real* gy = node.grad.data() + (int64_t(n) * s.channels + c) * hw;
                const real* xh = xhat->data() + (int64_t(n) * s.channels + c) * hw;
                for (int64_t i = 0; i < hw; ++i) {
                    dg += gy[i] * xh[i];
                    db += gy[i];
                }
            }
            dgamma[c] = dg;
            dbeta[c] = db;
        }
        if (xp->requires_grad) {
            Tensor dx(s);
            for (int c = 0; c < s.channels; ++c) {
                const real mean_dy = dbeta[c] / real(m);
                const real mean_dyxh = dgamma[c] / real(m);
                const real k = gp->value[c] * invstd[size_t(c)];
                for (int n = 0; n < s.batch; ++n) {
                    const real* gy = node.grad.data() + (int64_t(n) * s.channels + c) * hw;
                    const real* xh = xhat->data() + (int64_t(n) * s.channels + c) * hw;
                    real* d = dx.data() + (int64_t(n) * s.channels + c) * hw;
                    for (int64_t i = 0; i < hw; ++i) {
                        d[i] = k * (gy[i] - mean_dy - xh[i] * mean_dyxh);
                    }
                }
            }
            xp->accumulate_grad(dx);
        }
        gp->accumulate_grad(dgamma);
        bp->accumulate_grad(dbeta);
    };
    return make_op(std::move(out), {x, gamma, beta}, std::move(backward));
}

Value batch_norm_eval(const Value& x, const Value& gamma, const Value& beta,
                      const Tensor& running_mean, const Tensor& running_var, real eps) {
    check_bn_args(x, gamma, beta, running_mean, running_var);
    const TensorSpec s = x->shape();
    const int64_t hw = int64_t(s.height) * s.width;

    std::vector<real> invstd(size_t(s.channels));
    std::vector<real> mu(size_t(s.channels));
    for (int c = 0; c < s.channels; ++c) {
        invstd[size_t(c)] = real(1) / std::sqrt(running_var[c] + eps);
        mu[size_t(c)] = running_mean[c];
    }

    Tensor out(s);
    for (int n = 0; n < s.batch; ++n) {
        for (int c = 0; c < s.channels; ++c) {
            const real* xv = x->value.data() + (int64_t(n) * s.channels + c) * hw;
            real* ov = out.data() + (int64_t(n) * s.channels + c) * hw;
            const real is = invstd[size_t(c)], g = gamma->value[c], b = beta->value[c], m0 = mu[size_t(c)];
            for (int64_t i = 0; i < hw; ++i) ov[i] = g * (xv[i] - m0) * is + b;
        }
    }

    auto backward = [invstd, mu, hw](Node& node) {
        const Value& xp = node.parents[0];
        const Value& gp = node.parents[1];
        const Value& bp = node.parents[2];
        const TensorSpec s = node.shape();

        Tensor dgamma({1, s.channels, 1, 1});
        Tensor dbeta({1, s.channels, 1, 1});
        Tensor dx;
        if (xp->requires_grad) dx = Tensor(s);
        for (int c = 0; c < s.channels; ++c) {
            const real is = invstd[size_t(c)], m0 = mu[size_t(c)], g = gp->value[c];
            real dg = 0, db = 0;
            for (int n = 0; n < s.batch; ++n) {
                const int64_t off = (int64_t(n) * s.channels + c) * hw;
                const real* gy = node.grad.data() + off;
                const real* xv = xp->value.data() + off;
                for (int64_t i = 0; i < hw; ++i) {
                    dg += gy[i] * (xv[i] - m0) * is;
                    db += gy[i];
                }
                if (xp->requires_grad) {
                    real* d = dx.data() + off;
                    for (int64_t i = 0; i < hw; ++i) d[i] = gy[i] * g * is;
                }
            }
            dgamma[c] = dg;
            dbeta[c] = db;
        }
        if (xp->requires_grad) xp->accumulate_grad(dx);
        gp->accumulate_grad(dgamma);
        bp->accumulate_grad(dbeta);
    };
    return make_op(std::move(out), {x, gamma, beta}, std::move(backward));
}

Value leaky_relu(const Value& x, real slope) {
    return elementwise(
        x, [slope](real v) { return v >= 0 ? v : slope * v; },
        [slope](real v, real) { return v >= 0 ? real(1) : slope; });
}

Value tanh_op(const Value& x) {
    return elementwise(
        x, [](real v) { return std::tanh(v); },
        [](real, real y) { return 1 - y * y; });
}

Value abs_op(const Value& x) {
    return elementwise(
        x, [](real v) { return std::abs(v); },
        [](real v, real) { return v > 0 ? real(1) : (v < 0 ? real(-1) : real(0)); });
}

Value square(const Value& x) {
    return elementwise(
        x, [](real v) { return v * v; },
        [](real v, real) { return 2 * v; });
}

Value min_zero(const Value& x) {
    return elementwise(
        x, [](real v) { return v < 0 ? v : real(0); },
        [](real v, real) { return v < 0 ? real(1) : real(0); });
}

Value scale(const Value& x, real s) {
    return elementwise(
        x, [s](real v) { return s * v; },
        [s](real, real) { return s; });
}

Value add_scalar(const Value& x, real c) {
    return elementwise(
        x, [c](real v) { return v + c; },
        [](real, real) { return real(1); });
}

Value neg(const Value& x) { return scale(x, -1); }

Value add(const Value& a, const Value& b) {
    check_same_shape(a, b, "add");
    Tensor out = a->value;
    out.add_(b->value);
    return make_op(std::move(out), {a, b}, [](Node& node) {
        node.parents[0]->accumulate_grad(node.grad);
        node.parents[1]->accumulate_grad(node.grad);
    });
}

Value sub(const Value& a, const Value& b) {
    check_same_shape(a, b, "sub");
    Tensor out(a->shape());
    const real* av = a->value.data();
    const real* bv = b->value.data();
    real* ov = out.data();
    for (int64_t i = 0; i < out.numel(); ++i) ov[i] = av[i] - bv[i];
    return make_op(std::move(out), {a, b}, [](Node& node) {
        node.parents[0]->accumulate_grad(node.grad);
        if (node.parents[1]->requires_grad) {
            Tensor g = node.grad;
            g.scale_(-1);
            node.parents[1]->accumulate_grad(g);
        }
    });
}

Value mean_all(const Value& x) {
    Tensor out({1, 1, 1, 1});
    out[0] = x->value.mean();
    return make_op(std::move(out), {x}, [](Node& node) {
        const Value& xp = node.parents[0];
        if (!xp->requires_grad) return;
        Tensor g(xp->shape(), node.grad[0] / real(xp->value.numel()));
        xp->accumulate_grad(g);
    });
}

Value avg_pool2(const Value& x) {
    const TensorSpec s = x->shape();
    if (s.height % 2 != 0 || s.width % 2 != 0) {
        throw ShapeError("avg_pool2: spatial dims must be even, got " + s.str());
    }
    const TensorSpec os{s.batch, s.channels, s.height / 2, s.width / 2};
    Tensor out(os);
    for (int n = 0; n < s.batch; ++n) {
        for (int c = 0; c < s.channels; ++c) {
            for (int h = 0; h < os.height; ++h) {
                for (int w = 0; w < os.width; ++w) {
                    out.at(n, c, h, w) =
                        (x->value.at(n, c, 2 * h, 2 * w) + x->value.at(n, c, 2 * h, 2 * w + 1) +
                         x->value.at(n, c, 2 * h + 1, 2 * w) + x->value.at(n, c, 2 * h + 1, 2 * w + 1)) /
                        4;
                }
            }
        }
    }
    return make_op(std::move(out), {x}, [](Node& node) {
        const Value& xp = node.parents[0];
        if (!xp->requires_grad) return;
        const TensorSpec os = node.shape();
        Tensor g(xp->shape());
        for (int n = 0; n < os.batch; ++n) {
            for (int c = 0; c < os.channels; ++c) {
                for (int h = 0; h < os.height; ++h) {
                    for (int w = 0; w < os.width; ++w) {
                        const real v = node.grad.at(n, c, h, w) / 4;
                        g.at(n, c, 2 * h, 2 * w) = v;
                        g.at(n, c, 2 * h, 2 * w + 1) = v;
                        g.at(n, c, 2 * h + 1, 2 * w) = v;
                        g.at(n, c, 2 * h + 1, 2 * w + 1) = v;
                    }
                }
            }
        }
        xp->accumulate_grad(g);
    });
}

Value concat_channels(const Value& a, const Value& b) {
    const TensorSpec as = a->shape(), bs = b->shape();
    if (as.batch != bs.batch || as.height != bs.height || as.width != bs.width) {
        throw ShapeError("concat_channels: spatial/batch mismatch " + as.str() + " vs " + bs.str());
    }
    const TensorSpec os{as.batch, as.channels + bs.channels, as.height, as.width};
    Tensor out(os);
    const int64_t hw = int64_t(as.height) * as.width;
    for (int n = 0; n < as.batch; ++n) {
        std::memcpy(out.data() + int64_t(n) * os.channels * hw,
                    a->value.data() + int64_t(n) * as.channels * hw,
                    sizeof(real) * size_t(as.channels * hw));
        std::memcpy(out.data() + (int64_t(n) * os.channels + as.channels) * hw,
                    b->value.data() + int64_t(n) * bs.channels * hw,
                    sizeof(real) * size_t(bs.channels * hw));
    }
    return make_op(std::move(out), {a, b}, [](Node& node) {
        const Value& ap = node.parents[0];
        const Value& bp = node.parents[1];
        const TensorSpec as = ap->shape(), bs = bp->shape(), os = node.shape();
        const int64_t hw = int64_t(as.height) * as.width;
        if (ap->requires_grad) {
            Tensor ga(as);
            for (int n = 0; n < as.batch; ++n) {
                std::memcpy(ga.data() + int64_t(n) * as.channels * hw,
                            node.grad.data() + int64_t(n) * os.channels * hw,
                            sizeof(real) * size_t(as.channels * hw));
            }
            ap->accumulate_grad(ga);
        }
        if (bp->requires_grad) {
            Tensor gb(bs);
            for (int n = 0; n < bs.batch; ++n) {
                std::memcpy(gb.data() + int64_t(n) * bs.channels * hw,
                            node.grad.data() + (int64_t(n) * os.channels + as.channels) * hw,
                            sizeof(real) * size_t(bs.channels * hw));
            }
            bp->accumulate_grad(gb);
        }
    });
}

Value mean_abs_diff(const Value& a, const Value& b) {
    return mean_all(abs_op(sub(a, b)));
}

Value mean_sq_diff(const Value& a, const Value& b) {
    return mean_all(square(sub(a, b)));
}

}  // namespace rvgan::ops
