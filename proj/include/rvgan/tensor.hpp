#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvgan/common.hpp"
#include "rvgan/random.hpp"

namespace rvgan {

// Rank-4 shape, batch x channels x height x width. Also reused for
// convolution weights, where the fields read (out, in, kh, kw).
struct TensorSpec {
    int batch = 1;
    int channels = 1;
    int height = 1;
    int width = 1;

    int64_t numel() const {
        return int64_t(batch) * channels * height * width;
    }
    bool operator==(const TensorSpec& o) const = default;
    std::string str() const;
    // Throws ShapeError unless every dimension is >= 1.
    void validate() const;
};

// Dense rank-4 array in NCHW layout, value semantics.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(TensorSpec spec) : spec_(spec), data_(spec.numel(), real(0)) {
        spec.validate();
    }
    Tensor(TensorSpec spec, real fill) : spec_(spec), data_(spec.numel(), fill) {
        spec.validate();
    }

    static Tensor zeros(TensorSpec spec) { return Tensor(spec); }
    static Tensor full(TensorSpec spec, real v) { return Tensor(spec, v); }
    static Tensor randn(TensorSpec spec, Rng& rng, real stddev = 1.0, real mean = 0.0);

    const TensorSpec& shape() const { return spec_; }
    int64_t numel() const { return spec_.numel(); }
    bool empty() const { return data_.empty(); }

    real* data() { return data_.data(); }
    const real* data() const { return data_.data(); }

    real& operator[](int64_t i) { return data_[size_t(i)]; }
    real operator[](int64_t i) const { return data_[size_t(i)]; }

    real& at(int n, int c, int h, int w) {
        return data_[size_t(((int64_t(n) * spec_.channels + c) * spec_.height + h) * spec_.width + w)];
    }
    real at(int n, int c, int h, int w) const {
        return data_[size_t(((int64_t(n) * spec_.channels + c) * spec_.height + h) * spec_.width + w)];
    }

    // Elementwise accumulate; shapes must agree.
    void add_(const Tensor& other);
    void scale_(real s);
    void fill_(real v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const;
    real min() const;
    real max() const;
    real sum() const;
    real mean() const { return numel() ? sum() / real(numel()) : real(0); }

    bool same_values(const Tensor& other) const;  // bitwise equality

    std::vector<real>& raw() { return data_; }
    const std::vector<real>& raw() const { return data_; }

private:
    TensorSpec spec_{};
    std::vector<real> data_;
};

}  // namespace rvgan
