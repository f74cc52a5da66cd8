#include "rvgan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rvgan {

std::string TensorSpec::str() const {
    std::ostringstream os;
    os << "(" << batch << ", " << channels << ", " << height << ", " << width << ")";
    return os.str();
}

void TensorSpec::validate() const {
    if (batch < 1 || channels < 1 || height < 1 || width < 1) {
        throw ShapeError("TensorSpec: all dimensions must be >= 1, got " + str());
    }
}

Tensor Tensor::randn(TensorSpec spec, Rng& rng, real stddev, real mean) {
    Tensor t(spec);
    for (auto& v : t.data_) v = rng.normal(mean, stddev);
    return t;
}

void Tensor::add_(const Tensor& other) {
    if (!(spec_ == other.spec_)) {
        throw ShapeError("Tensor::add_: shape mismatch " + spec_.str() + " vs " + other.spec_.str());
    }
    const real* src = other.data();
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += src[i];
}

void Tensor::scale_(real s) {
    for (auto& v : data_) v *= s;
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](real v) { return std::isfinite(v); });
}

real Tensor::min() const {
    return data_.empty() ? real(0) : *std::min_element(data_.begin(), data_.end());
}

real Tensor::max() const {
    return data_.empty() ? real(0) : *std::max_element(data_.begin(), data_.end());
}

real Tensor::sum() const {
    real acc = 0;
    for (real v : data_) acc += v;
    return acc;
}

bool Tensor::same_values(const Tensor& other) const {
    return spec_ == other.spec_ && data_ == other.data_;
}

}  // namespace rvgan
