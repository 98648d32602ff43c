#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "styleshift/error.hpp"

namespace styleshift {

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane() const noexcept { return height * width; }
  std::size_t size() const noexcept { return channels * height * width; }
  bool same_spatial(const Shape& o) const noexcept { return height == o.height && width == o.width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

struct ImageKind {};
struct FeatureKind {};

// Channel-major float raster, row-major inside a channel. Immutable once
// built: every operation returns a new tensor.
template <class Kind>
class Tensor {
 public:
  Tensor(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
    if (shape_.channels == 0 || shape_.height == 0 || shape_.width == 0) {
      throw Error(ErrorCode::invalid_argument, "tensor dimensions must be >= 1, got " + to_string(shape_));
    }
    if (shape_.height > std::numeric_limits<std::size_t>::max() / shape_.width ||
        shape_.plane() > std::numeric_limits<std::size_t>::max() / shape_.channels) {
      throw Error(ErrorCode::dimension_overflow, "tensor dimensions overflow: " + to_string(shape_));
    }
    if (data_.size() != shape_.size()) {
      throw Error(ErrorCode::shape_mismatch, "tensor " + to_string(shape_) + " needs " +
                                                 std::to_string(shape_.size()) + " samples, got " +
                                                 std::to_string(data_.size()));
    }
    for (float v : data_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "tensor samples must be finite");
    }
  }

  static Tensor filled(Shape shape, float value) {
    return Tensor(shape, std::vector<float>(shape.size(), value));
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> channel(std::size_t c) const noexcept {
    return std::span<const float>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  // Reinterpret under another kind; used to run image data through
  // feature-level operations and back.
  template <class Other>
  Tensor<Other> as() const {
    return Tensor<Other>(shape_, data_);
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Pixel data in the canonical [0,1] range (transform outputs may leave it).
using ImageTensor = Tensor<ImageKind>;
/// Unbounded network activations or scores.
using FeatureMap = Tensor<FeatureKind>;

// Per-channel mean and regularised standard deviation.
class ChannelStats {
 public:
  ChannelStats(std::vector<double> means, std::vector<double> stds, double epsilon)
      : means_(std::move(means)), stds_(std::move(stds)), epsilon_(epsilon) {
    if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
      throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
    }
    if (means_.empty() || means_.size() != stds_.size()) {
      throw Error(ErrorCode::shape_mismatch, "means and stds must have equal non-zero length");
    }
    const double floor = std::sqrt(epsilon_);
    for (std::size_t c = 0; c < means_.size(); ++c) {
      if (!std::isfinite(means_[c]) || !std::isfinite(stds_[c])) {
        throw Error(ErrorCode::non_finite, "channel statistics must be finite");
      }
      if (stds_[c] < floor) {
        throw Error(ErrorCode::invalid_argument, "std below sqrt(epsilon) in channel " + std::to_string(c));
      }
    }
  }

  std::size_t channels() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stds() const noexcept { return stds_; }
  double epsilon() const noexcept { return epsilon_; }

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;

 private:
  std::vector<double> means_;
  std::vector<double> stds_;
  double epsilon_;
};

}  // namespace styleshift
