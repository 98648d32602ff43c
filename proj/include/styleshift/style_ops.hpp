#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "styleshift/error.hpp"
#include "styleshift/tensor.hpp"

namespace styleshift {

struct SainConfig {
  double epsilon = 1e-5;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::invalid_argument, "SAIN epsilon must be positive");
    }
  }
};

inline constexpr std::uint32_t kDefaultIgnoreIndex = 255;

template <class Kind>
std::vector<double> channel_mean(const Tensor<Kind>& t) {
  std::vector<double> means(t.channels());
  const double n = static_cast<double>(t.shape().plane());
  for (std::size_t c = 0; c < t.channels(); ++c) {
    double sum = 0.0;
    for (float v : t.channel(c)) sum += v;
    means[c] = sum / n;
  }
  return means;
}

/// Population variance per channel (divides by H*W), no regulariser.
template <class Kind>
std::vector<double> channel_variance(const Tensor<Kind>& t) {
  const auto means = channel_mean(t);
  std::vector<double> var(t.channels());
  const double n = static_cast<double>(t.shape().plane());
  for (std::size_t c = 0; c < t.channels(); ++c) {
    double acc = 0.0;
    for (float v : t.channel(c)) {
      const double d = v - means[c];
      acc += d * d;
    }
    var[c] = acc / n;
  }
  return var;
}

/// sqrt(population variance + epsilon) per channel. epsilon may be zero here
/// to obtain the plain population standard deviation.
template <class Kind>
std::vector<double> channel_std(const Tensor<Kind>& t, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must be finite and non-negative");
  }
  auto var = channel_variance(t);
  for (auto& v : var) v = std::sqrt(v + epsilon);
  return var;
}

template <class Kind>
std::vector<double> channel_std(const Tensor<Kind>& t, const SainConfig& cfg) {
  cfg.validate();
  return channel_std(t, cfg.epsilon);
}

template <class Kind>
ChannelStats channel_stats(const Tensor<Kind>& t, double epsilon) {
  return ChannelStats(channel_mean(t), channel_std(t, epsilon), epsilon);
}

/// Shifts each channel by a constant so its mean becomes target_mean[c].
/// The output is not clamped.
template <class Kind>
Tensor<Kind> rgb_adapt(const Tensor<Kind>& source, std::span<const double> target_mean) {
  if (target_mean.size() != source.channels()) {
    throw Error(ErrorCode::shape_mismatch, "target mean has " + std::to_string(target_mean.size()) +
                                               " channels, source has " + std::to_string(source.channels()));
  }
  const auto means = channel_mean(source);
  std::vector<float> out(source.data().size());
  const std::size_t plane = source.shape().plane();
  for (std::size_t c = 0; c < source.channels(); ++c) {
    const double shift = target_mean[c] - means[c];
    auto ch = source.channel(c);
    for (std::size_t i = 0; i < plane; ++i) out[c * plane + i] = static_cast<float>(ch[i] + shift);
  }
  return Tensor<Kind>(source.shape(), std::move(out));
}

/// Style adaptive instance normalisation: re-normalises each source channel
/// to the target's mean and regularised std. Spatial sizes may differ.
template <class Kind>
Tensor<Kind> sain(const Tensor<Kind>& source, const Tensor<Kind>& target, const SainConfig& cfg = {}) {
  cfg.validate();
  if (source.channels() != target.channels()) {
    throw Error(ErrorCode::shape_mismatch, "source has " + std::to_string(source.channels()) +
                                               " channels, target has " + std::to_string(target.channels()));
  }
  const auto mu_s = channel_mean(source);
  const auto sigma_s = channel_std(source, cfg.epsilon);
  const auto mu_t = channel_mean(target);
  const auto sigma_t = channel_std(target, cfg.epsilon);

  std::vector<float> out(source.data().size());
  const std::size_t plane = source.shape().plane();
  for (std::size_t c = 0; c < source.channels(); ++c) {
    const double scale = sigma_t[c] / sigma_s[c];
    auto ch = source.channel(c);
    for (std::size_t i = 0; i < plane; ++i) {
      out[c * plane + i] = static_cast<float>(mu_t[c] + scale * (ch[i] - mu_s[c]));
    }
  }
  return Tensor<Kind>(source.shape(), std::move(out));
}

/// Dense per-pixel class indices.
class LabelMap {
 public:
  LabelMap(std::size_t height, std::size_t width, std::vector<std::uint32_t> labels)
      : height_(height), width_(width), labels_(std::move(labels)) {
    if (height_ == 0 || width_ == 0 || labels_.size() != height_ * width_) {
      throw Error(ErrorCode::shape_mismatch, "label map needs height*width entries");
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint32_t> labels_;
};

/// Mean negative log-likelihood of the labelled class under a per-pixel
/// softmax over the channel (class) axis. Pixels labelled `ignore_index`
/// are skipped.
inline double softmax_cross_entropy(const FeatureMap& scores, const LabelMap& labels,
                                    std::uint32_t ignore_index = kDefaultIgnoreIndex) {
  if (labels.height() != scores.height() || labels.width() != scores.width()) {
    throw Error(ErrorCode::shape_mismatch, "label map " + std::to_string(labels.height()) + "x" +
                                               std::to_string(labels.width()) + " does not match scores " +
                                               to_string(scores.shape()));
  }
  const std::size_t classes = scores.channels();
  const std::size_t plane = scores.shape().plane();
  const auto data = scores.data();
  const auto y = labels.labels();

  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t p = 0; p < plane; ++p) {
    if (y[p] == ignore_index) continue;
    if (y[p] >= classes) {
      throw Error(ErrorCode::label_out_of_range, "label " + std::to_string(y[p]) + " at pixel " + std::to_string(p) +
                                                     " exceeds class count " + std::to_string(classes));
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) peak = std::max(peak, static_cast<double>(data[c * plane + p]));
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(data[c * plane + p] - peak);
    total += std::log(denom) - (data[y[p] * plane + p] - peak);
    ++counted;
  }
  if (counted == 0) throw Error(ErrorCode::all_ignored, "every pixel carries the ignore label");
  return total / static_cast<double>(counted);
}

/// Content-biased loss: cross-entropy of the source scores after restyling
/// them with the target scores' channel statistics.
inline double sain_cross_entropy(const FeatureMap& source_scores, const FeatureMap& target_scores,
                                 const LabelMap& labels, const SainConfig& cfg = {},
                                 std::uint32_t ignore_index = kDefaultIgnoreIndex) {
  if (source_scores.channels() != target_scores.channels()) {
    throw Error(ErrorCode::shape_mismatch, "source and target scores disagree on class count");
  }
  return softmax_cross_entropy(sain(source_scores, target_scores, cfg), labels, ignore_index);
}

}  // namespace styleshift
