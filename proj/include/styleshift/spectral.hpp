#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "styleshift/error.hpp"
#include "styleshift/fft.hpp"
#include "styleshift/tensor.hpp"

namespace styleshift {

/// Maximum |imag| tolerated when mapping a spectrum back to real samples.
inline constexpr double kMaxImaginaryResidue = 1e-4;

namespace detail {

inline double wrap_phase(double p) {
  constexpr double pi = std::numbers::pi;
  if (p > pi || p <= -pi) {
    p = std::remainder(p, 2.0 * pi);
    if (p <= -pi) p += 2.0 * pi;
  }
  return p;
}

// Natural DFT index of a bin stored at `centered` in a DC-centred axis.
inline std::size_t natural_index(std::size_t centered, std::size_t n) { return (centered + n - n / 2) % n; }
inline std::size_t centered_index(std::size_t natural, std::size_t n) { return (natural + n / 2) % n; }

}  // namespace detail

/// Per-channel amplitude and phase of the 2-D DFT, zero frequency at
/// (height/2, width/2) with integer division.
class Spectrum {
 public:
  Spectrum(Shape shape, std::vector<double> amplitude, std::vector<double> phase)
      : shape_(shape), amplitude_(std::move(amplitude)), phase_(std::move(phase)) {
    if (shape_.size() == 0 || amplitude_.size() != shape_.size() || phase_.size() != shape_.size()) {
      throw Error(ErrorCode::shape_mismatch, "spectrum arrays do not match " + to_string(shape_));
    }
    for (std::size_t i = 0; i < amplitude_.size(); ++i) {
      if (!std::isfinite(amplitude_[i]) || !std::isfinite(phase_[i])) {
        throw Error(ErrorCode::non_finite, "spectrum values must be finite");
      }
      if (amplitude_[i] < 0.0) throw Error(ErrorCode::invalid_argument, "negative amplitude");
      phase_[i] = detail::wrap_phase(phase_[i]);
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::span<const double> amplitude() const noexcept { return amplitude_; }
  std::span<const double> phase() const noexcept { return phase_; }
  std::size_t index(std::size_t c, std::size_t row, std::size_t col) const noexcept {
    return (c * shape_.height + row) * shape_.width + col;
  }

 private:
  Shape shape_;
  std::vector<double> amplitude_;
  std::vector<double> phase_;
};

/// Low-frequency window selected by beta.
///
/// Along an axis of n bins the nominal window length is L = floor(beta * n).
/// L == 0 on either axis gives an empty window. Otherwise the window holds
/// every bin whose signed frequency f (centred index minus n/2) satisfies
/// |f| <= L/2. The window is therefore closed under f -> -f, which keeps a
/// swapped spectrum Hermitian and the inverse transform real; an even L
/// gains one bin on the positive side. beta = 1 covers every bin.
class BetaMask {
 public:
  explicit BetaMask(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "beta must lie in [0,1], got " + std::to_string(beta));
    }
  }

  double beta() const noexcept { return beta_; }

  std::size_t nominal_length(std::size_t n) const noexcept {
    // The 1e-9 guard keeps products like 0.29 * 100 from flooring to 28.
    const auto len = static_cast<std::size_t>(std::floor(beta_ * static_cast<double>(n) + 1e-9));
    return std::min(len, n);
  }

  bool empty(std::size_t height, std::size_t width) const noexcept {
    return nominal_length(height) == 0 || nominal_length(width) == 0;
  }

  bool contains(std::size_t row, std::size_t col, std::size_t height, std::size_t width) const noexcept {
    if (empty(height, width)) return false;
    return within(row, height) && within(col, width);
  }

  std::size_t bin_count(std::size_t height, std::size_t width) const noexcept {
    if (empty(height, width)) return 0;
    return axis_bins(height) * axis_bins(width);
  }

 private:
  bool within(std::size_t idx, std::size_t n) const noexcept {
    const long long f = static_cast<long long>(idx) - static_cast<long long>(n / 2);
    const long long half = static_cast<long long>(nominal_length(n) / 2);
    return f <= half && -f <= half;
  }

  std::size_t axis_bins(std::size_t n) const noexcept {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += within(i, n) ? 1 : 0;
    return count;
  }

  double beta_;
};

/// Bilinear resize with half-pixel sample centres and edge clamping.
template <class Kind>
Tensor<Kind> resample_bilinear(const Tensor<Kind>& img, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw Error(ErrorCode::invalid_argument, "resample target must be non-empty");
  if (img.height() == height && img.width() == width) return img;
  const Shape out_shape{img.channels(), height, width};
  std::vector<float> out(out_shape.size());
  const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
  const double sx = static_cast<double>(img.width()) / static_cast<double>(width);

  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [](std::size_t n_out, std::size_t n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(n_in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(src));
      t[i] = {lo, std::min(lo + 1, n_in - 1), src - static_cast<double>(lo)};
    }
    return t;
  };
  const auto ty = taps(height, img.height(), sy);
  const auto tx = taps(width, img.width(), sx);

  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double top = (1.0 - tx[x].frac) * img.at(c, ty[y].lo, tx[x].lo) + tx[x].frac * img.at(c, ty[y].lo, tx[x].hi);
        const double bottom =
            (1.0 - tx[x].frac) * img.at(c, ty[y].hi, tx[x].lo) + tx[x].frac * img.at(c, ty[y].hi, tx[x].hi);
        out[(c * height + y) * width + x] = static_cast<float>((1.0 - ty[y].frac) * top + ty[y].frac * bottom);
      }
    }
  }
  return Tensor<Kind>(out_shape, std::move(out));
}

namespace detail {

/// Copies the real part of an inverse transform, rejecting spectra whose
/// inverse is not real to within kMaxImaginaryResidue.
inline void store_real_part(std::span<const fft::Complex> grid, std::size_t channel, std::span<float> out) {
  double residue = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    residue = std::max(residue, std::abs(grid[i].imag()));
    out[i] = static_cast<float>(grid[i].real());
  }
  if (residue > kMaxImaginaryResidue) {
    throw Error(ErrorCode::imaginary_residue, "inverse transform of channel " + std::to_string(channel) +
                                                  " left imaginary residue " + std::to_string(residue));
  }
}

}  // namespace detail

template <class Kind>
Spectrum decompose(const Tensor<Kind>& img) {
  const Shape s = img.shape();
  const fft::Plan2d plan(s.height, s.width);
  std::vector<double> amplitude(s.size());
  std::vector<double> phase(s.size());
  std::vector<fft::Complex> grid(s.plane());
  for (std::size_t c = 0; c < s.channels; ++c) {
    auto ch = img.channel(c);
    std::transform(ch.begin(), ch.end(), grid.begin(), [](float v) { return fft::Complex(v, 0.0); });
    plan.forward(grid);
    for (std::size_t y = 0; y < s.height; ++y) {
      const std::size_t cy = detail::centered_index(y, s.height);
      for (std::size_t x = 0; x < s.width; ++x) {
        const std::size_t cx = detail::centered_index(x, s.width);
        const fft::Complex v = grid[y * s.width + x];
        const std::size_t out = (c * s.height + cy) * s.width + cx;
        amplitude[out] = std::abs(v);
        phase[out] = std::arg(v);
      }
    }
  }
  return Spectrum(s, std::move(amplitude), std::move(phase));
}

/// Inverse of decompose. Throws imaginary_residue when the spectrum is not
/// (numerically) Hermitian, i.e. does not describe a real image.
inline ImageTensor recompose(const Spectrum& spec) {
  const Shape s = spec.shape();
  const fft::Plan2d plan(s.height, s.width);
  std::vector<float> out(s.size());
  std::vector<fft::Complex> grid(s.plane());
  const auto amp = spec.amplitude();
  const auto ph = spec.phase();
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t cy = 0; cy < s.height; ++cy) {
      const std::size_t y = detail::natural_index(cy, s.height);
      for (std::size_t cx = 0; cx < s.width; ++cx) {
        const std::size_t x = detail::natural_index(cx, s.width);
        const std::size_t i = spec.index(c, cy, cx);
        grid[y * s.width + x] = std::polar(amp[i], ph[i]);
      }
    }
    plan.inverse(grid);
    detail::store_real_part(grid, c, std::span<float>(out).subspan(c * s.plane(), s.plane()));
  }
  return ImageTensor(s, std::move(out));
}

/// Fourier domain adaptation: the source amplitude inside the beta window is
/// replaced by the target's, the source phase is kept everywhere. A target
/// of different size is bilinearly resampled to the source size first.
/// The result is not clamped.
inline ImageTensor fda_translate(const ImageTensor& source, const ImageTensor& target, double beta) {
  const BetaMask mask(beta);
  if (source.channels() != target.channels()) {
    throw Error(ErrorCode::shape_mismatch, "source has " + std::to_string(source.channels()) +
                                               " channels, target has " + std::to_string(target.channels()));
  }
  const Shape s = source.shape();
  if (mask.empty(s.height, s.width)) return source;

  // Works on the complex spectrum directly: rescaling a bin to the target
  // magnitude keeps its phase, and bins outside the window are untouched.
  std::vector<std::size_t> rows, cols;
  for (std::size_t cy = 0; cy < s.height; ++cy) {
    if (mask.contains(cy, s.width / 2, s.height, s.width)) rows.push_back(detail::natural_index(cy, s.height));
  }
  for (std::size_t cx = 0; cx < s.width; ++cx) {
    if (mask.contains(s.height / 2, cx, s.height, s.width)) cols.push_back(detail::natural_index(cx, s.width));
  }

  const ImageTensor resized = resample_bilinear(target, s.height, s.width);
  const fft::Plan2d plan(s.height, s.width);
  std::vector<fft::Complex> src(s.plane()), tgt(s.plane());
  std::vector<float> out(s.size());
  for (std::size_t c = 0; c < s.channels; ++c) {
    auto to_complex = [](float v) { return fft::Complex(v, 0.0); };
    std::ranges::transform(source.channel(c), src.begin(), to_complex);
    std::ranges::transform(resized.channel(c), tgt.begin(), to_complex);
    plan.forward(src);
    plan.forward(tgt);
    for (std::size_t y : rows) {
      for (std::size_t x : cols) {
        const std::size_t i = y * s.width + x;
        const double a_src = std::abs(src[i]);
        const double a_tgt = std::abs(tgt[i]);
        src[i] = a_src > 0.0 ? src[i] * (a_tgt / a_src) : fft::Complex(a_tgt, 0.0);
      }
    }
    plan.inverse(src);
    detail::store_real_part(src, c, std::span<float>(out).subspan(c * s.plane(), s.plane()));
  }
  return ImageTensor(s, std::move(out));
}

}  // namespace styleshift
