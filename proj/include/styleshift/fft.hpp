#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace styleshift::fft {

using Complex = std::complex<double>;

/// Plain complex product. std::complex's operator* goes through a slow
/// inf/nan recovery path; inputs here are always finite.
inline Complex mul(const Complex& a, const Complex& b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Unnormalised forward DFT  X_k = sum_n x_n exp(-2 pi i k n / N)  for any
/// N >= 1. Powers of two use an iterative radix-2 kernel; other lengths go
/// through Bluestein's chirp-z reformulation on a power-of-two grid.
class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n) {
    if (n_ <= 1) return;
    if (std::has_single_bit(n_)) {
      init_radix2();
    } else {
      init_bluestein();
    }
  }

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<Complex> data) const {
    if (n_ <= 1) return;
    if (!chirp_.empty()) {
      bluestein(data);
    } else {
      radix2(data);
    }
  }

  /// Inverse DFT including the 1/N factor.
  void inverse(std::span<Complex> data) const {
    for (auto& v : data) v = std::conj(v);
    forward(data);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v = std::conj(v) * scale;
  }

 private:
  void init_radix2() {
    twiddle_.resize(n_ / 2);
    for (std::size_t k = 0; k < n_ / 2; ++k) {
      twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_));
    }
    bitrev_.resize(n_);
    const int bits = std::countr_zero(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
  }

  void init_bluestein() {
    const std::size_t m = std::bit_ceil(2 * n_ - 1);
    inner_ = std::make_unique<Plan>(m);
    chirp_.resize(n_);
    // k^2 is reduced mod 2N before scaling so the angle stays small.
    const std::uint64_t period = 2 * static_cast<std::uint64_t>(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % period;
      chirp_[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_));
    }
    kernel_.assign(m, Complex{});
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m - k] = std::conj(chirp_[k]);
    }
    inner_->forward(kernel_);
  }

  void radix2(std::span<Complex> a) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const Complex t = mul(a[start + j + half], twiddle_[j * step]);
          a[start + j + half] = a[start + j] - t;
          a[start + j] += t;
        }
      }
    }
  }

  void bluestein(std::span<Complex> data) const {
    const std::size_t m = inner_->size();
    std::vector<Complex> work(m);
    for (std::size_t k = 0; k < n_; ++k) work[k] = mul(data[k], chirp_[k]);
    inner_->forward(work);
    for (std::size_t k = 0; k < m; ++k) work[k] = mul(work[k], kernel_[k]);
    inner_->inverse(work);
    for (std::size_t k = 0; k < n_; ++k) data[k] = mul(work[k], chirp_[k]);
  }

  std::size_t n_;
  std::vector<Complex> twiddle_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
  std::unique_ptr<Plan> inner_;
};

/// Separable 2-D transform over a row-major height x width grid.
class Plan2d {
 public:
  Plan2d(std::size_t height, std::size_t width) : rows_(width), cols_(height) {}

  std::size_t height() const noexcept { return cols_.size(); }
  std::size_t width() const noexcept { return rows_.size(); }

  void forward(std::span<Complex> grid) const { run(grid, false); }
  void inverse(std::span<Complex> grid) const { run(grid, true); }

 private:
  void run(std::span<Complex> grid, bool inverse) const {
    const std::size_t h = height();
    const std::size_t w = width();
    for (std::size_t y = 0; y < h; ++y) {
      auto row = grid.subspan(y * w, w);
      inverse ? rows_.inverse(row) : rows_.forward(row);
    }
    if (h <= 1) return;
    std::vector<Complex> column(h);
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t y = 0; y < h; ++y) column[y] = grid[y * w + x];
      inverse ? cols_.inverse(column) : cols_.forward(column);
      for (std::size_t y = 0; y < h; ++y) grid[y * w + x] = column[y];
    }
  }

  Plan rows_;
  Plan cols_;
};

}  // namespace styleshift::fft
