#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "styleshift/spectral.hpp"
#include "test_support.hpp"

namespace {

using namespace styleshift;
using testing_support::random_image;

double phase_distance(double a, double b) {
  const double d = std::remainder(a - b, 2.0 * std::numbers::pi);
  return std::abs(d);
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

TEST(Fft, MatchesDirectDftOnAllSizesUpTo16) {
  std::mt19937_64 rng(11);
  for (std::size_t h = 1; h <= 16; ++h) {
    for (std::size_t w = 1; w <= 16; ++w) {
      const auto img = random_image(rng, 1, h, w);
      const auto ref = oracle::dft2(testing_support::to_double(img.channel(0)), h, w);
      const auto spec = decompose(img);
      for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
          const std::size_t i = spec.index(0, detail::centered_index(u, h), detail::centered_index(v, w));
          const auto& want = ref[u * w + v];
          ASSERT_NEAR(spec.amplitude()[i], std::abs(want), 1e-6) << h << "x" << w;
          if (std::abs(want) > 1e-6) {
            ASSERT_LE(phase_distance(spec.phase()[i], std::arg(want)), 1e-6) << h << "x" << w;
          }
        }
      }
    }
  }
}

TEST(Fft, InverseUndoesForwardOnOddAndPowerOfTwoLengths) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 31u, 100u, 512u}) {
    fft::Plan plan(n);
    std::vector<fft::Complex> x(n), y;
    for (auto& v : x) v = {nd(rng), nd(rng)};
    y = x;
    plan.forward(y);
    plan.inverse(y);
    for (std::size_t i = 0; i < n; ++i) ASSERT_LT(std::abs(x[i] - y[i]), 1e-10) << "n=" << n;
  }
}

TEST(Decompose, ConstantImageHasOnlyDc) {
  const std::size_t h = 6, w = 5;
  const float c = 0.3f;
  const auto spec = decompose(ImageTensor::filled({1, h, w}, c));
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double want = (y == h / 2 && x == w / 2) ? static_cast<double>(c) * h * w : 0.0;
      EXPECT_NEAR(spec.amplitude()[spec.index(0, y, x)], want, 1e-6);
    }
  }
}

TEST(Decompose, ImpulseHasFlatSpectrum) {
  std::vector<float> v(16, 0.0f);
  v[0] = 1.0f;
  const auto spec = decompose(ImageTensor({1, 4, 4}, v));
  for (double a : spec.amplitude()) EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(Recompose, RoundtripAndZeroSpectrum) {
  std::mt19937_64 rng(5);
  for (auto [h, w] : {std::pair{1u, 1u}, {3u, 8u}, {17u, 9u}, {32u, 32u}, {64u, 45u}}) {
    const auto img = random_image(rng, 3, h, w);
    EXPECT_LE(max_abs_diff(recompose(decompose(img)), img), 1e-4);
  }
  const Shape s{2, 4, 3};
  const auto zero = recompose(Spectrum(s, std::vector<double>(s.size(), 0.0), std::vector<double>(s.size(), 0.0)));
  for (float v : zero.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Recompose, NonHermitianSpectrumIsRejected) {
  const Shape s{1, 1, 4};
  std::vector<double> amp(4, 0.0);
  amp[3] = 1.0;  // frequency +1 without its -1 partner
  try {
    recompose(Spectrum(s, amp, std::vector<double>(4, 0.0)));
    FAIL() << "expected imaginary residue error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::imaginary_residue);
  }
}

TEST(Spectrum, PhaseIsWrappedIntoHalfOpenInterval) {
  const Spectrum s({1, 1, 3}, {1, 1, 1}, {-std::numbers::pi, 3 * std::numbers::pi, 0.5});
  EXPECT_DOUBLE_EQ(s.phase()[0], std::numbers::pi);
  EXPECT_NEAR(s.phase()[1], std::numbers::pi, 1e-12);
  EXPECT_DOUBLE_EQ(s.phase()[2], 0.5);
}

TEST(BetaMask, EdgeValuesAndCentering) {
  for (std::size_t h : {1u, 4u, 7u, 10u}) {
    for (std::size_t w : {1u, 5u, 8u}) {
      EXPECT_EQ(BetaMask(0.0).bin_count(h, w), 0u);
      EXPECT_EQ(BetaMask(1.0).bin_count(h, w), h * w);
      const BetaMask m(0.5);
      if (!m.empty(h, w)) { EXPECT_TRUE(m.contains(h / 2, w / 2, h, w)); }
    }
  }
  EXPECT_EQ(BetaMask(0.25).bin_count(4, 4), 1u);
  EXPECT_TRUE(BetaMask(0.25).contains(2, 2, 4, 4));
  EXPECT_THROW(BetaMask(-0.1), Error);
  EXPECT_THROW(BetaMask(1.5), Error);
  EXPECT_THROW(BetaMask(std::nan("")), Error);
}

TEST(BetaMask, WindowGrowsMonotonicallyAndIsSymmetric) {
  const std::size_t h = 12, w = 9;
  for (int step = 0; step < 100; ++step) {
    const BetaMask lo(step / 100.0), hi((step + 1) / 100.0);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (lo.contains(y, x, h, w)) { ASSERT_TRUE(hi.contains(y, x, h, w)); }
        // Frequency negation maps centred index i to (2*(n/2) - i) mod n.
        const std::size_t ny = (2 * (h / 2) + h - y) % h;
        const std::size_t nx = (2 * (w / 2) + w - x) % w;
        ASSERT_EQ(lo.contains(y, x, h, w), lo.contains(ny, nx, h, w));
      }
    }
  }
}

TEST(Resample, BilinearHalfPixelCentres) {
  const ImageTensor row({1, 1, 2}, {0.0f, 1.0f});
  const auto up = resample_bilinear(row, 1, 4);
  const std::vector<float> want = {0.0f, 0.25f, 0.75f, 1.0f};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_FLOAT_EQ(up.data()[i], want[i]);
  const auto c = resample_bilinear(ImageTensor::filled({2, 3, 5}, 0.7f), 8, 2);
  for (float v : c.data()) EXPECT_FLOAT_EQ(v, 0.7f);
}

TEST(Fda, ZeroBetaIsIdentity) {
  std::mt19937_64 rng(1);
  const auto s = random_image(rng, 3, 16, 12);
  const auto t = random_image(rng, 3, 16, 12);
  EXPECT_LE(max_abs_diff(fda_translate(s, t, 0.0), s), 1e-4);
}

TEST(Fda, SelfTranslationIsIdentity) {
  std::mt19937_64 rng(2);
  const auto x = random_image(rng, 3, 10, 14);
  for (double beta : {0.1, 0.3, 0.77, 1.0}) EXPECT_LE(max_abs_diff(fda_translate(x, x, beta), x), 1e-4);
}

TEST(Fda, ConstantSourceTakesConstantTargetThroughDc) {
  // Only the DC bin is non-zero in either spectrum and beta=0.25 swaps exactly DC.
  const auto out = fda_translate(ImageTensor::filled({1, 4, 4}, 0.4f), ImageTensor::filled({1, 4, 4}, 0.9f), 0.25);
  for (float v : out.data()) EXPECT_NEAR(v, 0.9, 1e-4);
}

TEST(Fda, MatchesDirectDftEvaluation) {
  // Full Eq. evaluated with the naive DFT: swap amplitudes inside the mask,
  // keep source phase, invert.
  std::mt19937_64 rng(8);
  const std::size_t h = 7, w = 6;
  const double beta = 0.6;
  const auto s = random_image(rng, 1, h, w);
  const auto t = random_image(rng, 1, h, w);
  const auto fs = oracle::dft2(testing_support::to_double(s.channel(0)), h, w);
  const auto ft = oracle::dft2(testing_support::to_double(t.channel(0)), h, w);
  const BetaMask mask(beta);
  std::vector<std::complex<double>> mixed(h * w);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      const bool inside = mask.contains(detail::centered_index(u, h), detail::centered_index(v, w), h, w);
      const double amp = inside ? std::abs(ft[u * w + v]) : std::abs(fs[u * w + v]);
      mixed[u * w + v] = std::polar(amp, std::arg(fs[u * w + v]));
    }
  }
  const auto want = oracle::idft2_real(mixed, h, w);
  const auto got = fda_translate(s, t, beta);
  for (std::size_t i = 0; i < h * w; ++i) EXPECT_NEAR(got.data()[i], want[i], 1e-5);
}

TEST(Fda, AmplitudeAndPhasePostconditions) {
  std::mt19937_64 rng(4);
  const auto s = random_image(rng, 3, 20, 24);
  const auto t = random_image(rng, 3, 20, 24);
  const double beta = 0.3;
  const BetaMask mask(beta);
  const auto out = decompose(fda_translate(s, t, beta));
  const auto ss = decompose(s), st = decompose(t);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 20; ++y) {
      for (std::size_t x = 0; x < 24; ++x) {
        const std::size_t i = out.index(c, y, x);
        const double want = mask.contains(y, x, 20, 24) ? st.amplitude()[i] : ss.amplitude()[i];
        ASSERT_NEAR(out.amplitude()[i], want, 1e-4);
        if (out.amplitude()[i] > 1e-6) { ASSERT_LE(phase_distance(out.phase()[i], ss.phase()[i]), 1e-3); }
      }
    }
  }
}

TEST(Fda, SecondApplicationChangesNothing) {
  std::mt19937_64 rng(6);
  for (double beta : {0.05, 0.2, 0.5, 1.0}) {
    const auto s = random_image(rng, 3, 32, 28);
    const auto t = random_image(rng, 3, 32, 28);
    const auto once = fda_translate(s, t, beta);
    EXPECT_LE(max_abs_diff(fda_translate(once, t, beta), once), 2e-4) << "beta=" << beta;
  }
}

TEST(Fda, DifferentSizedTargetIsResampled) {
  std::mt19937_64 rng(9);
  const auto s = random_image(rng, 3, 16, 16);
  const auto t = random_image(rng, 3, 9, 21);
  const double beta = 0.4;
  const auto out = decompose(fda_translate(s, t, beta));
  const auto st = decompose(resample_bilinear(t, 16, 16));
  const BetaMask mask(beta);
  for (std::size_t y = 0; y < 16; ++y) {
    for (std::size_t x = 0; x < 16; ++x) {
      if (mask.contains(y, x, 16, 16)) { EXPECT_NEAR(out.amplitude()[out.index(1, y, x)], st.amplitude()[st.index(1, y, x)], 1e-4); }
    }
  }
}

TEST(Fda, RejectsChannelMismatchAndBadBeta) {
  const auto a = ImageTensor::filled({3, 4, 4}, 0.5f);
  const auto b = ImageTensor::filled({1, 4, 4}, 0.5f);
  EXPECT_THROW(fda_translate(a, b, 0.1), Error);
  EXPECT_THROW(fda_translate(a, a, 1.01), Error);
  EXPECT_THROW(fda_translate(a, a, -0.01), Error);
}

}  // namespace
