#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "dkmr/error.hpp"
#include "dkmr/matrix.hpp"

// 2D discrete Fourier transform over real matrices.
//
//   F(u,v)   = sum_{x,y} M(x,y) exp(-j 2*pi (u*x/N + v*y/M))
//   M^R(x,y) = 1/(N*M) sum_{u,v} F(u,v) exp(+j 2*pi (u*x/N + v*y/M))
//
// with 0-based indices, N rows and M columns. These sums define correctness;
// the implementation evaluates them with an iterative radix-2 FFT, falling
// back to Bluestein's chirp-z algorithm for lengths that are not powers of
// two, so a transform costs O(NM log NM) for any shape.

namespace dkmr {

using Complex = std::complex<double>;
using Spectrum = Matrix<Complex>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place radix-2 Cooley-Tukey. The twiddle table carries the transform
// direction: twiddles[k] = exp(-s j 2*pi k/n) with s = +1 forward, -1
// inverse. Scaling is the caller's business.
inline void fft_pow2(Complex* a, std::size_t n, const std::vector<Complex>& twiddles,
                     const std::vector<std::uint32_t>& bitrev) {
  for (std::size_t i = 0; i < n; ++i)
    if (i < bitrev[i]) std::swap(a[i], a[bitrev[i]]);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t half = len >> 1;
    std::size_t step = n / len;
    for (std::size_t block = 0; block < n; block += len) {
      for (std::size_t j = 0; j < half; ++j) {
        // spelled-out butterfly; finite inputs make Annex-G multiply overkill
        const Complex w = twiddles[j * step];
        const Complex x = a[block + j + half];
        const double vr = x.real() * w.real() - x.imag() * w.imag();
        const double vi = x.real() * w.imag() + x.imag() * w.real();
        const Complex u = a[block + j];
        a[block + j] = Complex(u.real() + vr, u.imag() + vi);
        a[block + j + half] = Complex(u.real() - vr, u.imag() - vi);
      }
    }
  }
}

// One-dimensional transform plan for a fixed length and direction. Plans are
// immutable after construction; run() may be called from multiple threads.
class Fft1d {
 public:
  Fft1d(std::size_t n, bool inverse) : n_(n), inverse_(inverse) {
    if (n_ <= 1) return;
    if (is_pow2(n_)) {
      build_pow2_tables(n_, inverse_);
      return;
    }
    m_ = next_pow2(2 * n_ - 1);
    build_pow2_tables(m_, false);
    twiddles_inv_.resize(m_ / 2);
    for (std::size_t k = 0; k < m_ / 2; ++k) twiddles_inv_[k] = std::conj(twiddles_[k]);
    // chirp[t] = exp(-s j*pi*t^2/n) where s = +1 forward, -1 inverse.
    // t^2 is reduced mod 2n before converting to an angle; exp has period
    // 2*pi and t^2/n has period 2n, so this keeps large t accurate.
    chirp_.resize(n_);
    double sign = inverse_ ? 1.0 : -1.0;
    for (std::size_t t = 0; t < n_; ++t) {
      std::uint64_t r = (static_cast<std::uint64_t>(t) * t) % (2 * n_);
      double angle = sign * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n_);
      chirp_[t] = Complex(std::cos(angle), std::sin(angle));
    }
    std::vector<Complex> filter(m_, Complex{});
    filter[0] = std::conj(chirp_[0]);
    for (std::size_t t = 1; t < n_; ++t) {
      filter[t] = std::conj(chirp_[t]);
      filter[m_ - t] = std::conj(chirp_[t]);
    }
    fft_pow2(filter.data(), m_, twiddles_, bitrev_);
    filter_fft_ = std::move(filter);
  }

  std::size_t length() const { return n_; }

  // Unnormalized transform of n values, in place. The scratch vector is
  // grown as needed and may be shared across calls on the same thread.
  void run(Complex* a, std::vector<Complex>& scratch) const {
    if (n_ <= 1) return;
    if (m_ == 0) {
      fft_pow2(a, n_, twiddles_, bitrev_);
      return;
    }
    // Bluestein: X_k = chirp_k * (a.chirp (*) conj-chirp)_k via circular
    // convolution of length m >= 2n-1.
    scratch.assign(m_, Complex{});
    Complex* buf = scratch.data();
    for (std::size_t t = 0; t < n_; ++t) buf[t] = a[t] * chirp_[t];
    fft_pow2(buf, m_, twiddles_, bitrev_);
    for (std::size_t i = 0; i < m_; ++i) buf[i] *= filter_fft_[i];
    fft_pow2(buf, m_, twiddles_inv_, bitrev_);
    double inv_m = 1.0 / static_cast<double>(m_);
    for (std::size_t t = 0; t < n_; ++t) a[t] = buf[t] * inv_m * chirp_[t];
  }

 private:
  void build_pow2_tables(std::size_t n, bool inverse) {
    twiddles_.resize(n / 2);
    double sign = inverse ? 2.0 : -2.0;
    for (std::size_t k = 0; k < n / 2; ++k) {
      double angle = sign * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    bitrev_.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i)
      bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) ? static_cast<std::uint32_t>(n >> 1) : 0u);
  }

  std::size_t n_;
  bool inverse_;
  std::vector<Complex> twiddles_;
  std::vector<Complex> twiddles_inv_;  // Bluestein only: inverse inner transform
  std::vector<std::uint32_t> bitrev_;
  std::size_t m_ = 0;  // Bluestein padded length; 0 on the pow2 path
  std::vector<Complex> chirp_;
  std::vector<Complex> filter_fft_;
};

// Row transforms in place; column transforms run on the transpose so every
// 1D pass works on contiguous memory.
inline void transform_2d(Matrix<Complex>& m, bool inverse) {
  std::vector<Complex> scratch;
  Fft1d row_plan(m.cols(), inverse);
  for (std::size_t r = 0; r < m.rows(); ++r) row_plan.run(m.row(r).data(), scratch);
  if (m.rows() == 1) return;
  Matrix<Complex> t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  Fft1d col_plan(m.rows(), inverse);
  for (std::size_t c = 0; c < m.cols(); ++c) col_plan.run(t.row(c).data(), scratch);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = t(c, r);
}

}  // namespace detail

inline Spectrum dft2(const Matrix<double>& m) {
  if (m.empty()) throw EmptyMatrixError();
  Spectrum spectrum(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) spectrum(r, c) = Complex(m(r, c), 0.0);
  detail::transform_2d(spectrum, /*inverse=*/false);
  return spectrum;
}

// Inverse transform. The pipeline only ever inverts conjugate-symmetric
// spectra, so a material imaginary remainder means an upstream bug rather
// than rounding noise.
inline Matrix<double> idft2(const Spectrum& spectrum) {
  if (spectrum.empty()) throw EmptyMatrixError();
  Spectrum work = spectrum;
  detail::transform_2d(work, /*inverse=*/true);
  double scale = 1.0 / (static_cast<double>(work.rows()) * static_cast<double>(work.cols()));
  Matrix<double> out(work.rows(), work.cols());
  double max_imag = 0.0;
  for (std::size_t r = 0; r < work.rows(); ++r) {
    for (std::size_t c = 0; c < work.cols(); ++c) {
      Complex v = work(r, c) * scale;
      max_imag = std::max(max_imag, std::abs(v.imag()));
      out(r, c) = v.real();
    }
  }
  if (max_imag >= 1e-6) throw NonNegligibleImaginaryError(max_imag);
  return out;
}

}  // namespace dkmr
