#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dkmr/enhance.hpp"
#include "dkmr/error.hpp"
#include "dkmr/fourier.hpp"
#include "dkmr/matrix.hpp"

// Signal-denoising stage: forward transform, low-pass mask, inverse
// transform, max-min normalization. The result is the refined fuzzy matrix
// with every cell in [0,1].

namespace dkmr {

enum class MaskKind { Ideal, Gaussian };

struct DenoiseConfig {
  double cutoff_d0 = 0.3;  // in (0,1], against per-axis normalized frequency
  MaskKind mask_kind = MaskKind::Ideal;
};

struct RefinedKillMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<int> fail_vector;
  Matrix<double> cells;  // fuzzy values in [0,1]

  friend bool operator==(const RefinedKillMatrix&, const RefinedKillMatrix&) = default;
};

namespace detail {

// Signed normalized frequency of DFT bin u out of n: u/n up to the Nyquist
// bin, aliased to (u-n)/n above it. Using the signed value keeps the mask
// symmetric under frequency negation, so filtering a real matrix stays real.
inline double signed_frequency(std::size_t u, std::size_t n) {
  if (2 * u <= n) return static_cast<double>(u) / static_cast<double>(n);
  return (static_cast<double>(u) - static_cast<double>(n)) / static_cast<double>(n);
}

}  // namespace detail

inline Matrix<double> lowpass_mask(std::size_t n_rows, std::size_t n_cols,
                                   const DenoiseConfig& config) {
  if (n_rows < 1 || n_cols < 1) throw EmptyMatrixError();
  if (!(config.cutoff_d0 > 0.0 && config.cutoff_d0 <= 1.0))
    throw InvalidParamsError("cutoff_d0 must be in (0, 1], got " +
                             std::to_string(config.cutoff_d0));
  Matrix<double> mask(n_rows, n_cols);
  double d0_sq = config.cutoff_d0 * config.cutoff_d0;
  for (std::size_t u = 0; u < n_rows; ++u) {
    double fu = detail::signed_frequency(u, n_rows);
    for (std::size_t v = 0; v < n_cols; ++v) {
      double fv = detail::signed_frequency(v, n_cols);
      double r_sq = fu * fu + fv * fv;
      if (config.mask_kind == MaskKind::Ideal)
        mask(u, v) = r_sq <= d0_sq ? 1.0 : 0.0;
      else
        mask(u, v) = std::exp(-r_sq / (2.0 * d0_sq));
    }
  }
  return mask;
}

// (x - min) / (max - min) cell-wise; a constant matrix maps to all zeros
// since it carries no localization signal either way.
inline Matrix<double> minmax_normalize(const Matrix<double>& m) {
  if (m.empty()) throw EmptyMatrixError();
  auto [lo_it, hi_it] = std::minmax_element(m.cells().begin(), m.cells().end());
  double lo = *lo_it, hi = *hi_it;
  Matrix<double> out(m.rows(), m.cols());
  if (hi == lo) return out;
  double range = hi - lo;
  for (std::size_t i = 0; i < m.cells().size(); ++i)
    out.cells()[i] = std::clamp((m.cells()[i] - lo) / range, 0.0, 1.0);
  return out;
}

inline Matrix<double> refine_cells(const Matrix<double>& cells, const DenoiseConfig& config) {
  if (cells.empty()) throw EmptyMatrixError();
  Matrix<double> mask = lowpass_mask(cells.rows(), cells.cols(), config);
  // A full passband is exactly the identity filter; transforming would only
  // add rounding noise to values the normalization preserves.
  bool all_pass = std::all_of(mask.cells().begin(), mask.cells().end(),
                              [](double v) { return v == 1.0; });
  if (all_pass) return minmax_normalize(cells);
  Spectrum spectrum = dft2(cells);
  for (std::size_t u = 0; u < spectrum.rows(); ++u)
    for (std::size_t v = 0; v < spectrum.cols(); ++v) spectrum(u, v) *= mask(u, v);
  return minmax_normalize(idft2(spectrum));
}

namespace detail {

template <typename KillMatrixT>
RefinedKillMatrix refine_matrix(const KillMatrixT& m, const DenoiseConfig& config) {
  Matrix<double> cells(m.cells.rows(), m.cells.cols());
  for (std::size_t i = 0; i < m.cells.cells().size(); ++i)
    cells.cells()[i] = static_cast<double>(m.cells.cells()[i]);
  RefinedKillMatrix out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.fail_vector = m.fail_vector;
  out.cells = refine_cells(cells, config);
  return out;
}

}  // namespace detail

inline RefinedKillMatrix refine(const EnhancedKillMatrix& m, const DenoiseConfig& config) {
  return detail::refine_matrix(m, config);
}

inline RefinedKillMatrix refine(const BooleanKillMatrix& m, const DenoiseConfig& config) {
  return detail::refine_matrix(m, config);
}

inline void write_matrix_tsv(const RefinedKillMatrix& m, const std::filesystem::path& path) {
  detail::write_matrix_tsv_impl(path, m.rows, m.cols, m.cells,
                                [](double v) { return detail::format_real(v); });
}

}  // namespace dkmr
