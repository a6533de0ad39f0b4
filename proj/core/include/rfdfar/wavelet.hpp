#pragma once

// Orthonormal Haar pyramid with zero padding to a multiple of 2^levels, and
// per-level SURE soft thresholding.

#include <cstddef>
#include <span>
#include <vector>

namespace rfdfar::dsp {

enum class Wavelet { Haar };

struct WaveletDecomposition {
  std::vector<double> approximation;
  std::vector<std::vector<double>> details;  // details[0] is level 1 (finest)
  int levels = 0;
  std::size_t original_length = 0;

  std::size_t padded_length() const noexcept;
  std::size_t coefficient_count() const noexcept;

  /// Throws CorruptDecomposition unless the coefficient lengths describe a
  /// valid pyramid for original_length.
  void validate() const;
};

/// Deepest decomposition an n-sample signal supports (floor(log2 n)).
int max_feasible_levels(std::size_t n) noexcept;

/// Throws std::invalid_argument, naming the maximum feasible level, when the
/// signal has fewer than 2^levels samples.
WaveletDecomposition dwt_forward(std::span<const double> signal, int levels,
                                 Wavelet wavelet = Wavelet::Haar);

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp);

/// sign(c) * max(|c| - t, 0)
double soft_threshold(double c, double t) noexcept;

struct LevelThreshold {
  double noise_scale = 0.0;  // median(|d|) / 0.6745
  double threshold = 0.0;    // absolute, in coefficient units
};

/// SURE-minimising threshold for one detail level. Candidates are 0 and the
/// normalised magnitudes up to the universal bound sqrt(2 ln n); ties go to
/// the smallest threshold. A zero noise scale yields threshold 0.
LevelThreshold sure_level_threshold(std::span<const double> details);

/// Soft-thresholds every detail level with its own SURE threshold; the
/// approximation band is untouched.
WaveletDecomposition sure_threshold(const WaveletDecomposition& decomp);

/// Thresholds chosen by sure_threshold, one per level (finest first).
std::vector<LevelThreshold> sure_thresholds(const WaveletDecomposition& decomp);

}  // namespace rfdfar::dsp
