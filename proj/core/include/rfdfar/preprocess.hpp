#pragma once

// Signal-cleaning chain: clip, Haar DWT, SURE shrinkage, inverse DWT and a
// centred moving average.

#include <cstddef>

#include "rfdfar/trace.hpp"

namespace rfdfar::dsp {

inline constexpr int kDefaultLevels = 13;
inline constexpr std::size_t kDefaultSmoothLen = 1001;

/// Samples with time in [start_s, end_s). Metadata is kept.
Trace clip(const Trace& trace, double start_s, double end_s);

/// Centred moving average; windows shrink at the edges so the output has the
/// input's length. Even lengths take one more sample to the right.
Trace smooth_moving_average(const Trace& trace, std::size_t window_len);

/// smooth(idwt(sure(dwt(trace, levels))), smooth_len). When the trace is too
/// short for `levels`, the deepest feasible decomposition is used and a
/// warning is logged.
Trace denoise(const Trace& trace, int levels = kDefaultLevels,
              std::size_t smooth_len = kDefaultSmoothLen);

struct DipCount {
  std::size_t events = 0;
  double baseline_rms = 0.0;  // median of per-bin RMS
  double min_ratio = 0.0;     // smallest bin RMS / baseline
};

/// Counts amplitude dips: the trace is cut into `bin_s` bins, a bin is "low"
/// when its RMS is below `fraction` of the median bin RMS, and each maximal
/// run of low bins is one event.
DipCount count_dips(const Trace& trace, double bin_s = 0.05, double fraction = 0.5);

}  // namespace rfdfar::dsp
