#include "rfdfar/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfdfar/log.hpp"
#include "rfdfar/wavelet.hpp"

namespace rfdfar::dsp {

Trace clip(const Trace& trace, double start_s, double end_s) {
  trace.validate();
  if (!(start_s >= 0.0) || !(end_s > start_s) || end_s > trace.duration() + 1e-12) {
    throw std::invalid_argument("clip: need 0 <= start < end <= duration");
  }
  auto first = static_cast<std::size_t>(std::llround(start_s * trace.sample_rate));
  auto last = std::min(trace.size(), static_cast<std::size_t>(std::llround(end_s * trace.sample_rate)));
  if (first >= last) throw std::invalid_argument("clip: range contains no samples");
  Trace out;
  out.sample_rate = trace.sample_rate;
  out.meta = trace.meta;
  out.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     trace.samples.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

Trace smooth_moving_average(const Trace& trace, std::size_t window_len) {
  trace.validate();
  const std::size_t n = trace.size();
  if (window_len < 1 || window_len > n) {
    throw std::invalid_argument("smooth_moving_average: window length " +
                                std::to_string(window_len) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  Trace out = trace;
  if (window_len == 1) return out;

  const auto& x = trace.samples;
  const std::size_t left = (window_len - 1) / 2;
  const std::size_t right = window_len / 2;
  // Running sum over [lo, hi).
  long double sum = 0.0L;
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want_lo = i >= left ? i - left : 0;
    const std::size_t want_hi = std::min(n, i + right + 1);
    for (; hi < want_hi; ++hi) sum += x[hi];
    for (; lo < want_lo; ++lo) sum -= x[lo];
    out.samples[i] = static_cast<double>(sum / static_cast<long double>(hi - lo));
  }
  return out;
}

Trace denoise(const Trace& trace, int levels, std::size_t smooth_len) {
  trace.validate();
  if (levels < 1) throw std::invalid_argument("denoise: levels must be >= 1");
  const int feasible = max_feasible_levels(trace.size());
  if (feasible < 1) throw std::invalid_argument("denoise: trace needs at least 2 samples");
  if (levels > feasible) {
    log::warn("denoise: " + std::to_string(trace.size()) + " samples support " +
              std::to_string(feasible) + " levels; using " + std::to_string(feasible) +
              " instead of " + std::to_string(levels));
    levels = feasible;
  }
  Trace cleaned;
  cleaned.sample_rate = trace.sample_rate;
  cleaned.meta = trace.meta;
  cleaned.samples = dwt_inverse(sure_threshold(dwt_forward(trace.samples, levels)));
  return smooth_moving_average(cleaned, smooth_len);
}

DipCount count_dips(const Trace& trace, double bin_s, double fraction) {
  trace.validate();
  const auto bin = static_cast<std::size_t>(std::llround(bin_s * trace.sample_rate));
  if (bin < 1) throw std::invalid_argument("count_dips: bin shorter than one sample");
  const std::size_t bins = trace.size() / bin;
  if (bins < 1) throw std::invalid_argument("count_dips: trace shorter than one bin");

  std::vector<double> rms(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    long double acc = 0.0L;
    for (std::size_t i = b * bin; i < (b + 1) * bin; ++i) {
      acc += static_cast<long double>(trace.samples[i]) * trace.samples[i];
    }
    rms[b] = std::sqrt(static_cast<double>(acc / bin));
  }
  std::vector<double> sorted = rms;
  std::sort(sorted.begin(), sorted.end());
  DipCount out;
  out.baseline_rms = bins % 2 == 1 ? sorted[bins / 2]
                                   : 0.5 * (sorted[bins / 2 - 1] + sorted[bins / 2]);
  if (!(out.baseline_rms > 0.0)) return out;
  out.min_ratio = sorted.front() / out.baseline_rms;

  bool in_dip = false;
  for (double r : rms) {
    const bool low = r < fraction * out.baseline_rms;
    if (low && !in_dip) ++out.events;
    in_dip = low;
  }
  return out;
}

}  // namespace rfdfar::dsp
