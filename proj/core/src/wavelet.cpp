#include "rfdfar/wavelet.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfdfar/errors.hpp"

namespace rfdfar::dsp {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kMadToSigma = 0.6745;

std::size_t pow2(int levels) { return std::size_t{1} << levels; }

// LSD radix sort on the IEEE bit patterns; for non-negative doubles the
// unsigned order of the bits is the numeric order.
void sort_nonnegative(std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 4096) {
    std::sort(v.begin(), v.end());
    return;
  }
  std::vector<std::uint64_t> keys(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = std::bit_cast<std::uint64_t>(v[i]);
  std::vector<std::size_t> count(1u << 16);
  for (int shift = 0; shift < 64; shift += 16) {
    std::fill(count.begin(), count.end(), 0);
    for (auto k : keys) ++count[(k >> shift) & 0xffff];
    if (count[(keys[0] >> shift) & 0xffff] == n) continue;
    std::size_t sum = 0;
    for (auto& c : count) {
      const auto here = c;
      c = sum;
      sum += here;
    }
    for (auto k : keys) tmp[count[(k >> shift) & 0xffff]++] = k;
    keys.swap(tmp);
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<double>(keys[i]);
}

}  // namespace

std::size_t WaveletDecomposition::padded_length() const noexcept {
  return levels > 0 ? approximation.size() * pow2(levels) : 0;
}

std::size_t WaveletDecomposition::coefficient_count() const noexcept {
  std::size_t n = approximation.size();
  for (const auto& d : details) n += d.size();
  return n;
}

void WaveletDecomposition::validate() const {
  if (levels < 1 || levels > 62) throw CorruptDecomposition("decomposition: levels out of range");
  if (details.size() != static_cast<std::size_t>(levels)) {
    throw CorruptDecomposition("decomposition: expected " + std::to_string(levels) +
                               " detail levels, found " + std::to_string(details.size()));
  }
  if (approximation.empty()) throw CorruptDecomposition("decomposition: empty approximation");
  for (int j = 0; j < levels; ++j) {
    std::size_t expected = approximation.size() * pow2(levels - j - 1);
    if (details[static_cast<std::size_t>(j)].size() != expected) {
      throw CorruptDecomposition("decomposition: level " + std::to_string(j + 1) + " has " +
                                 std::to_string(details[static_cast<std::size_t>(j)].size()) +
                                 " coefficients, expected " + std::to_string(expected));
    }
  }
  const std::size_t padded = padded_length();
  if (original_length == 0 || original_length > padded || padded - original_length >= pow2(levels)) {
    throw CorruptDecomposition("decomposition: original_length inconsistent with padding");
  }
}

int max_feasible_levels(std::size_t n) noexcept {
  int levels = 0;
  while (levels < 62 && (std::size_t{1} << (levels + 1)) <= n) ++levels;
  return levels;
}

WaveletDecomposition dwt_forward(std::span<const double> signal, int levels, Wavelet) {
  if (levels < 1) throw std::invalid_argument("dwt_forward: levels must be >= 1");
  const int feasible = max_feasible_levels(signal.size());
  if (levels > feasible) {
    throw std::invalid_argument("dwt_forward: " + std::to_string(signal.size()) +
                                " samples support at most " + std::to_string(feasible) +
                                " levels, requested " + std::to_string(levels));
  }
  const std::size_t block = pow2(levels);
  const std::size_t padded = (signal.size() + block - 1) / block * block;

  WaveletDecomposition out;
  out.levels = levels;
  out.original_length = signal.size();
  out.details.resize(static_cast<std::size_t>(levels));

  std::vector<double> approx(padded, 0.0);
  std::copy(signal.begin(), signal.end(), approx.begin());
  std::size_t len = padded;
  for (int j = 0; j < levels; ++j) {
    const std::size_t half = len / 2;
    auto& d = out.details[static_cast<std::size_t>(j)];
    d.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double even = approx[2 * k];
      const double odd = approx[2 * k + 1];
      d[k] = (even - odd) * kInvSqrt2;
      approx[k] = (even + odd) * kInvSqrt2;
    }
    len = half;
  }
  approx.resize(len);
  out.approximation = std::move(approx);
  return out;
}

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp) {
  decomp.validate();
  std::vector<double> signal(decomp.padded_length());
  std::copy(decomp.approximation.begin(), decomp.approximation.end(), signal.begin());
  std::size_t len = decomp.approximation.size();
  std::vector<double> scratch(len);
  for (int j = decomp.levels - 1; j >= 0; --j) {
    const auto& d = decomp.details[static_cast<std::size_t>(j)];
    scratch.assign(signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(len));
    for (std::size_t k = 0; k < len; ++k) {
      signal[2 * k] = (scratch[k] + d[k]) * kInvSqrt2;
      signal[2 * k + 1] = (scratch[k] - d[k]) * kInvSqrt2;
    }
    len *= 2;
  }
  signal.resize(decomp.original_length);
  return signal;
}

double soft_threshold(double c, double t) noexcept {
  const double mag = std::abs(c) - t;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, c);
}

LevelThreshold sure_level_threshold(std::span<const double> details) {
  LevelThreshold out;
  const std::size_t n = details.size();
  if (n == 0) return out;

  std::vector<double> mag(n);
  std::transform(details.begin(), details.end(), mag.begin(), [](double c) { return std::abs(c); });
  auto mid = mag.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(mag.begin(), mid, mag.end());
  double median = *mid;
  if (n % 2 == 0) median = 0.5 * (median + *std::max_element(mag.begin(), mid));
  out.noise_scale = median / kMadToSigma;
  if (!(out.noise_scale > 0.0)) return out;

  // SURE(t) = n - 2 #{|y| <= t} + sum min(y^2, t^2) on y = d / sigma. Between
  // sorted magnitudes it increases with t, so the minimum sits at 0 or at a
  // data point.
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = mag[i] / out.noise_scale;
    sq[i] = y * y;
  }
  sort_nonnegative(sq);
  const double bound = 2.0 * std::log(static_cast<double>(n));
  const double dn = static_cast<double>(n);
  double best_risk = dn;  // t = 0
  double best_sq = 0.0;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < n && sq[k] <= bound; ++k) {
    cumulative += sq[k];
    const double kept = static_cast<double>(n - k - 1);
    const double risk = dn - 2.0 * static_cast<double>(k + 1) + cumulative + kept * sq[k];
    if (risk < best_risk) {
      best_risk = risk;
      best_sq = sq[k];
    }
  }
  out.threshold = std::sqrt(best_sq) * out.noise_scale;
  return out;
}

std::vector<LevelThreshold> sure_thresholds(const WaveletDecomposition& decomp) {
  decomp.validate();
  std::vector<LevelThreshold> out;
  out.reserve(decomp.details.size());
  for (const auto& d : decomp.details) out.push_back(sure_level_threshold(d));
  return out;
}

WaveletDecomposition sure_threshold(const WaveletDecomposition& decomp) {
  const auto thresholds = sure_thresholds(decomp);
  WaveletDecomposition out = decomp;
  for (std::size_t j = 0; j < out.details.size(); ++j) {
    const double t = thresholds[j].threshold;
    if (t <= 0.0) continue;
    for (double& c : out.details[j]) c = soft_threshold(c, t);
  }
  return out;
}

}  // namespace rfdfar::dsp
