#pragma once

// Power and SNR quantities with explicit units. Decibel and linear values
// are distinct types so they cannot be mixed by accident.

namespace rfdfar {

/// Absolute power in decibel-milliwatts. Any finite value.
class PowerDbm {
 public:
  explicit PowerDbm(double dbm);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Absolute power in milliwatts. Finite and non-negative.
class PowerMw {
 public:
  explicit PowerMw(double mw);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Signal-to-noise ratio in decibels.
///
/// Finite, except for `SnrDb::noiseless()` (+infinity), which the channel
/// treats as "inject no noise".
class SnrDb {
 public:
  explicit SnrDb(double db);
  static SnrDb noiseless() noexcept;

  double value() const noexcept { return value_; }
  bool is_noiseless() const noexcept;

  friend bool operator==(SnrDb a, SnrDb b) noexcept { return a.value_ == b.value_; }

 private:
  struct Unchecked {};
  SnrDb(double db, Unchecked) noexcept : value_(db) {}
  double value_;
};

PowerMw dbm_to_mw(PowerDbm p);
PowerDbm mw_to_dbm(PowerMw p);

/// Difference of two absolute levels.
SnrDb snr_from_dbm(PowerDbm signal, PowerDbm noise);

/// Signal share of a combined measurement: total - noise.
PowerMw signal_mw_from_total(PowerMw total, PowerMw noise);

SnrDb snr_from_mw(PowerMw signal, PowerMw noise);

/// Noise power that puts `signal` at exactly `target` SNR. Returns 0 mW for
/// the noiseless sentinel.
PowerMw noise_mw_for_target_snr(PowerMw signal, SnrDb target);

}  // namespace rfdfar
