#include "rfdfar/units.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rfdfar/errors.hpp"

namespace rfdfar {

PowerDbm::PowerDbm(double dbm) : value_(dbm) {
  if (!std::isfinite(dbm)) {
    throw std::invalid_argument("PowerDbm: value must be finite");
  }
}

PowerMw::PowerMw(double mw) : value_(mw) {
  if (!std::isfinite(mw) || mw < 0.0) {
    throw std::invalid_argument("PowerMw: value must be finite and >= 0, got " +
                                std::to_string(mw));
  }
}

SnrDb::SnrDb(double db) : value_(db) {
  if (!std::isfinite(db)) {
    throw std::invalid_argument("SnrDb: value must be finite (use SnrDb::noiseless())");
  }
}

SnrDb SnrDb::noiseless() noexcept {
  return SnrDb(std::numeric_limits<double>::infinity(), Unchecked{});
}

bool SnrDb::is_noiseless() const noexcept { return std::isinf(value_); }

PowerMw dbm_to_mw(PowerDbm p) { return PowerMw(std::pow(10.0, p.value() / 10.0)); }

PowerDbm mw_to_dbm(PowerMw p) {
  if (p.value() <= 0.0) {
    throw std::domain_error("mw_to_dbm: power must be > 0 mW");
  }
  return PowerDbm(10.0 * std::log10(p.value()));
}

SnrDb snr_from_dbm(PowerDbm signal, PowerDbm noise) {
  return SnrDb(signal.value() - noise.value());
}

PowerMw signal_mw_from_total(PowerMw total, PowerMw noise) {
  if (total.value() < noise.value()) {
    throw InconsistentMeasurement("signal_mw_from_total: total power " +
                                  std::to_string(total.value()) +
                                  " mW is below noise power " +
                                  std::to_string(noise.value()) + " mW");
  }
  return PowerMw(total.value() - noise.value());
}

SnrDb snr_from_mw(PowerMw signal, PowerMw noise) {
  if (signal.value() <= 0.0 || noise.value() <= 0.0) {
    throw std::domain_error("snr_from_mw: signal and noise must be > 0 mW");
  }
  return SnrDb(10.0 * std::log10(signal.value() / noise.value()));
}

PowerMw noise_mw_for_target_snr(PowerMw signal, SnrDb target) {
  if (signal.value() <= 0.0) {
    throw std::domain_error("noise_mw_for_target_snr: signal must be > 0 mW");
  }
  if (target.is_noiseless()) return PowerMw(0.0);
  return PowerMw(signal.value() / std::pow(10.0, target.value() / 10.0));
}

}  // namespace rfdfar
