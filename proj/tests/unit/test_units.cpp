#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <random>

#include "rfdfar/errors.hpp"
#include "rfdfar/units.hpp"

using namespace rfdfar;

namespace {

bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("dbm_to_mw known points") {
  CHECK(dbm_to_mw(PowerDbm(0)).value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_mw(PowerDbm(10)).value() == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(dbm_to_mw(PowerDbm(-30)).value() == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(dbm_to_mw(PowerDbm(-200)).value() > 0.0);
}

TEST_CASE("non-finite power levels are rejected") {
  CHECK_THROWS_AS(PowerDbm(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(PowerDbm(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(PowerMw(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SnrDb(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(SnrDb(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("mw_to_dbm known points and domain") {
  CHECK(mw_to_dbm(PowerMw(1)).value() == 0.0);
  CHECK(mw_to_dbm(PowerMw(100)).value() == doctest::Approx(20.0).epsilon(1e-15));
  CHECK_THROWS_AS(mw_to_dbm(PowerMw(0)), std::domain_error);
}

TEST_CASE("dBm round trip at the listed levels") {
  for (double x : {-90.0, -40.0, 0.0, 25.0}) {
    CHECK(rel_close(mw_to_dbm(dbm_to_mw(PowerDbm(x))).value(), x));
  }
}

TEST_CASE("property: dBm round trip on random levels") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-150.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    REQUIRE(rel_close(mw_to_dbm(dbm_to_mw(PowerDbm(x))).value(), x));
  }
}

TEST_CASE("snr_from_dbm is a difference") {
  CHECK(snr_from_dbm(PowerDbm(-40), PowerDbm(-82)).value() == 42.0);
  CHECK(snr_from_dbm(PowerDbm(-17.5), PowerDbm(-17.5)).value() == 0.0);
  CHECK(snr_from_dbm(PowerDbm(-30), PowerDbm(-89)).value() == 59.0);
}

TEST_CASE("signal_mw_from_total") {
  CHECK(signal_mw_from_total(PowerMw(2), PowerMw(1)).value() == 1.0);
  CHECK(signal_mw_from_total(PowerMw(3.25), PowerMw(0)).value() == 3.25);
  CHECK(signal_mw_from_total(PowerMw(1), PowerMw(1)).value() == 0.0);
  CHECK_THROWS_AS(signal_mw_from_total(PowerMw(1), PowerMw(2)), InconsistentMeasurement);
}

TEST_CASE("snr_from_mw known points and domain") {
  CHECK(snr_from_mw(PowerMw(1000), PowerMw(1)).value() == doctest::Approx(30.0).epsilon(1e-15));
  CHECK(snr_from_mw(PowerMw(0.37), PowerMw(0.37)).value() == 0.0);
  CHECK(snr_from_mw(PowerMw(10), PowerMw(0.1)).value() == doctest::Approx(20.0).epsilon(1e-15));
  CHECK_THROWS_AS(snr_from_mw(PowerMw(0), PowerMw(1)), std::domain_error);
  CHECK_THROWS_AS(snr_from_mw(PowerMw(1), PowerMw(0)), std::domain_error);
}

TEST_CASE("property: mW and dBm SNR paths agree and are monotone") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> e(-12.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = std::pow(10.0, e(rng));
    const double n = std::pow(10.0, e(rng));
    const double via_mw = snr_from_mw(PowerMw(s), PowerMw(n)).value();
    const double via_dbm =
        snr_from_dbm(mw_to_dbm(PowerMw(s)), mw_to_dbm(PowerMw(n))).value();
    REQUIRE(std::abs(via_mw - via_dbm) < 1e-9);
    REQUIRE(snr_from_mw(PowerMw(s * 1.001), PowerMw(n)).value() > via_mw);
    REQUIRE(snr_from_mw(PowerMw(s), PowerMw(n * 1.001)).value() < via_mw);
  }
}

TEST_CASE("noise_mw_for_target_snr") {
  CHECK(noise_mw_for_target_snr(PowerMw(1), SnrDb(0)).value() == 1.0);
  CHECK(noise_mw_for_target_snr(PowerMw(1), SnrDb(30)).value() ==
        doctest::Approx(0.001).epsilon(1e-15));
  CHECK_THROWS_AS(noise_mw_for_target_snr(PowerMw(0), SnrDb(3)), std::domain_error);
  CHECK(noise_mw_for_target_snr(PowerMw(2), SnrDb::noiseless()).value() == 0.0);
}

TEST_CASE("noise_mw_for_target_snr inverts snr_from_mw on the modelled grid") {
  for (double target : {59.0, 42.0, 22.0, 12.0, 2.0, 0.0}) {
    for (double signal : {1e-9, 0.5, 1.0, 123.0}) {
      const auto noise = noise_mw_for_target_snr(PowerMw(signal), SnrDb(target));
      CHECK(std::abs(snr_from_mw(PowerMw(signal), noise).value() - target) < 1e-9);
    }
  }
}

TEST_CASE("noiseless sentinel") {
  const auto s = SnrDb::noiseless();
  CHECK(s.is_noiseless());
  CHECK(std::isinf(s.value()));
  CHECK_FALSE(SnrDb(100).is_noiseless());
}
