#pragma once

// Seeded channel realizations: TGn-style dual-slope path loss, Rician fading
// drawn directly in the frequency domain, fixed (optionally lognormal) shadowing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "swipt/model.hpp"
#include "swipt/units.hpp"

namespace swipt {

inline constexpr double kSpeedOfLight = 299792458.0;

struct ChannelGenConfig {
  double rician_k_db = 6.0;
  double distance_m = 10.0;
  double carrier_freq_hz = 470e6;
  double shadowing_linear = 1.0;
  /// Lognormal spread around shadowing_linear; 0 keeps shadowing deterministic.
  double shadowing_sigma_db = 0.0;
  double breakpoint_m = 5.0;
  double pathloss_exponent_after_breakpoint = 3.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(distance_m > 0.0)) throw std::invalid_argument("ChannelGenConfig: distance_m must be > 0");
    if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("ChannelGenConfig: carrier_freq_hz must be > 0");
    if (!(breakpoint_m > 0.0)) throw std::invalid_argument("ChannelGenConfig: breakpoint_m must be > 0");
    if (!(shadowing_linear > 0.0)) throw std::invalid_argument("ChannelGenConfig: shadowing_linear must be > 0");
    if (shadowing_sigma_db < 0.0) throw std::invalid_argument("ChannelGenConfig: shadowing_sigma_db must be >= 0");
  }
};

inline double free_space_path_loss_db(double freq_hz, double d_m) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * d_m * freq_hz / kSpeedOfLight);
}

/// Path loss in dB: free space up to the breakpoint, then the configured exponent.
inline double tgn_path_loss_db(double freq_hz, double d_m, const ChannelGenConfig& cfg) {
  if (!(d_m > 0.0)) throw std::domain_error("tgn_path_loss: distance must be > 0");
  if (d_m <= cfg.breakpoint_m) return free_space_path_loss_db(freq_hz, d_m);
  return free_space_path_loss_db(freq_hz, cfg.breakpoint_m) +
         10.0 * cfg.pathloss_exponent_after_breakpoint * std::log10(d_m / cfg.breakpoint_m);
}

/// Linear attenuation l, clamped to at most 1 for very short links.
inline double tgn_path_loss(double freq_hz, double d_m, const ChannelGenConfig& cfg) {
  return std::min(1.0, std::pow(10.0, -tgn_path_loss_db(freq_hz, d_m, cfg) / 10.0));
}

namespace detail {

// Bit-level conversions so a seed reproduces the same doubles on any
// standard library (std::normal_distribution is implementation-defined).
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

struct ComplexSample {
  double re;
  double im;
};

/// Circularly-symmetric complex Gaussian with E|s|^2 = 1.
inline ComplexSample complex_gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  const double u2 = unit_uniform(rng);
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline double standard_normal(std::mt19937_64& rng) {
  const ComplexSample s = complex_gaussian(rng);
  return s.re * std::numbers::sqrt2;
}

}  // namespace detail

/// |H_i|^2 for n independent Rician subcarriers with unit mean power.
inline std::vector<double> sample_rician_power(double k_linear, std::size_t n, std::mt19937_64& rng) {
  if (!(k_linear >= 0.0)) throw std::domain_error("sample_rician_power: K must be >= 0");
  std::vector<double> out(n);
  if (std::isinf(k_linear)) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  const double los = std::sqrt(k_linear / (k_linear + 1.0));
  const double scatter = std::sqrt(1.0 / (k_linear + 1.0));
  for (auto& h : out) {
    const auto s = detail::complex_gaussian(rng);
    const double re = los + scatter * s.re;
    const double im = scatter * s.im;
    h = re * re + im * im;
    // a zero draw has probability ~0 but would break the positivity invariant
    if (h <= 0.0) h = std::numeric_limits<double>::min();
  }
  return out;
}

inline ChannelRealization generate_channel(const SystemParams& params, const ChannelGenConfig& cfg,
                                           std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ChannelRealization ch;
  ch.seed = seed;
  ch.path_loss = tgn_path_loss(cfg.carrier_freq_hz, cfg.distance_m, cfg);
  ch.fading_power = sample_rician_power(db_to_linear(cfg.rician_k_db), params.n_subcarriers, rng);
  ch.shadowing = cfg.shadowing_linear;
  if (cfg.shadowing_sigma_db > 0.0) {
    ch.shadowing *= db_to_linear(cfg.shadowing_sigma_db * detail::standard_normal(rng));
  }
  return ch;
}

/// Channel settings that mirror the scenario fields of SystemParams.
inline ChannelGenConfig channel_config_from(const SystemParams& params) {
  ChannelGenConfig cfg;
  cfg.carrier_freq_hz = params.carrier_freq;
  cfg.distance_m = params.distance;
  cfg.rician_k_db = params.rician_k > 0.0 ? linear_to_db(params.rician_k)
                                          : -std::numeric_limits<double>::infinity();
  return cfg;
}

}  // namespace swipt
