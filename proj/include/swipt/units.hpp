#pragma once

#include <cmath>
#include <stdexcept>

namespace swipt {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) {
  if (!(watt > 0.0)) {
    throw std::domain_error("watt_to_dbm: power must be positive");
  }
  return 10.0 * std::log10(watt) + 30.0;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("linear_to_db: ratio must be positive");
  }
  return 10.0 * std::log10(x);
}

}  // namespace swipt
