#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smr/types.hpp"

namespace smr::test {

struct Cell {
  const char* stratum;
  double count;
  std::optional<double> rate;
};

inline StratumTable table(const char* hospital, std::initializer_list<Cell> cells) {
  std::map<StratumId, StratumCell> out;
  for (const auto& c : cells) out.emplace(StratumId(c.stratum), StratumCell{c.count, c.rate});
  return StratumTable(HospitalId(hospital), std::move(out));
}

inline ExternalStandard standard(std::initializer_list<std::pair<const char*, double>> rates) {
  std::map<StratumId, double> out;
  for (const auto& [s, r] : rates) out.emplace(StratumId(s), r);
  return ExternalStandard(std::move(out));
}

inline HospitalId H(const char* id) { return HospitalId(id); }
inline StratumId S(const char* id) { return StratumId(id); }

/// Random valid configuration for property tests. Every hospital populates
/// at least two strata; rates and standard stay inside [0.01, 0.5].
struct RandomConfig {
  Cohort cohort;
  ExternalStandard standard;
  std::vector<StratumId> strata;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }

  RandomConfig config(std::size_t min_hospitals = 2, bool full = false) {
    RandomConfig out;
    const std::size_t strata = 2 + index(5);
    const std::size_t hospitals = min_hospitals + index(3);
    for (std::size_t s = 0; s < strata; ++s) out.strata.emplace_back(std::to_string(s + 1));
    std::vector<StratumTable> tables;
    for (std::size_t h = 0; h < hospitals; ++h) {
      std::map<StratumId, StratumCell> cells;
      std::size_t populated = 0;
      while (populated < 2) {
        cells.clear();
        populated = 0;
        for (const auto& s : out.strata) {
          if (full || coin(0.75)) {
            cells.emplace(s, StratumCell{log_uniform(1.0, 1000.0), uniform(0.01, 0.5)});
            ++populated;
          } else {
            cells.emplace(s, StratumCell{0.0, std::nullopt});
          }
        }
      }
      tables.emplace_back(HospitalId("H" + std::to_string(h + 1)), std::move(cells));
    }
    out.cohort = Cohort(std::move(tables));
    std::map<StratumId, double> rates;
    for (const auto& s : out.strata) rates.emplace(s, uniform(0.01, 0.5));
    out.standard = ExternalStandard(std::move(rates));
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<StratumId> populated(const StratumTable& t) {
  std::vector<StratumId> out;
  for (const auto& [s, c] : t.cells()) {
    if (c.count > 0.0) out.push_back(s);
  }
  return out;
}

}  // namespace smr::test
