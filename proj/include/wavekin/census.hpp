#ifndef WAVEKIN_CENSUS_HPP
#define WAVEKIN_CENSUS_HPP

#include "wavekin/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wavekin {

/// Lattice triples (k1, k2, k3) with k1 - k2 + k3 = k and |Omega| <= delta.
/// delta = 0 selects exact resonances.
struct WindowQuery {
  BoxSpec spec;
  WaveVector k = WaveVector::Zero();
  double delta = 0.0;
};

struct CensusBudget {
  double max_pairs = 4.0e8;
};

std::int64_t count_window(const WindowQuery& q, const CensusBudget& budget = {});

/// Pairs with Omega exactly zero. Rational beta uses integer arithmetic;
/// otherwise beta is taken to be rationally independent and the count is of
/// pairs with (k1-k)^j (k3-k)^j = 0 in every coordinate.
std::int64_t count_exact(const BoxSpec& spec, const WaveVector& k, const CensusBudget& budget = {});

/// Pairs with 0 < |Omega| <= delta.
std::int64_t count_quasi(const WindowQuery& q, const CensusBudget& budget = {});

/// Total number of momentum-admissible pairs (k1, k3) with k2 in the mode set.
std::int64_t count_admissible(const BoxSpec& spec, const WaveVector& k, const CensusBudget& budget = {});

/// Continuum volume of the window in R^{2d}: {(k1, k3) : |k1|, |k3|, |k2| <=
/// cutoff, |Omega| <= delta} at the real output wave number k, by quasi Monte
/// Carlo (Halton points).
double window_volume(const BoxSpec& spec, const RealVector& k, double delta,
                     std::size_t samples = 1'000'000);

struct CensusRow {
  std::string beta_label;
  int d = 0;
  double L = 0.0;
  double t = 0.0;
  double delta = 0.0;
  std::int64_t quasi_count = 0;
  std::int64_t exact_count = 0;
  double volume_prediction = 0.0;  ///< L^{2d} * Vol(W_delta)
};

struct CrossoverOptions {
  CensusBudget budget;
  std::size_t volume_samples = 1'000'000;
};

/// One row per (spec, t) with delta = 1/t. k is given in lattice units of each
/// spec (k = 0 is the usual choice).
std::vector<CensusRow> crossover_scan(const std::vector<BoxSpec>& specs, const WaveVector& k,
                                      const std::vector<double>& times,
                                      const CrossoverOptions& options = {});

/// First time (in the scanned list) at which the quasi count no longer exceeds
/// the exact count, for the rows of one beta label and one L. Returns +inf when
/// the quasi count dominates over the whole scan.
double crossover_time(const std::vector<CensusRow>& rows, const std::string& beta_label, double L);

void write_census_csv(std::ostream& os, const std::vector<CensusRow>& rows);

}  // namespace wavekin

#endif  // WAVEKIN_CENSUS_HPP
