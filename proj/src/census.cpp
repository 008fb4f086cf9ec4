#include "wavekin/census.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace wavekin {

namespace {

void check_budget(const ModeSet& modes, const CensusBudget& budget) {
  const double pairs = static_cast<double>(modes.size()) * static_cast<double>(modes.size());
  if (pairs > budget.max_pairs) {
    std::ostringstream msg;
    msg << "census: " << pairs << " (k1, k3) pairs exceed the budget of " << budget.max_pairs;
    throw BudgetError(msg.str(), pairs);
  }
}

// Resonance magnitudes of every admissible pair, split into exact zeros and a
// sorted list of nonzero magnitudes. For rational beta the magnitudes are the
// integers |N| and `scale` converts a window half-width delta into the same
// units; otherwise they are |Omega| with scale 1.
struct PairSpectrum {
  std::int64_t exact = 0;
  std::vector<double> nonzero;  // sorted ascending
  double scale = 1.0;

  std::int64_t within(double delta) const {
    const double thr = delta * scale;
    return static_cast<std::int64_t>(std::upper_bound(nonzero.begin(), nonzero.end(), thr) - nonzero.begin());
  }
};

PairSpectrum pair_spectrum(const BoxSpec& spec, const WaveVector& k, const CensusBudget& budget) {
  const ModeSet modes(spec);
  check_budget(modes, budget);
  const auto rational = spec.rational_beta();
  PairSpectrum out;
  out.scale = rational ? static_cast<double>(rational->denominator) * spec.L * spec.L : 1.0;
  const auto n = static_cast<std::ptrdiff_t>(modes.size());
  std::int64_t exact = 0;

#pragma omp parallel reduction(+ : exact)
  {
    std::vector<double> local;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i1 = 0; i1 < n; ++i1) {
      const WaveVector& k1 = modes[static_cast<std::size_t>(i1)];
      const WaveVector a = k1 - k;
      for (std::ptrdiff_t i3 = 0; i3 < n; ++i3) {
        const WaveVector& k3 = modes[static_cast<std::size_t>(i3)];
        if (!modes.contains(k1 + k3 - k)) continue;
        const WaveVector b = k3 - k;
        if (rational) {
          const std::int64_t num = resonance_numerator(*rational, k1, k3, k);
          if (num == 0) {
            ++exact;
          } else {
            local.push_back(static_cast<double>(num < 0 ? -num : num));
          }
        } else {
          bool all_zero = true;
          for (int j = 0; j < spec.d; ++j) all_zero = all_zero && (a[j] == 0 || b[j] == 0);
          if (all_zero) {
            ++exact;
          } else {
            local.push_back(std::abs(-2.0 * a.cast<double>().cwiseProduct(b.cast<double>()).dot(spec.beta) /
                                     (spec.L * spec.L)));
          }
        }
      }
    }
#pragma omp critical
    out.nonzero.insert(out.nonzero.end(), local.begin(), local.end());
  }
  out.exact = exact;
  std::sort(out.nonzero.begin(), out.nonzero.end());
  return out;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

// Sorted |Omega| over the Halton points that land in the continuum window
// domain, plus the box volume factor.
struct VolumeSampler {
  std::vector<double> magnitudes;
  std::size_t samples = 0;
  double box_volume = 0.0;

  double volume(double delta) const {
    const auto hits = std::upper_bound(magnitudes.begin(), magnitudes.end(), delta) - magnitudes.begin();
    return box_volume * static_cast<double>(hits) / static_cast<double>(samples);
  }
};

VolumeSampler sample_window(const BoxSpec& spec, const RealVector& k, std::size_t samples) {
  static constexpr std::uint64_t kPrimes[6] = {2, 3, 5, 7, 11, 13};
  const int d = spec.d;
  const double c = spec.cutoff;
  VolumeSampler out;
  out.samples = samples;
  out.box_volume = std::pow(2.0 * c, 2 * d);
  const double c2 = c * c * (1.0 + 1e-12);
  for (std::size_t s = 0; s < samples; ++s) {
    RealVector k1 = RealVector::Zero();
    RealVector k3 = RealVector::Zero();
    for (int j = 0; j < d; ++j) {
      k1[j] = c * (2.0 * radical_inverse(s + 1, kPrimes[j]) - 1.0);
      k3[j] = c * (2.0 * radical_inverse(s + 1, kPrimes[d + j]) - 1.0);
    }
    const RealVector k2 = k1 + k3 - k;
    if (k1.squaredNorm() > c2 || k3.squaredNorm() > c2 || k2.squaredNorm() > c2) continue;
    const double om = -2.0 * (k1 - k).cwiseProduct(k3 - k).dot(spec.beta);
    out.magnitudes.push_back(std::abs(om));
  }
  std::sort(out.magnitudes.begin(), out.magnitudes.end());
  return out;
}

}  // namespace

std::int64_t count_window(const WindowQuery& q, const CensusBudget& budget) {
  if (!(q.delta >= 0.0)) throw std::invalid_argument("census: delta must be non-negative");
  const PairSpectrum ps = pair_spectrum(q.spec, q.k, budget);
  return ps.exact + ps.within(q.delta);
}

std::int64_t count_exact(const BoxSpec& spec, const WaveVector& k, const CensusBudget& budget) {
  return pair_spectrum(spec, k, budget).exact;
}

std::int64_t count_quasi(const WindowQuery& q, const CensusBudget& budget) {
  if (!(q.delta >= 0.0)) throw std::invalid_argument("census: delta must be non-negative");
  return pair_spectrum(q.spec, q.k, budget).within(q.delta);
}

std::int64_t count_admissible(const BoxSpec& spec, const WaveVector& k, const CensusBudget& budget) {
  const PairSpectrum ps = pair_spectrum(spec, k, budget);
  return ps.exact + static_cast<std::int64_t>(ps.nonzero.size());
}

double window_volume(const BoxSpec& spec, const RealVector& k, double delta, std::size_t samples) {
  return sample_window(spec, k, samples).volume(delta);
}

std::vector<CensusRow> crossover_scan(const std::vector<BoxSpec>& specs, const WaveVector& k,
                                      const std::vector<double>& times, const CrossoverOptions& options) {
  std::vector<CensusRow> rows;
  for (const BoxSpec& spec : specs) {
    const PairSpectrum ps = pair_spectrum(spec, k, options.budget);
    const VolumeSampler vs = sample_window(spec, k.cast<double>() / spec.L, options.volume_samples);
    const double lattice_factor = std::pow(spec.L, 2 * spec.d);
    for (double t : times) {
      if (!(t > 0.0)) throw std::invalid_argument("census: scan times must be positive");
      CensusRow row;
      row.beta_label = spec.beta_label;
      row.d = spec.d;
      row.L = spec.L;
      row.t = t;
      row.delta = 1.0 / t;
      row.quasi_count = ps.within(row.delta);
      row.exact_count = ps.exact;
      row.volume_prediction = lattice_factor * vs.volume(row.delta);
      rows.push_back(row);
    }
  }
  return rows;
}

double crossover_time(const std::vector<CensusRow>& rows, const std::string& beta_label, double L) {
  std::vector<const CensusRow*> sel;
  for (const auto& r : rows) {
    if (r.beta_label == beta_label && r.L == L) sel.push_back(&r);
  }
  std::sort(sel.begin(), sel.end(), [](const CensusRow* a, const CensusRow* b) { return a->t < b->t; });
  for (const CensusRow* r : sel) {
    if (r->quasi_count <= r->exact_count) return r->t;
  }
  return std::numeric_limits<double>::infinity();
}

void write_census_csv(std::ostream& os, const std::vector<CensusRow>& rows) {
  os << "beta_label,d,L,t,delta,quasi_count,exact_count,volume_prediction\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.beta_label << ',' << r.d << ',' << r.L << ',' << r.t << ',' << r.delta << ',' << r.quasi_count << ','
       << r.exact_count << ',' << r.volume_prediction << '\n';
  }
}

}  // namespace wavekin
