#ifndef WAVEKIN_FIELDS_HPP
#define WAVEKIN_FIELDS_HPP

#include "wavekin/lattice.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace wavekin {

using Complex = std::complex<double>;

enum class SpectrumKind { gaussian_bump, plateau, custom_table };

/// Initial spectrum n_in. Built-in families are radial about `center`:
///   gaussian_bump  a exp(-|k-c|^2 / w^2)
///   plateau        a / (1 + (|k-c| / w)^8)
/// custom_table interpolates value against |k-c| piecewise linearly and
/// rejects queries beyond the last node.
struct SpectrumFamily {
  SpectrumKind kind = SpectrumKind::gaussian_bump;
  double amplitude = 1.0;
  double width = 1.0;
  RealVector center = RealVector::Zero();
  std::vector<std::pair<double, double>> table;

  void validate() const;
  double operator()(const RealVector& k) const;
};

SpectrumFamily gaussian_bump(double amplitude, double width);
SpectrumFamily plateau(double amplitude, double width);
SpectrumFamily custom_table(std::vector<std::pair<double, double>> table);

std::string to_string(SpectrumKind kind);
SpectrumKind parse_spectrum_kind(const std::string& name);

double spectrum_eval(const SpectrumFamily& f, const RealVector& k);
double spectrum_eval(const SpectrumFamily& f, const BoxSpec& spec, const WaveVector& m);

/// n_in on every mode of the set.
Eigen::VectorXd spectrum_on(const SpectrumFamily& f, const ModeSet& modes);

enum class NoiseLaw { gaussian, uniform_phase };

std::string to_string(NoiseLaw law);
NoiseLaw parse_noise_law(const std::string& name);

/// One draw of eta for mode `index` of the stream `seed`.
Complex sample_noise(NoiseLaw law, std::uint64_t seed, std::uint64_t index);

/// Amplitudes A_k index-aligned with a shared mode set, stamped with time t.
struct WaveField {
  std::shared_ptr<const ModeSet> modes;
  Eigen::VectorXcd amplitudes;
  double t = 0.0;

  const BoxSpec& spec() const { return modes->spec(); }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes.size()); }
  bool finite() const { return amplitudes.allFinite(); }
};

WaveField zero_field(std::shared_ptr<const ModeSet> modes);

/// A_k = sqrt(n_in(k)) eta_k. Bit-identical for a given (modes, f, law, seed).
WaveField sample_field(std::shared_ptr<const ModeSet> modes, const SpectrumFamily& f, NoiseLaw law,
                       std::uint64_t seed);

/// Same draw, with n_in already evaluated on the mode set.
void sample_amplitudes(const Eigen::VectorXd& n_in, NoiseLaw law, std::uint64_t seed,
                       Eigen::VectorXcd& out);

/// Binary record: magic "WKFIELD1", int32 d, doubles L, beta[3], cutoff,
/// gamma, t, uint64 count, then count (re, im) pairs. Little-endian, 64-bit
/// floats.
void write_field_record(std::ostream& os, const WaveField& field);
WaveField read_field_record(std::istream& is);

}  // namespace wavekin

#endif  // WAVEKIN_FIELDS_HPP
