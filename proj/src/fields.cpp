#include "wavekin/fields.hpp"

#include "wavekin/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace wavekin {

static_assert(std::endian::native == std::endian::little, "field records assume a little-endian host");

void SpectrumFamily::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("spectrum: amplitude must be >= 0");
  if (kind == SpectrumKind::custom_table) {
    if (table.size() < 2) throw std::invalid_argument("spectrum: custom table needs at least two nodes");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].second < 0.0) throw std::invalid_argument("spectrum: custom table values must be >= 0");
      if (i > 0 && !(table[i].first > table[i - 1].first))
        throw std::invalid_argument("spectrum: custom table radii must increase");
    }
    if (table.front().first > 0.0) throw std::invalid_argument("spectrum: custom table must start at radius 0");
  } else if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("spectrum: width must be > 0");
  }
}

double SpectrumFamily::operator()(const RealVector& k) const {
  const double r = (k - center).norm();
  switch (kind) {
    case SpectrumKind::gaussian_bump:
      return amplitude * std::exp(-(r * r) / (width * width));
    case SpectrumKind::plateau: {
      const double s = r / width;
      const double s2 = s * s;
      return amplitude / (1.0 + s2 * s2 * s2 * s2);
    }
    case SpectrumKind::custom_table: {
      if (r > table.back().first) throw std::out_of_range("spectrum: query outside the custom table");
      auto hi = std::lower_bound(table.begin(), table.end(), r,
                                 [](const std::pair<double, double>& node, double x) { return node.first < x; });
      if (hi == table.begin()) return hi->second;
      auto lo = hi - 1;
      const double f = (r - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return 0.0;
}

SpectrumFamily gaussian_bump(double amplitude, double width) {
  SpectrumFamily f;
  f.kind = SpectrumKind::gaussian_bump;
  f.amplitude = amplitude;
  f.width = width;
  f.validate();
  return f;
}

SpectrumFamily plateau(double amplitude, double width) {
  SpectrumFamily f = gaussian_bump(amplitude, width);
  f.kind = SpectrumKind::plateau;
  return f;
}

SpectrumFamily custom_table(std::vector<std::pair<double, double>> table) {
  SpectrumFamily f;
  f.kind = SpectrumKind::custom_table;
  f.table = std::move(table);
  f.amplitude = 0.0;
  for (const auto& node : f.table) f.amplitude = std::max(f.amplitude, node.second);
  f.validate();
  return f;
}

std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::gaussian_bump: return "gaussian_bump";
    case SpectrumKind::plateau: return "plateau";
    case SpectrumKind::custom_table: return "custom_table";
  }
  return "?";
}

SpectrumKind parse_spectrum_kind(const std::string& name) {
  if (name == "gaussian_bump") return SpectrumKind::gaussian_bump;
  if (name == "plateau") return SpectrumKind::plateau;
  if (name == "custom_table") return SpectrumKind::custom_table;
  throw std::invalid_argument("unknown spectrum family '" + name + "'");
}

double spectrum_eval(const SpectrumFamily& f, const RealVector& k) { return f(k); }

double spectrum_eval(const SpectrumFamily& f, const BoxSpec& spec, const WaveVector& m) {
  return f(m.cast<double>() / spec.L);
}

Eigen::VectorXd spectrum_on(const SpectrumFamily& f, const ModeSet& modes) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) out[static_cast<Eigen::Index>(i)] = f(modes.wave_number(i));
  return out;
}

std::string to_string(NoiseLaw law) { return law == NoiseLaw::gaussian ? "gaussian" : "uniform_phase"; }

NoiseLaw parse_noise_law(const std::string& name) {
  if (name == "gaussian") return NoiseLaw::gaussian;
  if (name == "uniform_phase") return NoiseLaw::uniform_phase;
  throw std::invalid_argument("unknown noise law '" + name + "'");
}

Complex sample_noise(NoiseLaw law, std::uint64_t seed, std::uint64_t index) {
  CounterStream s(seed, index);
  const double u1 = s.next_open01();
  const double u2 = s.next_open01();
  const double phase = 2.0 * std::numbers::pi * u2;
  // Box-Muller in polar form: (g1 + i g2) / sqrt 2 has modulus sqrt(-ln u1).
  const double r = law == NoiseLaw::gaussian ? std::sqrt(-std::log(u1)) : 1.0;
  return std::polar(r, phase);
}

WaveField zero_field(std::shared_ptr<const ModeSet> modes) {
  WaveField f;
  f.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(modes->size()));
  f.modes = std::move(modes);
  return f;
}

void sample_amplitudes(const Eigen::VectorXd& n_in, NoiseLaw law, std::uint64_t seed, Eigen::VectorXcd& out) {
  out.resize(n_in.size());
  for (Eigen::Index i = 0; i < n_in.size(); ++i) {
    out[i] = std::sqrt(n_in[i]) * sample_noise(law, seed, static_cast<std::uint64_t>(i));
  }
}

WaveField sample_field(std::shared_ptr<const ModeSet> modes, const SpectrumFamily& f, NoiseLaw law,
                       std::uint64_t seed) {
  WaveField out;
  sample_amplitudes(spectrum_on(f, *modes), law, seed, out.amplitudes);
  out.modes = std::move(modes);
  return out;
}

namespace {

constexpr char kMagic[8] = {'W', 'K', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("field record: truncated input");
  return v;
}

}  // namespace

void write_field_record(std::ostream& os, const WaveField& field) {
  const BoxSpec& s = field.spec();
  os.write(kMagic, sizeof kMagic);
  put<std::int32_t>(os, s.d);
  put<double>(os, s.L);
  for (int j = 0; j < 3; ++j) put<double>(os, s.beta[j]);
  put<double>(os, s.cutoff);
  put<double>(os, s.gamma);
  put<double>(os, field.t);
  put<std::uint64_t>(os, field.size());
  for (Eigen::Index i = 0; i < field.amplitudes.size(); ++i) {
    put<double>(os, field.amplitudes[i].real());
    put<double>(os, field.amplitudes[i].imag());
  }
  if (!os) throw std::runtime_error("field record: write failed");
}

WaveField read_field_record(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("field record: bad magic");
  const int d = get<std::int32_t>(is);
  const double L = get<double>(is);
  std::vector<double> beta(3);
  for (auto& b : beta) b = get<double>(is);
  const double cutoff = get<double>(is);
  const double gamma = get<double>(is);
  const double t = get<double>(is);
  const auto count = get<std::uint64_t>(is);
  beta.resize(static_cast<std::size_t>(std::clamp(d, 1, 3)));
  auto modes = build_lattice(make_box(d, L, cutoff, gamma, beta));
  if (count != modes->size()) throw std::runtime_error("field record: amplitude count does not match the box");
  WaveField f = zero_field(modes);
  f.t = t;
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    f.amplitudes[static_cast<Eigen::Index>(i)] = Complex(re, im);
  }
  return f;
}

}  // namespace wavekin
