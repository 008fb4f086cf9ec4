#include "wavekin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wavekin {

namespace {

constexpr std::int64_t kMaxBetaDenominator = 1000;

// Smallest denominator q <= kMaxBetaDenominator with |x - p/q| tiny.
std::optional<std::pair<std::int64_t, std::int64_t>> small_rational(double x) {
  for (std::int64_t q = 1; q <= kMaxBetaDenominator; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::abs(x - p / static_cast<double>(q)) <= 1e-12 * std::max(1.0, std::abs(x))) {
      return std::make_pair(static_cast<std::int64_t>(p), q);
    }
  }
  return std::nullopt;
}

}  // namespace

double BoxSpec::epsilon() const {
  if (coupling) return *coupling;
  if (std::isinf(gamma)) return 0.0;
  return std::pow(L, -gamma);
}

double BoxSpec::t_kin() const {
  if (std::isinf(gamma)) return std::numeric_limits<double>::infinity();
  return std::pow(L, 2.0 * gamma);
}

double BoxSpec::kinetic_rate() const {
  if (!coupling) return 1.0;
  const double e = *coupling;
  return e * e * t_kin();
}

std::optional<RationalBeta> BoxSpec::rational_beta() const {
  RationalBeta out;
  std::int64_t lcm = 1;
  std::array<std::pair<std::int64_t, std::int64_t>, 3> parts{};
  for (int j = 0; j < d; ++j) {
    auto r = small_rational(beta[j]);
    if (!r) return std::nullopt;
    parts[j] = *r;
    lcm = std::lcm(lcm, r->second);
  }
  out.denominator = lcm;
  for (int j = 0; j < d; ++j) out.numerator[j] = parts[j].first * (lcm / parts[j].second);
  return out;
}

void BoxSpec::validate() const {
  if (d < 1 || d > 3) throw std::invalid_argument("box: dimension d must be 1, 2 or 3");
  if (!(L >= 1.0) || !std::isfinite(L)) throw std::invalid_argument("box: L must be finite and >= 1");
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("box: cutoff must be >= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("box: gamma must be >= 0");
  for (int j = 0; j < d; ++j) {
    if (!(beta[j] > 0.0) || !std::isfinite(beta[j]))
      throw std::invalid_argument("box: aspect ratios beta must be positive");
  }
  if (coupling && !std::isfinite(*coupling)) throw std::invalid_argument("box: coupling must be finite");
}

BoxSpec make_box(int d, double L, double cutoff, double gamma, const std::vector<double>& beta) {
  BoxSpec s;
  s.d = d;
  s.L = L;
  s.cutoff = cutoff;
  s.gamma = gamma;
  s.beta.setZero();
  if (beta.empty()) {
    for (int j = 0; j < d && j < 3; ++j) s.beta[j] = 1.0;
  } else {
    if (static_cast<int>(beta.size()) != d) throw std::invalid_argument("box: beta must have d components");
    for (int j = 0; j < d; ++j) s.beta[j] = beta[static_cast<std::size_t>(j)];
  }
  s.validate();
  bool square = true;
  for (int j = 0; j < d; ++j) square = square && s.beta[j] == 1.0;
  if (square) {
    s.beta_label = "square";
  } else if (s.rational_beta()) {
    s.beta_label = "rational";
  } else {
    s.beta_label = "irrational";
  }
  return s;
}

std::vector<double> generic_beta(int d) {
  std::vector<double> b{1.0, std::sqrt(2.0), std::sqrt(3.0)};
  b.resize(static_cast<std::size_t>(d));
  return b;
}

ModeSet::ModeSet(const BoxSpec& spec, std::size_t max_modes) : spec_(spec) {
  spec_.validate();
  const double radius = spec_.cutoff * spec_.L;
  max_component_ = static_cast<int>(std::floor(radius * (1.0 + 1e-12)));
  const double r2 = radius * radius * (1.0 + 1e-12);

  const double w = 2.0 * max_component_ + 1.0;
  const double box_cells = std::pow(w, spec_.d);
  const double ball_estimate = std::min(box_cells, std::pow(2.0 * radius + 1.0, spec_.d));
  if (ball_estimate > static_cast<double>(max_modes) * 4.0 || box_cells > 4.0e8) {
    throw BudgetError("lattice: mode count exceeds the memory bound", ball_estimate);
  }

  lookup_.assign(static_cast<std::size_t>(box_cells), -1);
  WaveVector m = WaveVector::Zero();
  const int M = max_component_;
  // Odometer over [-M, M]^d in lexicographic order.
  for (int j = 0; j < spec_.d; ++j) m[j] = -M;
  while (true) {
    double n2 = 0.0;
    for (int j = 0; j < spec_.d; ++j) n2 += static_cast<double>(m[j]) * m[j];
    if (n2 <= r2) {
      if (modes_.size() >= max_modes) {
        throw BudgetError("lattice: mode count exceeds the memory bound", ball_estimate);
      }
      lookup_[offset(m)] = static_cast<std::ptrdiff_t>(modes_.size());
      modes_.push_back(m);
    }
    int j = spec_.d - 1;
    while (j >= 0 && m[j] == M) {
      m[j] = -M;
      --j;
    }
    if (j < 0) break;
    ++m[j];
  }

  omega_.resize(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) omega_[static_cast<Eigen::Index>(i)] = omega(spec_, modes_[i]);
}

std::size_t ModeSet::negated(std::size_t i) const {
  return static_cast<std::size_t>(index_of(-modes_[i]));
}

std::size_t ModeSet::zero_index() const {
  return static_cast<std::size_t>(index_of(WaveVector::Zero()));
}

RealVector ModeSet::wave_number(std::size_t i) const {
  return modes_[i].cast<double>() / spec_.L;
}

std::shared_ptr<const ModeSet> build_lattice(const BoxSpec& spec, std::size_t max_modes) {
  return std::make_shared<const ModeSet>(spec, max_modes);
}

double omega(const BoxSpec& spec, const WaveVector& m) {
  return omega(spec.beta, m.cast<double>()) / (spec.L * spec.L);
}

double resonance(const BoxSpec& spec, const WaveVector& k1, const WaveVector& k2,
                 const WaveVector& k3, const WaveVector& k, MomentumCheck check) {
  if (momentum_admissible(k1, k2, k3, k)) {
    const RealVector a = (k1 - k).cast<double>();
    const RealVector b = (k3 - k).cast<double>();
    return -2.0 * a.cwiseProduct(b).dot(spec.beta) / (spec.L * spec.L);
  }
  if (check == MomentumCheck::strict) {
    throw std::invalid_argument("resonance: momentum constraint k1 - k2 + k3 = k violated");
  }
  return omega(spec, k1) - omega(spec, k2) + omega(spec, k3) - omega(spec, k);
}

std::int64_t resonance_numerator(const RationalBeta& beta, const WaveVector& k1,
                                 const WaveVector& k3, const WaveVector& k) {
  std::int64_t acc = 0;
  for (int j = 0; j < 3; ++j) {
    acc += beta.numerator[j] * static_cast<std::int64_t>(k1[j] - k[j]) * static_cast<std::int64_t>(k3[j] - k[j]);
  }
  return -2 * acc;
}

}  // namespace wavekin
