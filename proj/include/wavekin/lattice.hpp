#ifndef WAVEKIN_LATTICE_HPP
#define WAVEKIN_LATTICE_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavekin {

/// Integer lattice coordinate m of the wave number k = m / L. Components past
/// the box dimension are kept at zero.
using WaveVector = Eigen::Vector3i;
using RealVector = Eigen::Vector3d;

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double estimated_cost)
      : std::runtime_error(what), estimated_cost_(estimated_cost) {}
  double estimated_cost() const { return estimated_cost_; }

 private:
  double estimated_cost_;
};

/// Exact form of the aspect ratios: beta_j = numerator_j / denominator.
struct RationalBeta {
  Eigen::Matrix<std::int64_t, 3, 1> numerator = Eigen::Matrix<std::int64_t, 3, 1>::Zero();
  std::int64_t denominator = 1;
};

/// Periodic box T^d_L together with the scaling-law parameters.
///
/// epsilon = L^-gamma unless `coupling` overrides it; gamma = +inf is the
/// linear limit. The kinetic time is T_kin = epsilon^-2 computed from gamma, so
/// forcing coupling = 0 keeps the time axis of the corresponding weakly
/// nonlinear run.
struct BoxSpec {
  int d = 2;
  double L = 8.0;
  RealVector beta = RealVector(1.0, 1.0, 0.0);
  double cutoff = 1.0;
  double gamma = 1.0;
  std::optional<double> coupling;
  std::string beta_label = "square";

  double epsilon() const;
  double t_kin() const;
  /// epsilon^2 * T_kin: the rate at which kinetic time advances per unit of
  /// tau. Equals 1 unless the coupling is overridden.
  double kinetic_rate() const;

  /// Exact representation when every beta_j is a ratio of small integers.
  std::optional<RationalBeta> rational_beta() const;

  void validate() const;
};

/// Builds a box, zero-padding beta and deriving the label ("square" when all
/// aspect ratios equal one, "irrational" when some component has no small
/// rational form, "rational" otherwise).
BoxSpec make_box(int d, double L, double cutoff, double gamma,
                 const std::vector<double>& beta = {});

/// Default "generic" aspect ratios (1, sqrt 2, sqrt 3) truncated to d.
std::vector<double> generic_beta(int d);

/// Truncated mode set: every integer m with |m / L| <= cutoff, ordered
/// lexicographically. Immutable once built.
class ModeSet {
 public:
  static constexpr std::size_t kDefaultMaxModes = 4'000'000;

  explicit ModeSet(const BoxSpec& spec, std::size_t max_modes = kDefaultMaxModes);

  const BoxSpec& spec() const { return spec_; }
  std::size_t size() const { return modes_.size(); }
  const WaveVector& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<WaveVector>& vectors() const { return modes_; }

  /// Largest |m_j| over the set.
  int max_component() const { return max_component_; }

  /// Position of m in the set, or -1 when m is outside the cutoff ball.
  std::ptrdiff_t index_of(const WaveVector& m) const {
    for (int j = 0; j < 3; ++j) {
      if (m[j] < -max_component_ || m[j] > max_component_) return -1;
    }
    return lookup_[offset(m)];
  }
  bool contains(const WaveVector& m) const { return index_of(m) >= 0; }

  std::size_t negated(std::size_t i) const;
  std::size_t zero_index() const;

  /// omega(k) for every mode, index-aligned with the set.
  const Eigen::VectorXd& frequencies() const { return omega_; }

  /// Real wave number k = m / L.
  RealVector wave_number(std::size_t i) const;

 private:
  std::size_t offset(const WaveVector& m) const {
    const std::size_t w = 2 * static_cast<std::size_t>(max_component_) + 1;
    std::size_t off = 0;
    for (int j = 0; j < spec_.d; ++j) off = off * w + static_cast<std::size_t>(m[j] + max_component_);
    return off;
  }

  BoxSpec spec_;
  int max_component_ = 0;
  std::vector<WaveVector> modes_;
  std::vector<std::ptrdiff_t> lookup_;
  Eigen::VectorXd omega_;
};

std::shared_ptr<const ModeSet> build_lattice(const BoxSpec& spec,
                                             std::size_t max_modes = ModeSet::kDefaultMaxModes);

/// |k|^2_beta = sum_j beta_j (m_j / L)^2.
double omega(const BoxSpec& spec, const WaveVector& m);

template <class Derived>
double omega(const RealVector& beta, const Eigen::MatrixBase<Derived>& k) {
  return k.cwiseAbs2().dot(beta);
}

enum class MomentumCheck { lenient, strict };

/// Omega = omega(k1) - omega(k2) + omega(k3) - omega(k). When k1 - k2 + k3 = k
/// the factored form -2 sum_j beta_j (k1-k)^j (k3-k)^j is used; otherwise the
/// direct difference is returned (lenient) or std::invalid_argument is thrown
/// (strict).
double resonance(const BoxSpec& spec, const WaveVector& k1, const WaveVector& k2,
                 const WaveVector& k3, const WaveVector& k,
                 MomentumCheck check = MomentumCheck::lenient);

/// Integer numerator N with Omega = N / (denominator * L^2), for rational beta
/// and momentum-admissible (k1, k3, k). k2 is implied.
std::int64_t resonance_numerator(const RationalBeta& beta, const WaveVector& k1,
                                 const WaveVector& k3, const WaveVector& k);

inline bool momentum_admissible(const WaveVector& k1, const WaveVector& k2, const WaveVector& k3,
                                const WaveVector& k) {
  return k1 - k2 + k3 == k;
}

}  // namespace wavekin

#endif  // WAVEKIN_LATTICE_HPP
