#ifndef WAVEKIN_KINETIC_HPP
#define WAVEKIN_KINETIC_HPP

#include "wavekin/census.hpp"
#include "wavekin/fields.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavekin {

/// Rate constant of the collision operator in kinetic time tau = t / T_kin.
inline constexpr double kCollisionConstant = 4.0 * std::numbers::pi;

/// Uniform Cartesian mesh h Z^d cut to the ball |k| <= cutoff. Nodes are
/// ordered as a ModeSet of the box with L = 1/h, so a grid with h = 1/L lines
/// up index by index with the lattice of that box.
class KineticGrid {
 public:
  KineticGrid(int d, double h, double cutoff, const RealVector& beta);
  static KineticGrid from_box(const BoxSpec& spec);

  int d() const { return modes_->spec().d; }
  double h() const { return h_; }
  double cutoff() const { return modes_->spec().cutoff; }
  const RealVector& beta() const { return modes_->spec().beta; }
  std::size_t size() const { return modes_->size(); }
  const ModeSet& modes() const { return *modes_; }
  std::shared_ptr<const ModeSet> mode_set() const { return modes_; }
  RealVector node(std::size_t i) const { return modes_->wave_number(i); }
  const Eigen::VectorXd& omega() const { return modes_->frequencies(); }
  /// h^d.
  double cell() const { return cell_; }

  /// Node spacing of omega at the edge of the ball: 2 h cutoff max beta.
  double frequency_spacing() const;
  /// Twice the frequency spacing.
  double default_width() const;

  /// Index of node (k1 + k3 - k) or -1, with all three given as node indices.
  std::ptrdiff_t combine(std::size_t i1, std::size_t i3, std::size_t i) const {
    return padded_[static_cast<std::size_t>(pos_[i1] + pos_[i3] - pos_[i] + centre_)];
  }

  /// Exact integer numerator of Omega when beta is rational and 1/h is an
  /// integer: Omega = N * unit.
  const std::optional<RationalBeta>& rational() const { return rational_; }
  double omega_unit() const { return unit_; }
  std::int64_t max_numerator() const { return max_numerator_; }

 private:
  std::shared_ptr<const ModeSet> modes_;
  double h_ = 0.0;
  double cell_ = 0.0;
  std::vector<std::ptrdiff_t> pos_;
  std::vector<std::ptrdiff_t> padded_;
  std::ptrdiff_t centre_ = 0;
  std::optional<RationalBeta> rational_;
  double unit_ = 0.0;
  std::int64_t max_numerator_ = 0;
};

enum class KernelKind { gaussian, box };

std::string to_string(KernelKind k);
KernelKind parse_kernel(const std::string& name);

/// Broadened delta: gaussian of standard deviation w, or box of half-width w
/// and height 1 / (2w). Both integrate to one.
struct DeltaBroadening {
  double width = 0.5;
  KernelKind kind = KernelKind::gaussian;

  void validate() const;
  double operator()(double omega) const;
};

DeltaBroadening default_broadening(const KineticGrid& grid);

/// Resonance weight W(Omega) tabulated over the integer numerators when the
/// grid is rational, evaluated directly otherwise.
class ResonanceWeight {
 public:
  ResonanceWeight(const KineticGrid& grid, std::function<double(double)> w);
  double operator()(std::size_t i1, std::size_t i3, std::size_t i) const;
  double omega(std::size_t i1, std::size_t i3, std::size_t i) const;

 private:
  const KineticGrid* grid_;
  std::function<double(double)> w_;
  std::vector<double> table_;
  std::int64_t offset_ = 0;
};

/// phi1 phi2 phi3 - phi phi2 phi3 + phi phi1 phi3 - phi phi1 phi2: the
/// collision bracket with 1/phi cleared.
inline double bracket(double phi, double phi1, double phi2, double phi3) {
  return phi1 * phi2 * phi3 - phi * (phi2 * phi3 - phi1 * phi3 + phi1 * phi2);
}

struct CollisionParts {
  /// Uncorrected quadrature 4 pi h^{2d} sum B delta_w(Omega).
  Eigen::VectorXd raw;
  /// Coefficient of phi(k) in raw (a loss rate, >= 0 for phi >= 0).
  Eigen::VectorXd damping;
  /// Correction C = raw - phi (a + b omega) restoring both conservation laws.
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd corrected;
};

CollisionParts collision_parts(const KineticGrid& grid, const Eigen::VectorXd& phi, const DeltaBroadening& b);

/// Conservative collision operator on the grid.
Eigen::VectorXd collision(const KineticGrid& grid, const Eigen::VectorXd& phi, const DeltaBroadening& b);

/// Uncorrected collision quadrature at one node.
double collision_point(const KineticGrid& grid, const Eigen::VectorXd& phi, std::size_t i,
                       const DeltaBroadening& b);

class KineticError : public std::runtime_error {
 public:
  KineticError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct WkeConfig {
  double tau_end = 0.0;
  double dtau = 0.01;
  DeltaBroadening broadening;
  /// Multiplies the collision operator (eps^2 T_kin; 0 for a frozen run).
  double rate = 1.0;
  /// Abort when sup n exceeds this multiple of sup n_in (or of 1 if n_in = 0).
  double blowup_factor = 1e6;

  void validate() const;
};

struct WkeTrajectory {
  std::vector<double> tau;
  std::vector<Eigen::VectorXd> n;
  /// Mass h^d sum max(-n, 0) removed by clipping, per step.
  std::vector<double> clip_mass;
  /// 2.78 / max damping rate of n_in: the RK4 real-axis limit.
  double stability_bound = 0.0;
};

/// Classical RK4 in tau for dn/dtau = rate * collision(n), steps of equal
/// length tau_end / ceil(tau_end / dtau). Every step is recorded.
WkeTrajectory solve_wke(const KineticGrid& grid, const Eigen::VectorXd& n_in, const WkeConfig& cfg);

/// Full O(eps^2) lattice prediction for E|A_k(t)|^2 - n_in(k):
///   2 eps^2 L^{-2d} sum_{k1, k3; k2 in set} |I(Omega, t)|^2 B,
/// with |I|^2 = (2 sin(Omega t / 2) / Omega)^2.
double first_iterate_sum(const ModeSet& modes, const Eigen::VectorXd& n_in, double t, const WaveVector& k,
                         const CensusBudget& budget = {});

/// Same expression with L^{-2d} sum replaced by the grid quadrature h^{2d} sum,
/// at node i.
double first_iterate_integral(const KineticGrid& grid, const Eigen::VectorXd& n_in, double t, std::size_t i,
                              double epsilon);

/// (2 sin(x t / 2) / x)^2, equal to t^2 at x = 0.
double duhamel_square(double omega, double t);

struct HierarchyResidual {
  double residual = 0.0;
  /// |D(2 dtau) - D(dtau)| for centred differences D of the product.
  double discretization_scale = 0.0;
  double rhs = 0.0;
  double derivative = 0.0;
};

/// Residual of the r-point hierarchy for the factorized spectrum
/// n_r = prod_j n(k_j) at trajectory step s: the right side integrates the
/// product n_{r+2} over each k_j's collision variables (with the conservative
/// correction of the WKE run), the left side is a centred difference with step
/// dtau. Needs two recorded steps on either side of s.
HierarchyResidual hierarchy_residual(const KineticGrid& grid, const WkeTrajectory& traj, const WkeConfig& cfg,
                                     const std::vector<std::size_t>& nodes, std::size_t s);

/// Columns: tau, k_1..k_d, n.
void write_kinetic_csv(std::ostream& os, const KineticGrid& grid, const WkeTrajectory& traj,
                       const std::vector<std::size_t>& steps);

}  // namespace wavekin

#endif  // WAVEKIN_KINETIC_HPP
