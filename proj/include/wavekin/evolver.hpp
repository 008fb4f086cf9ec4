#ifndef WAVEKIN_EVOLVER_HPP
#define WAVEKIN_EVOLVER_HPP

#include "wavekin/fields.hpp"
#include "wavekin/spectral_grid.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavekin {

enum class Scheme { strang_split, rk4_interaction_picture };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct EvolveConfig {
  /// Microscopic step; the default from default_dt() is used when empty.
  std::optional<double> dt;
  double t_end = 0.0;
  Scheme scheme = Scheme::strang_split;
  double dealias_factor = 2.0;
  std::vector<double> snapshot_times;
  /// Stopping rule of the implicit midpoint solve (sup-norm increment,
  /// relative to the sup-norm of the field).
  double midpoint_tolerance = 1e-15;
  int midpoint_max_iterations = 60;

  void validate() const;
};

class EvolveError : public std::runtime_error {
 public:
  EvolveError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct Conserved {
  double mass = 0.0;
  double energy = 0.0;
};

/// Galerkin-truncated cubic system on one mode set:
///   i dA/dt = omega A + eps L^-d P[ sum_{k1-k2+k3=k} A1 conj(A2) A3 ],
/// with products formed on a zero-padded grid. Holds its own transform
/// buffers, so use one instance per thread.
class Evolver {
 public:
  explicit Evolver(std::shared_ptr<const ModeSet> modes, double dealias = 2.0);

  const ModeSet& modes() const { return *modes_; }
  const SpectralGrid& grid() const { return grid_; }
  /// eps L^-d.
  double coupling() const { return coupling_; }

  /// out_k = eps L^-d sum_{k1-k2+k3=k} A1 conj(A2) A3 over the mode set.
  void nonlinear(const Eigen::VectorXcd& a, Eigen::VectorXcd& out);

  Conserved conserved(const Eigen::VectorXcd& a);

  /// min(0.1 / omega_max, 0.05 / (eps L^-d mass)); mass stands in for the
  /// peak of |u|^2.
  double default_dt(const Eigen::VectorXcd& a) const;

  /// Advances `a` from time 0 to cfg.t_end in equal steps t_end / ceil(t_end /
  /// dt). `on_snapshot(i, t_i, a)` fires for every requested snapshot i at the
  /// nearest step, with the exact time of that step.
  void run(Eigen::VectorXcd& a, const EvolveConfig& cfg,
           const std::function<void(std::size_t, double, const Eigen::VectorXcd&)>& on_snapshot);

  void strang_step(Eigen::VectorXcd& a, double h, const EvolveConfig& cfg);
  void rk4_step(Eigen::VectorXcd& a, double t, double h);

 private:
  void linear_half(Eigen::VectorXcd& a, double h);

  std::shared_ptr<const ModeSet> modes_;
  SpectralGrid grid_;
  double coupling_ = 0.0;
  Eigen::VectorXcd work_[6];
  Eigen::VectorXcd phase_;
  double phase_h_ = -1.0;
};

WaveField nonlinear_term(const WaveField& field, double dealias = 2.0);

std::vector<WaveField> evolve(const WaveField& field, const EvolveConfig& cfg);

Conserved conserved(const WaveField& field, double dealias = 2.0);

}  // namespace wavekin

#endif  // WAVEKIN_EVOLVER_HPP
