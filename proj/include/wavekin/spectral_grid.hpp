#ifndef WAVEKIN_SPECTRAL_GRID_HPP
#define WAVEKIN_SPECTRAL_GRID_HPP

#include "wavekin/lattice.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace wavekin {

/// Smallest N >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t smooth_size(std::size_t n);

/// Periodic N^d grid with an in-place complex transform, plus the scatter and
/// gather maps between a mode set and the grid. Not thread-safe; use one per
/// worker.
class SpectralGrid {
 public:
  /// N = smooth_size(ceil(dealias * (2M + 1))) with M the largest mode
  /// component. dealias = 2 keeps cubic and quartic products alias-free.
  SpectralGrid(const ModeSet& modes, double dealias, double max_points = 6.4e7);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  std::size_t points_per_dim() const { return n_; }
  std::size_t points() const { return total_; }

  std::complex<double>* data();

  /// Zero the grid and place amplitudes on their wave numbers.
  void scatter(const Eigen::VectorXcd& a);
  /// Read grid coefficients back onto the mode set, times `scale`.
  void gather(Eigen::VectorXcd& out, double scale) const;

  /// Grid values v(x_j) = sum_k c_k e^{i k x_j} (unnormalized).
  void to_physical();
  /// c_k = sum_j v(x_j) e^{-i k x_j} (unnormalized).
  void to_spectral();

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::size_t total_ = 0;
  std::vector<std::size_t> slot_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace wavekin

#endif  // WAVEKIN_SPECTRAL_GRID_HPP
