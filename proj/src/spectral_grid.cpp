#include "wavekin/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace wavekin {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t smooth_size(std::size_t n) {
  for (std::size_t c = std::max<std::size_t>(n, 1);; ++c) {
    std::size_t r = c;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return c;
  }
}

struct SpectralGrid::Plans {
  fftw_complex* buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

SpectralGrid::SpectralGrid(const ModeSet& modes, double dealias, double max_points) : plans_(new Plans) {
  if (!(dealias >= 1.0)) throw std::invalid_argument("spectral grid: dealias factor must be >= 1");
  const int d = modes.spec().d;
  const int M = modes.max_component();
  n_ = smooth_size(static_cast<std::size_t>(std::ceil(dealias * (2.0 * M + 1.0) - 1e-9)));
  const double total = std::pow(static_cast<double>(n_), d);
  if (total > max_points) throw BudgetError("spectral grid: padded grid exceeds the memory budget", total);
  total_ = static_cast<std::size_t>(total);

  slot_.resize(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    std::size_t off = 0;
    for (int j = 0; j < d; ++j) {
      const long m = modes[i][j];
      const long w = m < 0 ? m + static_cast<long>(n_) : m;
      off = off * n_ + static_cast<std::size_t>(w);
    }
    slot_[i] = off;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->buf = fftw_alloc_complex(total_);
  if (!plans_->buf) throw std::bad_alloc();
  int dims[3];
  for (int j = 0; j < d; ++j) dims[j] = static_cast<int>(n_);
  plans_->forward = fftw_plan_dft(d, dims, plans_->buf, plans_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft(d, dims, plans_->buf, plans_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("spectral grid: FFTW planning failed");
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
  if (plans_->buf) fftw_free(plans_->buf);
}

std::complex<double>* SpectralGrid::data() { return reinterpret_cast<std::complex<double>*>(plans_->buf); }

void SpectralGrid::scatter(const Eigen::VectorXcd& a) {
  std::complex<double>* g = data();
  std::fill(g, g + total_, std::complex<double>(0.0, 0.0));
  for (std::size_t i = 0; i < slot_.size(); ++i) g[slot_[i]] = a[static_cast<Eigen::Index>(i)];
}

void SpectralGrid::gather(Eigen::VectorXcd& out, double scale) const {
  const auto* g = reinterpret_cast<const std::complex<double>*>(plans_->buf);
  out.resize(static_cast<Eigen::Index>(slot_.size()));
  for (std::size_t i = 0; i < slot_.size(); ++i) out[static_cast<Eigen::Index>(i)] = scale * g[slot_[i]];
}

void SpectralGrid::to_physical() { fftw_execute(plans_->backward); }

void SpectralGrid::to_spectral() { fftw_execute(plans_->forward); }

}  // namespace wavekin
