#include "wavekin/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace wavekin {

namespace {

constexpr int kShift = 60;
constexpr int kShiftSq = 32;
constexpr double kMaxRatio = 0x1.0p36;

__int128 to_fixed(double y, int shift) { return static_cast<__int128>(std::nearbyint(std::ldexp(y, shift))); }

long double from_fixed(__int128 v, int shift) { return std::ldexp(static_cast<long double>(v), -shift); }

}  // namespace

MomentAccumulator::MomentAccumulator(Eigen::VectorXd scale)
    : scale_(std::move(scale)),
      sum_(static_cast<std::size_t>(scale_.size()), 0),
      sum_sq_(static_cast<std::size_t>(scale_.size()), 0) {
  for (Eigen::Index i = 0; i < scale_.size(); ++i) {
    if (!(scale_[i] > 0.0) || !std::isfinite(scale_[i]))
      throw std::invalid_argument("moments: reference scales must be positive");
  }
}

void MomentAccumulator::add(const Eigen::VectorXd& x) {
  if (x.size() != scale_.size()) throw std::invalid_argument("moments: sample length mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double y = x[i] / scale_[i];
    if (!(std::abs(y) < kMaxRatio)) throw std::overflow_error("moments: sample outside the fixed-point range");
    sum_[static_cast<std::size_t>(i)] += to_fixed(y, kShift);
    sum_sq_[static_cast<std::size_t>(i)] += to_fixed(y * y, kShiftSq);
  }
  ++count_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0 && sum_.empty()) {
    *this = other;
    return;
  }
  if (other.sum_.size() != sum_.size()) throw std::invalid_argument("moments: cannot merge accumulators of different size");
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    sum_[i] += other.sum_[i];
    sum_sq_[i] += other.sum_sq_[i];
  }
  count_ += other.count_;
}

Eigen::VectorXd MomentAccumulator::mean() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(scale_.size());
  if (count_ == 0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(from_fixed(sum_[static_cast<std::size_t>(i)], kShift) / count_) * scale_[i];
  }
  return out;
}

Eigen::VectorXd MomentAccumulator::stderr_of_mean() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(scale_.size());
  if (count_ < 2) return out;
  const long double m = static_cast<long double>(count_);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const long double s1 = from_fixed(sum_[static_cast<std::size_t>(i)], kShift);
    const long double s2 = from_fixed(sum_sq_[static_cast<std::size_t>(i)], kShiftSq);
    const long double var = std::max<long double>(0.0L, (s2 - s1 * s1 / m) / (m - 1.0L));
    out[i] = static_cast<double>(std::sqrt(var / m)) * scale_[i];
  }
  return out;
}

EnsembleResult run_ensemble(std::shared_ptr<const ModeSet> modes, const SpectrumFamily& f, NoiseLaw law,
                            const EvolveConfig& cfg_in, std::int64_t M, std::uint64_t base_seed,
                            const EnsembleOptions& options) {
  if (M < 2) throw std::invalid_argument("ensemble: need at least two members");
  cfg_in.validate();
  const Eigen::VectorXd n_in = spectrum_on(f, *modes);

  // One step size for every member, so that snapshots line up.
  EvolveConfig cfg = cfg_in;
  if (!cfg.dt && cfg.t_end > 0.0) {
    Evolver probe(modes, cfg.dealias_factor);
    cfg.dt = std::min(probe.default_dt(n_in.cwiseSqrt().cast<Complex>()), cfg.t_end);
  }

  const double peak = n_in.size() ? n_in.maxCoeff() : 0.0;
  Eigen::VectorXd scale = n_in.cwiseMax(peak > 0.0 ? 1e-3 * peak : 1.0);

  std::vector<Eigen::Index> tracked_index;
  for (const WaveVector& m : options.tracked) {
    const auto idx = modes->index_of(m);
    if (idx < 0) throw std::invalid_argument("ensemble: tracked mode outside the mode set");
    tracked_index.push_back(idx);
  }

  const std::size_t nsnap = cfg.snapshot_times.size();
  EnsembleResult result;
  result.modes = modes;
  result.seeds.resize(static_cast<std::size_t>(M));
  for (std::int64_t i = 0; i < M; ++i) result.seeds[static_cast<std::size_t>(i)] = member_seed(base_seed, i);
  result.tracked.assign(nsnap, Eigen::MatrixXcd::Zero(M, static_cast<Eigen::Index>(tracked_index.size())));
  std::vector<MomentAccumulator> total(nsnap, MomentAccumulator(scale));
  std::vector<double> times(nsnap, 0.0);

  std::int64_t failed_member = std::numeric_limits<std::int64_t>::max();
  std::string failure;
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
  {
    std::unique_ptr<Evolver> ev;
    std::vector<MomentAccumulator> local(nsnap, MomentAccumulator(scale));
    Eigen::VectorXcd a;
    Eigen::VectorXd x;
    try {
      ev = std::make_unique<Evolver>(modes, cfg.dealias_factor);
    } catch (const std::exception& e) {
#pragma omp critical(wavekin_ensemble_failure)
      if (failed_member > -1) {
        failed_member = -1;
        failure = e.what();
      }
    }
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < M; ++i) {
      if (!ev) continue;
      const std::uint64_t seed = member_seed(base_seed, i);
      try {
        sample_amplitudes(n_in, law, seed, a);
        ev->run(a, cfg, [&](std::size_t s, double t, const Eigen::VectorXcd& v) {
          x = v.cwiseAbs2();
          local[s].add(x);
          for (std::size_t j = 0; j < tracked_index.size(); ++j) {
            result.tracked[s](i, static_cast<Eigen::Index>(j)) = v[tracked_index[j]];
          }
          if (i == 0) times[s] = t;
        });
      } catch (const std::exception& e) {
#pragma omp critical(wavekin_ensemble_failure)
        if (i < failed_member) {
          failed_member = i;
          std::ostringstream msg;
          msg << "ensemble: member " << i << " (seed " << seed << ") failed: " << e.what();
          failure = msg.str();
        }
      }
    }
#pragma omp critical(wavekin_ensemble_merge)
    for (std::size_t s = 0; s < nsnap; ++s) total[s].merge(local[s]);
  }
  if (failed_member != std::numeric_limits<std::int64_t>::max()) throw std::runtime_error(failure);

  for (std::size_t s = 0; s < nsnap; ++s) {
    MomentTable t;
    t.t = times[s];
    t.samples = total[s].count();
    t.mean = total[s].mean();
    t.stderr_of_mean = total[s].stderr_of_mean();
    result.tables.push_back(std::move(t));
  }
  return result;
}

Estimate joint_moment(const Eigen::MatrixXcd& samples, const std::vector<int>& p, const std::vector<int>& q) {
  const Eigen::Index r = samples.cols();
  if (static_cast<Eigen::Index>(p.size()) != r || static_cast<Eigen::Index>(q.size()) != r)
    throw std::invalid_argument("joint moment: exponent count must match the mode count");
  const Eigen::Index M = samples.rows();
  if (M < 1) throw std::invalid_argument("joint moment: no samples");
  Eigen::VectorXcd z(M);
  for (Eigen::Index s = 0; s < M; ++s) {
    Complex v(1.0, 0.0);
    for (Eigen::Index j = 0; j < r; ++j) {
      const Complex a = samples(s, j);
      for (int e = 0; e < p[static_cast<std::size_t>(j)]; ++e) v *= a;
      for (int e = 0; e < q[static_cast<std::size_t>(j)]; ++e) v *= std::conj(a);
    }
    z[s] = v;
  }
  Estimate out;
  out.mean = z.mean();
  if (M > 1) {
    const double var = (z.array() - out.mean).abs2().sum() / static_cast<double>(M - 1);
    out.stderr_of_mean = std::sqrt(var / static_cast<double>(M));
  }
  return out;
}

namespace {

Eigen::MatrixXcd gather_samples(const std::vector<WaveField>& samples, const std::vector<WaveVector>& modes) {
  if (samples.empty()) throw std::invalid_argument("joint moment: no samples");
  std::set<std::vector<int>> seen;
  std::vector<Eigen::Index> idx;
  const auto& ms = samples.front().modes;
  for (const WaveVector& m : modes) {
    if (!seen.insert({m[0], m[1], m[2]}).second) throw std::invalid_argument("joint moment: wave vectors must be distinct");
    const auto i = ms->index_of(m);
    if (i < 0) throw std::invalid_argument("joint moment: wave vector outside the mode set");
    idx.push_back(i);
  }
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (samples[s].modes->size() != ms->size()) throw std::invalid_argument("joint moment: samples must share one box");
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = samples[s].amplitudes[idx[j]];
    }
  }
  return out;
}

}  // namespace

Estimate joint_moment(const std::vector<WaveField>& samples, const JointMomentQuery& q) {
  if (q.modes.empty()) throw std::invalid_argument("joint moment: need at least one mode");
  return joint_moment(gather_samples(samples, q.modes), q.p, q.q);
}

ChaosDefect chaos_defect(const Eigen::MatrixXcd& samples) {
  const Eigen::Index r = samples.cols();
  if (r < 2) throw std::invalid_argument("chaos defect: need at least two modes");
  const double M = static_cast<double>(samples.rows());
  const Eigen::MatrixXd abs2 = samples.cwiseAbs2();
  // E|A_j|^{2p} for p = 0..2.
  Eigen::MatrixXd power(r, 3);
  for (Eigen::Index j = 0; j < r; ++j) {
    power(j, 0) = 1.0;
    power(j, 1) = abs2.col(j).sum() / M;
    power(j, 2) = abs2.col(j).squaredNorm() / M;
  }

  ChaosDefect best;
  std::vector<int> p(static_cast<std::size_t>(r), 0);
  std::vector<int> q(static_cast<std::size_t>(r), 0);
  std::function<void(Eigen::Index, int)> visit = [&](Eigen::Index j, int used) {
    if (j == r) {
      if (used == 0) return;
      const Estimate e = joint_moment(samples, p, q);
      double target = 1.0;
      double scale = 1.0;
      for (Eigen::Index i = 0; i < r; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        target *= p[ui] == q[ui] ? power(i, p[ui]) : 0.0;
        scale *= std::pow(power(i, 1), 0.5 * (p[ui] + q[ui]));
      }
      if (!(scale > 0.0)) return;
      const double diff = std::abs(e.mean - target) / scale;
      const double se = e.stderr_of_mean / scale;
      const double z = se > 0.0 ? diff / se : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      best.max_z = std::max(best.max_z, z);
      if (diff > best.defect || best.p.empty()) {
        best.defect = diff;
        best.stderr_of_defect = se;
        best.p = p;
        best.q = q;
      }
      return;
    }
    const auto uj = static_cast<std::size_t>(j);
    for (int a = 0; used + a <= 4; ++a) {
      for (int b = 0; used + a + b <= 4; ++b) {
        p[uj] = a;
        q[uj] = b;
        visit(j + 1, used + a + b);
      }
    }
    p[uj] = 0;
    q[uj] = 0;
  };
  visit(0, 0);
  return best;
}

ChaosDefect chaos_defect(const std::vector<WaveField>& samples, const std::vector<WaveVector>& modes) {
  return chaos_defect(gather_samples(samples, modes));
}

void write_moment_csv(std::ostream& os, const ModeSet& modes, const std::vector<MomentTable>& tables) {
  static const char* axis[3] = {"m_x", "m_y", "m_z"};
  const int d = modes.spec().d;
  os << "t";
  for (int j = 0; j < d; ++j) os << ',' << axis[j];
  os << ",mean,stderr,M\n";
  os << std::setprecision(17);
  for (const MomentTable& t : tables) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      os << t.t;
      for (int j = 0; j < d; ++j) os << ',' << modes[i][j];
      const auto ii = static_cast<Eigen::Index>(i);
      os << ',' << t.mean[ii] << ',' << t.stderr_of_mean[ii] << ',' << t.samples << '\n';
    }
  }
}

}  // namespace wavekin
