#include "wavekin/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wavekin {

std::string to_string(Scheme s) {
  return s == Scheme::strang_split ? "strang_split" : "rk4_interaction_picture";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "strang_split") return Scheme::strang_split;
  if (name == "rk4_interaction_picture") return Scheme::rk4_interaction_picture;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

void EvolveConfig::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("evolve: t_end must be finite and >= 0");
  if (dt) {
    if (!(*dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (*dt > t_end && t_end > 0.0) throw std::invalid_argument("evolve: dt must not exceed t_end");
  }
  if (!(dealias_factor >= 1.5)) throw std::invalid_argument("evolve: dealias_factor must be >= 1.5");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double s = snapshot_times[i];
    if (!(s >= 0.0 && s <= t_end)) throw std::invalid_argument("evolve: snapshot times must lie in [0, t_end]");
    if (i > 0 && s < snapshot_times[i - 1]) throw std::invalid_argument("evolve: snapshot times must be sorted");
  }
}

Evolver::Evolver(std::shared_ptr<const ModeSet> modes, double dealias)
    : modes_(std::move(modes)), grid_(*modes_, dealias) {
  const BoxSpec& s = modes_->spec();
  coupling_ = s.epsilon() * std::pow(s.L, -s.d);
}

void Evolver::nonlinear(const Eigen::VectorXcd& a, Eigen::VectorXcd& out) {
  if (coupling_ == 0.0) {
    out.setZero(a.size());
    return;
  }
  grid_.scatter(a);
  grid_.to_physical();
  std::complex<double>* v = grid_.data();
  const std::size_t n = grid_.points();
  for (std::size_t j = 0; j < n; ++j) v[j] *= std::norm(v[j]);
  grid_.to_spectral();
  grid_.gather(out, coupling_ / static_cast<double>(n));
}

Conserved Evolver::conserved(const Eigen::VectorXcd& a) {
  Conserved c;
  c.mass = a.squaredNorm();
  c.energy = modes_->frequencies().dot(a.cwiseAbs2());
  if (coupling_ != 0.0) {
    grid_.scatter(a);
    grid_.to_physical();
    const std::complex<double>* v = grid_.data();
    const std::size_t n = grid_.points();
    double q = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::norm(v[j]);
      q += r * r;
    }
    c.energy += 0.5 * coupling_ * q / static_cast<double>(n);
  }
  return c;
}

double Evolver::default_dt(const Eigen::VectorXcd& a) const {
  const double omega_max = modes_->frequencies().size() ? modes_->frequencies().maxCoeff() : 0.0;
  const double rate = std::abs(coupling_) * a.squaredNorm();
  double dt = std::numeric_limits<double>::infinity();
  if (omega_max > 0.0) dt = std::min(dt, 0.1 / omega_max);
  if (rate > 0.0) dt = std::min(dt, 0.05 / rate);
  return dt;
}

void Evolver::linear_half(Eigen::VectorXcd& a, double h) {
  if (phase_h_ != h) {
    const Eigen::VectorXd& w = modes_->frequencies();
    phase_.resize(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phase_[i] = std::polar(1.0, -0.5 * h * w[i]);
    phase_h_ = h;
  }
  a.array() *= phase_.array();
}

void Evolver::strang_step(Eigen::VectorXcd& a, double h, const EvolveConfig& cfg) {
  linear_half(a, h);
  if (coupling_ != 0.0) {
    // Implicit midpoint for dA/dt = -i N(A): b = a - i h N((a + b) / 2).
    Eigen::VectorXcd& b = work_[0];
    Eigen::VectorXcd& mid = work_[1];
    Eigen::VectorXcd& nl = work_[2];
    const std::complex<double> mih(0.0, -h);
    nonlinear(a, nl);
    b = a + mih * nl;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    for (int it = 0; it < cfg.midpoint_max_iterations; ++it) {
      mid = 0.5 * (a + b);
      nonlinear(mid, nl);
      mid = a + mih * nl;
      const double change = (mid - b).cwiseAbs().maxCoeff();
      b.swap(mid);
      if (change <= cfg.midpoint_tolerance * scale) break;
    }
    a.swap(b);
  }
  linear_half(a, h);
}

void Evolver::rk4_step(Eigen::VectorXcd& a, double t, double h) {
  // Interaction picture: c = e^{i omega t} A, dc/dt = -i e^{i omega t} N(e^{-i omega t} c).
  const Eigen::VectorXd& w = modes_->frequencies();
  const Eigen::Index n = a.size();
  Eigen::VectorXcd& c = work_[0];
  Eigen::VectorXcd& tmp = work_[1];
  Eigen::VectorXcd* k[4] = {&work_[2], &work_[3], &work_[4], &work_[5]};
  c.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = a[i] * std::polar(1.0, w[i] * t);

  auto rhs = [&](const Eigen::VectorXcd& x, double s, Eigen::VectorXcd& out) {
    Eigen::VectorXcd& phys = tmp;
    phys.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) phys[i] = x[i] * std::polar(1.0, -w[i] * s);
    nonlinear(phys, out);
    for (Eigen::Index i = 0; i < n; ++i) out[i] *= std::complex<double>(0.0, -1.0) * std::polar(1.0, w[i] * s);
  };
  Eigen::VectorXcd stage(n);
  rhs(c, t, *k[0]);
  stage = c + 0.5 * h * *k[0];
  rhs(stage, t + 0.5 * h, *k[1]);
  stage = c + 0.5 * h * *k[1];
  rhs(stage, t + 0.5 * h, *k[2]);
  stage = c + h * *k[2];
  rhs(stage, t + h, *k[3]);
  c += (h / 6.0) * (*k[0] + 2.0 * *k[1] + 2.0 * *k[2] + *k[3]);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = c[i] * std::polar(1.0, -w[i] * (t + h));
}

void Evolver::run(Eigen::VectorXcd& a, const EvolveConfig& cfg,
                  const std::function<void(std::size_t, double, const Eigen::VectorXcd&)>& on_snapshot) {
  cfg.validate();
  if (a.size() != static_cast<Eigen::Index>(modes_->size()))
    throw std::invalid_argument("evolve: field is not aligned with the mode set");
  long nsteps = 0;
  double h = 0.0;
  if (cfg.t_end > 0.0) {
    const double dt = cfg.dt ? *cfg.dt : std::min(default_dt(a), cfg.t_end);
    nsteps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9)));
    h = cfg.t_end / static_cast<double>(nsteps);
  }
  std::vector<long> snap_step(cfg.snapshot_times.size());
  for (std::size_t i = 0; i < snap_step.size(); ++i) {
    snap_step[i] = nsteps == 0 ? 0 : std::lround(cfg.snapshot_times[i] / h);
  }
  std::size_t next = 0;
  auto emit = [&](long step) {
    while (next < snap_step.size() && snap_step[next] == step) {
      on_snapshot(next, static_cast<double>(step) * h, a);
      ++next;
    }
  };
  emit(0);
  for (long s = 0; s < nsteps; ++s) {
    if (cfg.scheme == Scheme::strang_split) {
      strang_step(a, h, cfg);
    } else {
      rk4_step(a, static_cast<double>(s) * h, h);
    }
    if (!a.allFinite()) {
      std::ostringstream msg;
      msg << "evolve: non-finite amplitude after step " << s + 1;
      throw EvolveError(msg.str(), s + 1);
    }
    emit(s + 1);
  }
}

WaveField nonlinear_term(const WaveField& field, double dealias) {
  Evolver ev(field.modes, dealias);
  WaveField out = zero_field(field.modes);
  out.t = field.t;
  ev.nonlinear(field.amplitudes, out.amplitudes);
  return out;
}

std::vector<WaveField> evolve(const WaveField& field, const EvolveConfig& cfg) {
  Evolver ev(field.modes, cfg.dealias_factor);
  Eigen::VectorXcd a = field.amplitudes;
  std::vector<WaveField> snaps;
  snaps.reserve(cfg.snapshot_times.size());
  ev.run(a, cfg, [&](std::size_t, double t, const Eigen::VectorXcd& v) {
    WaveField f;
    f.modes = field.modes;
    f.amplitudes = v;
    f.t = field.t + t;
    snaps.push_back(std::move(f));
  });
  return snaps;
}

Conserved conserved(const WaveField& field, double dealias) {
  Evolver ev(field.modes, dealias);
  return ev.conserved(field.amplitudes);
}

}  // namespace wavekin
