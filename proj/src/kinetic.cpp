#include "wavekin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace wavekin {

KineticGrid::KineticGrid(int d, double h, double cutoff, const RealVector& beta) : h_(h) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("kinetic grid: spacing h must lie in (0, 1]");
  std::vector<double> b(static_cast<std::size_t>(std::clamp(d, 1, 3)));
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = beta[static_cast<Eigen::Index>(j)];
  const BoxSpec spec = make_box(d, 1.0 / h, cutoff, 1.0, b);
  modes_ = build_lattice(spec);
  cell_ = std::pow(h, d);

  const int M = modes_->max_component();
  const std::ptrdiff_t W = 6 * M + 1;
  std::ptrdiff_t total = 1;
  for (int j = 0; j < d; ++j) total *= W;
  if (total > 400'000'000) throw BudgetError("kinetic grid: index table exceeds the memory budget", double(total));
  padded_.assign(static_cast<std::size_t>(total), -1);
  centre_ = 0;
  for (int j = 0; j < d; ++j) centre_ = centre_ * W + 3 * M;
  pos_.resize(modes_->size());
  for (std::size_t i = 0; i < modes_->size(); ++i) {
    std::ptrdiff_t p = 0;
    for (int j = 0; j < d; ++j) p = p * W + (*modes_)[i][j];
    pos_[i] = p;
    padded_[static_cast<std::size_t>(p + centre_)] = static_cast<std::ptrdiff_t>(i);
  }

  const double L = spec.L;
  if (std::abs(L - std::round(L)) < 1e-9 * L) {
    rational_ = spec.rational_beta();
    if (rational_) {
      const double Lr = std::round(L);
      unit_ = 1.0 / (static_cast<double>(rational_->denominator) * Lr * Lr);
      std::int64_t s = 0;
      for (int j = 0; j < d; ++j) s += std::abs(rational_->numerator[j]);
      max_numerator_ = 2 * s * 4 * static_cast<std::int64_t>(M) * M;
    }
  }
}

KineticGrid KineticGrid::from_box(const BoxSpec& spec) {
  return KineticGrid(spec.d, 1.0 / spec.L, spec.cutoff, spec.beta);
}

double KineticGrid::frequency_spacing() const {
  return 2.0 * h_ * cutoff() * beta().head(d()).maxCoeff();
}

double KineticGrid::default_width() const { return 2.0 * frequency_spacing(); }

std::string to_string(KernelKind k) { return k == KernelKind::gaussian ? "gaussian" : "box"; }

KernelKind parse_kernel(const std::string& name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "box") return KernelKind::box;
  throw std::invalid_argument("unknown broadening kernel '" + name + "'");
}

void DeltaBroadening::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("broadening: width must be > 0");
}

double DeltaBroadening::operator()(double omega) const {
  if (kind == KernelKind::box) return std::abs(omega) <= width ? 0.5 / width : 0.0;
  const double x = omega / width;
  return std::exp(-0.5 * x * x) / (width * std::sqrt(2.0 * std::numbers::pi));
}

DeltaBroadening default_broadening(const KineticGrid& grid) {
  DeltaBroadening b;
  b.width = grid.default_width();
  return b;
}

ResonanceWeight::ResonanceWeight(const KineticGrid& grid, std::function<double(double)> w)
    : grid_(&grid), w_(std::move(w)) {
  if (grid.rational()) {
    offset_ = grid.max_numerator();
    table_.resize(static_cast<std::size_t>(2 * offset_ + 1));
    for (std::int64_t n = -offset_; n <= offset_; ++n) {
      table_[static_cast<std::size_t>(n + offset_)] = w_(static_cast<double>(n) * grid.omega_unit());
    }
  }
}

double ResonanceWeight::omega(std::size_t i1, std::size_t i3, std::size_t i) const {
  const ModeSet& m = grid_->modes();
  const RealVector a = (m[i1] - m[i]).cast<double>();
  const RealVector b = (m[i3] - m[i]).cast<double>();
  return -2.0 * a.cwiseProduct(b).dot(grid_->beta()) * grid_->h() * grid_->h();
}

double ResonanceWeight::operator()(std::size_t i1, std::size_t i3, std::size_t i) const {
  if (!table_.empty()) {
    const ModeSet& m = grid_->modes();
    const std::int64_t n = resonance_numerator(*grid_->rational(), m[i1], m[i3], m[i]);
    return table_[static_cast<std::size_t>(n + offset_)];
  }
  return w_(omega(i1, i3, i));
}

namespace {

void check_phi(const KineticGrid& grid, const Eigen::VectorXd& phi) {
  if (phi.size() != static_cast<Eigen::Index>(grid.size()))
    throw std::invalid_argument("kinetic: grid function has the wrong length");
}

// Fills raw and damping.
void collision_sums(const KineticGrid& grid, const Eigen::VectorXd& phi, const ResonanceWeight& weight,
                    Eigen::VectorXd& raw, Eigen::VectorXd& damping) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  raw.setZero(n);
  damping.setZero(n);
  const double pre = kCollisionConstant * grid.cell() * grid.cell();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double p = phi[i];
    double net = 0.0;
    double loss = 0.0;
    for (std::ptrdiff_t i1 = 0; i1 < n; ++i1) {
      const double p1 = phi[i1];
      for (std::ptrdiff_t i3 = 0; i3 < n; ++i3) {
        const std::ptrdiff_t i2 = grid.combine(static_cast<std::size_t>(i1), static_cast<std::size_t>(i3), ui);
        if (i2 < 0) continue;
        const double p2 = phi[i2];
        const double p3 = phi[i3];
        const double w = weight(static_cast<std::size_t>(i1), static_cast<std::size_t>(i3), ui);
        net += w * bracket(p, p1, p2, p3);
        loss += w * (p2 * p3 - p1 * p3 + p1 * p2);
      }
    }
    raw[i] = pre * net;
    damping[i] = pre * loss;
  }
}

}  // namespace

CollisionParts collision_parts(const KineticGrid& grid, const Eigen::VectorXd& phi, const DeltaBroadening& b) {
  check_phi(grid, phi);
  b.validate();
  CollisionParts out;
  const ResonanceWeight weight(grid, [b](double om) { return b(om); });
  collision_sums(grid, phi, weight, out.raw, out.damping);

  const Eigen::VectorXd& w = grid.omega();
  const double s0 = phi.sum();
  const double s1 = phi.dot(w);
  const double s2 = phi.dot(w.cwiseAbs2());
  const double r0 = out.raw.sum();
  const double r1 = out.raw.dot(w);
  const double det = s0 * s2 - s1 * s1;
  if (det > 1e-12 * s0 * s2 && det > 0.0) {
    out.a = (r0 * s2 - r1 * s1) / det;
    out.b = (s0 * r1 - s1 * r0) / det;
  } else if (s0 > 0.0) {
    out.a = r0 / s0;
  }
  out.corrected = out.raw - phi.cwiseProduct((out.a + out.b * w.array()).matrix());
  return out;
}

Eigen::VectorXd collision(const KineticGrid& grid, const Eigen::VectorXd& phi, const DeltaBroadening& b) {
  return collision_parts(grid, phi, b).corrected;
}

double collision_point(const KineticGrid& grid, const Eigen::VectorXd& phi, std::size_t i,
                       const DeltaBroadening& b) {
  check_phi(grid, phi);
  b.validate();
  const ResonanceWeight weight(grid, [b](double om) { return b(om); });
  const std::size_t n = grid.size();
  double acc = 0.0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i3 = 0; i3 < n; ++i3) {
      const std::ptrdiff_t i2 = grid.combine(i1, i3, i);
      if (i2 < 0) continue;
      acc += weight(i1, i3, i) * bracket(phi[static_cast<Eigen::Index>(i)], phi[static_cast<Eigen::Index>(i1)],
                                         phi[i2], phi[static_cast<Eigen::Index>(i3)]);
    }
  }
  return kCollisionConstant * grid.cell() * grid.cell() * acc;
}

void WkeConfig::validate() const {
  if (!(tau_end >= 0.0) || !std::isfinite(tau_end)) throw std::invalid_argument("wke: tau_end must be >= 0");
  if (!(dtau > 0.0)) throw std::invalid_argument("wke: dtau must be > 0");
  if (!(blowup_factor > 1.0)) throw std::invalid_argument("wke: blowup_factor must exceed 1");
  if (!std::isfinite(rate)) throw std::invalid_argument("wke: rate must be finite");
  broadening.validate();
}

WkeTrajectory solve_wke(const KineticGrid& grid, const Eigen::VectorXd& n_in, const WkeConfig& cfg) {
  cfg.validate();
  check_phi(grid, n_in);
  if ((n_in.array() < 0.0).any()) throw std::invalid_argument("wke: initial spectrum must be non-negative");
  const long nsteps = cfg.tau_end > 0.0 ? std::max(1L, static_cast<long>(std::ceil(cfg.tau_end / cfg.dtau - 1e-9))) : 0;
  const double h = nsteps ? cfg.tau_end / static_cast<double>(nsteps) : 0.0;
  const double sup0 = n_in.size() ? n_in.maxCoeff() : 0.0;
  const double bound = cfg.blowup_factor * (sup0 > 0.0 ? sup0 : 1.0);

  WkeTrajectory traj;
  traj.tau.push_back(0.0);
  traj.n.push_back(n_in);
  traj.clip_mass.push_back(0.0);

  auto rhs = [&](const Eigen::VectorXd& n) -> Eigen::VectorXd {
    if (cfg.rate == 0.0) return Eigen::VectorXd::Zero(n.size());
    return cfg.rate * collision(grid, n, cfg.broadening);
  };

  if (nsteps == 0) return traj;
  {
    const CollisionParts p0 = collision_parts(grid, n_in, cfg.broadening);
    const double dmax = std::abs(cfg.rate) * (p0.damping.size() ? p0.damping.maxCoeff() : 0.0);
    traj.stability_bound = dmax > 0.0 ? 2.78 / dmax : std::numeric_limits<double>::infinity();
  }

  Eigen::VectorXd n = n_in;
  for (long s = 0; s < nsteps; ++s) {
    const Eigen::VectorXd k1 = rhs(n);
    const Eigen::VectorXd k2 = rhs(n + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(n + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(n + h * k3);
    n += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double clipped = grid.cell() * (-n.array()).max(0.0).sum();
    n = n.cwiseMax(0.0);
    if (!n.allFinite() || n.maxCoeff() > bound) {
      std::ostringstream msg;
      msg << "wke: solution left the bound " << bound << " at step " << s + 1;
      throw KineticError(msg.str(), s + 1);
    }
    traj.tau.push_back(static_cast<double>(s + 1) * h);
    traj.n.push_back(n);
    traj.clip_mass.push_back(clipped);
  }
  return traj;
}

double duhamel_square(double omega, double t) {
  const double x = 0.5 * omega * t;
  if (std::abs(x) < 1e-4) return t * t * (1.0 - x * x / 3.0);
  const double s = 2.0 * std::sin(x) / omega;
  return s * s;
}

double first_iterate_sum(const ModeSet& modes, const Eigen::VectorXd& n_in, double t, const WaveVector& k,
                         const CensusBudget& budget) {
  if (!(t > 0.0)) throw std::invalid_argument("first iterate: t must be > 0");
  if (n_in.size() != static_cast<Eigen::Index>(modes.size()))
    throw std::invalid_argument("first iterate: spectrum has the wrong length");
  const double pairs = static_cast<double>(modes.size()) * static_cast<double>(modes.size());
  if (pairs > budget.max_pairs) throw BudgetError("first iterate: pair count exceeds the budget", pairs);
  const BoxSpec& spec = modes.spec();
  const auto ik = modes.index_of(k);
  if (ik < 0) throw std::invalid_argument("first iterate: output mode outside the mode set");
  const double p = n_in[ik];
  const auto n = static_cast<std::ptrdiff_t>(modes.size());
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(dynamic, 8)
  for (std::ptrdiff_t i1 = 0; i1 < n; ++i1) {
    const WaveVector& k1 = modes[static_cast<std::size_t>(i1)];
    for (std::ptrdiff_t i3 = 0; i3 < n; ++i3) {
      const WaveVector& k3 = modes[static_cast<std::size_t>(i3)];
      const WaveVector k2 = k1 + k3 - k;
      const auto i2 = modes.index_of(k2);
      if (i2 < 0) continue;
      const double om = resonance(spec, k1, k2, k3, k);
      acc += duhamel_square(om, t) * bracket(p, n_in[i1], n_in[i2], n_in[i3]);
    }
  }
  const double eps = spec.epsilon();
  return 2.0 * eps * eps * std::pow(spec.L, -2.0 * spec.d) * acc;
}

double first_iterate_integral(const KineticGrid& grid, const Eigen::VectorXd& n_in, double t, std::size_t i,
                              double epsilon) {
  if (!(t > 0.0)) throw std::invalid_argument("first iterate: t must be > 0");
  check_phi(grid, n_in);
  const ResonanceWeight weight(grid, [t](double om) { return duhamel_square(om, t); });
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const double p = n_in[static_cast<Eigen::Index>(i)];
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(dynamic, 8)
  for (std::ptrdiff_t i1 = 0; i1 < n; ++i1) {
    for (std::ptrdiff_t i3 = 0; i3 < n; ++i3) {
      const std::ptrdiff_t i2 = grid.combine(static_cast<std::size_t>(i1), static_cast<std::size_t>(i3), i);
      if (i2 < 0) continue;
      acc += weight(static_cast<std::size_t>(i1), static_cast<std::size_t>(i3), i) *
             bracket(p, n_in[i1], n_in[i2], n_in[i3]);
    }
  }
  return 2.0 * epsilon * epsilon * grid.cell() * grid.cell() * acc;
}

HierarchyResidual hierarchy_residual(const KineticGrid& grid, const WkeTrajectory& traj, const WkeConfig& cfg,
                                     const std::vector<std::size_t>& nodes, std::size_t s) {
  if (nodes.empty() || nodes.size() > 3) throw std::invalid_argument("hierarchy: r must be 1, 2 or 3");
  if (s < 2 || s + 2 >= traj.n.size()) throw std::invalid_argument("hierarchy: step needs two neighbours each side");
  for (std::size_t a : nodes) {
    if (a >= grid.size()) throw std::invalid_argument("hierarchy: node index out of range");
  }
  const double h = traj.tau[s + 1] - traj.tau[s];
  auto product = [&](std::size_t step) {
    double v = 1.0;
    for (std::size_t a : nodes) v *= traj.n[step][static_cast<Eigen::Index>(a)];
    return v;
  };

  const Eigen::VectorXd& n = traj.n[s];
  const CollisionParts parts = collision_parts(grid, n, cfg.broadening);
  const ResonanceWeight weight(grid, [b = cfg.broadening](double om) { return b(om); });
  const std::size_t size = grid.size();
  const double pre = kCollisionConstant * grid.cell() * grid.cell();

  double rhs = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const std::size_t kj = nodes[j];
    // n_{r+2} with k_j replaced by the collision variables, as a product.
    double acc = 0.0;
    for (std::size_t i1 = 0; i1 < size; ++i1) {
      for (std::size_t i3 = 0; i3 < size; ++i3) {
        const std::ptrdiff_t i2 = grid.combine(i1, i3, kj);
        if (i2 < 0) continue;
        const double p1 = n[static_cast<Eigen::Index>(i1)];
        const double p2 = n[i2];
        const double p3 = n[static_cast<Eigen::Index>(i3)];
        double others = 1.0;
        for (std::size_t l = 0; l < nodes.size(); ++l) {
          if (l != j) others *= n[static_cast<Eigen::Index>(nodes[l])];
        }
        const double pj = n[static_cast<Eigen::Index>(kj)];
        acc += weight(i1, i3, kj) * (others * p1 * p2 * p3 - others * pj * p2 * p3 + others * pj * p1 * p3 -
                                     others * pj * p1 * p2);
      }
    }
    const double full = product(s);
    rhs += pre * acc - (parts.a + parts.b * grid.omega()[static_cast<Eigen::Index>(kj)]) * full;
  }
  rhs *= cfg.rate;

  HierarchyResidual out;
  out.rhs = rhs;
  out.derivative = (product(s + 1) - product(s - 1)) / (2.0 * h);
  const double wide = (product(s + 2) - product(s - 2)) / (4.0 * h);
  out.residual = std::abs(out.rhs - out.derivative);
  out.discretization_scale = std::abs(wide - out.derivative);
  return out;
}

void write_kinetic_csv(std::ostream& os, const KineticGrid& grid, const WkeTrajectory& traj,
                       const std::vector<std::size_t>& steps) {
  static const char* axis[3] = {"k_x", "k_y", "k_z"};
  os << "tau";
  for (int j = 0; j < grid.d(); ++j) os << ',' << axis[j];
  os << ",n\n" << std::setprecision(17);
  for (std::size_t s : steps) {
    if (s >= traj.n.size()) throw std::out_of_range("kinetic csv: step out of range");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const RealVector k = grid.node(i);
      os << traj.tau[s];
      for (int j = 0; j < grid.d(); ++j) os << ',' << k[j];
      os << ',' << traj.n[s][static_cast<Eigen::Index>(i)] << '\n';
    }
  }
}

}  // namespace wavekin
