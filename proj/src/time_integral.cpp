#include "wavekin/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace wavekin {

namespace {

using cd = std::complex<double>;

// sum_j c_j t^{p_j} e^{i beta_j t}
struct Term {
  int p = 0;
  double beta = 0.0;
  cd c;
};
using ExpPoly = std::vector<Term>;

ExpPoly compact(const ExpPoly& in) {
  std::map<std::pair<int, double>, cd> acc;
  for (const Term& t : in) acc[{t.p, t.beta}] += t.c;
  ExpPoly out;
  out.reserve(acc.size());
  for (const auto& [k, c] : acc) {
    if (c != cd(0.0, 0.0)) out.push_back({k.first, k.second, c});
  }
  return out;
}

ExpPoly multiply(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly out;
  out.reserve(a.size() * b.size());
  for (const Term& x : a) {
    for (const Term& y : b) out.push_back({x.p + y.p, x.beta + y.beta, x.c * y.c});
  }
  return compact(out);
}

// Antiderivative vanishing at 0. `horizon` bounds the variable, so terms with
// |beta| horizon small are expanded in powers of t.
ExpPoly integrate(const ExpPoly& g, double horizon) {
  ExpPoly out;
  for (const Term& t : g) {
    const double x = std::abs(t.beta) * horizon;
    if (t.beta == 0.0) {
      out.push_back({t.p + 1, 0.0, t.c / static_cast<double>(t.p + 1)});
    } else if (x < 0.1) {
      cd coeff = t.c;
      for (int m = 0;; ++m) {
        out.push_back({t.p + m + 1, 0.0, coeff / static_cast<double>(t.p + m + 1)});
        coeff *= cd(0.0, t.beta) / static_cast<double>(m + 1);
        if (std::abs(coeff) * std::pow(horizon, t.p + m + 1) <= 1e-18 * std::abs(t.c) * std::pow(horizon, t.p)) break;
      }
    } else {
      // int_0^s t^p e^{ibt} dt = sum_j (-1)^j p!/(p-j)! s^{p-j} e^{ibs} / (ib)^{j+1} - (-1)^p p! / (ib)^{p+1}
      const cd ib(0.0, t.beta);
      cd falling = 1.0;
      cd inv = 1.0 / ib;
      for (int j = 0; j <= t.p; ++j) {
        const double sign = j % 2 ? -1.0 : 1.0;
        out.push_back({t.p - j, t.beta, t.c * sign * falling * inv});
        if (j < t.p) falling *= static_cast<double>(t.p - j);
        inv /= ib;
      }
      // falling = p!, inv = 1 / (ib)^{p+2}.
      const double sign = t.p % 2 ? -1.0 : 1.0;
      out.push_back({0, 0.0, -t.c * sign * falling * (inv * ib)});
    }
  }
  return compact(out);
}

cd evaluate(const ExpPoly& f, double s) {
  cd v = 0.0;
  for (const Term& t : f) v += t.c * std::pow(s, t.p) * std::polar(1.0, t.beta * s);
  return v;
}

}  // namespace

std::complex<double> time_integral(const TimeTree& tree, double tau, double lambda) {
  const std::size_t n = tree.parent.size();
  if (tree.sign.size() != n || tree.omega.size() != n) throw std::invalid_argument("time integral: inconsistent tree");
  if (n == 0) return 1.0;
  if (!(tau >= 0.0)) throw std::invalid_argument("time integral: tau must be >= 0");
  std::vector<std::vector<std::size_t>> kids(n);
  std::size_t root = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (tree.parent[v] < 0) {
      if (root != n) throw std::invalid_argument("time integral: more than one root");
      root = v;
    } else {
      kids[static_cast<std::size_t>(tree.parent[v])].push_back(v);
    }
  }
  if (root == n) throw std::invalid_argument("time integral: no root");
  const double horizon = std::max(tau, 1e-300);
  std::function<ExpPoly(std::size_t)> rec = [&](std::size_t v) {
    const double beta = std::numbers::pi * tree.sign[v] * lambda * tree.omega[v];
    ExpPoly g{{0, beta, 1.0}};
    for (std::size_t c : kids[v]) g = multiply(g, rec(c));
    return integrate(g, horizon);
  };
  return evaluate(rec(root), tau);
}

std::int64_t linear_extensions(const TimeTree& tree) {
  const std::size_t n = tree.parent.size();
  std::vector<std::int64_t> size(n, 1);
  // Parents may precede or follow children; accumulate subtree sizes by depth.
  std::vector<int> depth(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (int p = tree.parent[v]; p >= 0; p = tree.parent[static_cast<std::size_t>(p)]) ++depth[v];
  }
  std::vector<std::size_t> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });
  for (std::size_t v : order) {
    if (tree.parent[v] >= 0) size[static_cast<std::size_t>(tree.parent[v])] += size[v];
  }
  std::int64_t fact = 1;
  for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<std::int64_t>(k);
  std::int64_t denom = 1;
  for (std::int64_t s : size) denom *= s;
  return fact / denom;
}

Eigen::VectorXcd couple_value(const Couple& c, const ModeSet& modes, const Eigen::VectorXd& n_in, double t,
                              const CensusBudget& budget) {
  if (n_in.size() != static_cast<Eigen::Index>(modes.size()))
    throw std::invalid_argument("couple value: spectrum has the wrong length");
  if (!(t >= 0.0)) throw std::invalid_argument("couple value: t must be >= 0");
  const BoxSpec& spec = modes.spec();
  const std::size_t nn = c.nodes.size();
  std::vector<int> pairs;  // + leaf of each pair
  for (int v : c.leaves()) {
    if (c.nodes[static_cast<std::size_t>(v)].sign > 0) pairs.push_back(v);
  }
  const double cost = std::pow(static_cast<double>(modes.size()), static_cast<double>(pairs.size()));
  if (cost > budget.max_pairs) throw BudgetError("couple value: decoration count exceeds the budget", cost);

  // Postorder of all nodes and the time-tree layout of each tree.
  std::vector<int> post;
  std::function<void(int)> walk = [&](int v) {
    const DiagramNode& n = c.nodes[static_cast<std::size_t>(v)];
    if (!n.is_leaf()) {
      for (int ch : n.children) walk(ch);
    }
    post.push_back(v);
  };
  walk(c.roots[0]);
  walk(c.roots[1]);
  std::array<TimeTree, 2> tt;
  std::vector<int> slot(nn, -1);
  for (int v : c.branching()) {
    const DiagramNode& n = c.nodes[static_cast<std::size_t>(v)];
    TimeTree& T = tt[static_cast<std::size_t>(n.tree)];
    slot[static_cast<std::size_t>(v)] = static_cast<int>(T.parent.size());
    T.parent.push_back(n.parent);
    T.sign.push_back(n.sign);
    T.omega.push_back(0.0);
  }
  for (auto& T : tt) {
    for (int& p : T.parent) {
      if (p >= 0) p = slot[static_cast<std::size_t>(p)];
    }
  }

  const double coupling = spec.epsilon() * std::pow(spec.L, -spec.d);
  cd pre = 1.0;
  for (int v : c.branching()) pre *= cd(0.0, -c.nodes[static_cast<std::size_t>(v)].sign * coupling);

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(modes.size()));
  const Eigen::VectorXd& w = modes.frequencies();
  const std::size_t P = pairs.size();
  std::vector<std::size_t> choice(P, 0);
  std::vector<std::ptrdiff_t> idx(nn, -1);
  const std::size_t base = modes.size();
  while (true) {
    bool valid = true;
    double weight = 1.0;
    for (std::size_t j = 0; j < P; ++j) {
      const int a = pairs[j];
      idx[static_cast<std::size_t>(a)] = static_cast<std::ptrdiff_t>(choice[j]);
      idx[static_cast<std::size_t>(c.nodes[static_cast<std::size_t>(a)].partner)] = static_cast<std::ptrdiff_t>(choice[j]);
      weight *= n_in[static_cast<Eigen::Index>(choice[j])];
    }
    if (weight != 0.0) {
      for (int v : post) {
        const DiagramNode& n = c.nodes[static_cast<std::size_t>(v)];
        if (n.is_leaf()) continue;
        const WaveVector k = modes[static_cast<std::size_t>(idx[static_cast<std::size_t>(n.children[0])])] -
                             modes[static_cast<std::size_t>(idx[static_cast<std::size_t>(n.children[1])])] +
                             modes[static_cast<std::size_t>(idx[static_cast<std::size_t>(n.children[2])])];
        const auto i = modes.index_of(k);
        if (i < 0) {
          valid = false;
          break;
        }
        idx[static_cast<std::size_t>(v)] = i;
        tt[static_cast<std::size_t>(n.tree)].omega[static_cast<std::size_t>(slot[static_cast<std::size_t>(v)])] =
            w[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(n.children[0])])] -
            w[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(n.children[1])])] +
            w[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(n.children[2])])] - w[i];
      }
      if (valid && idx[static_cast<std::size_t>(c.roots[0])] == idx[static_cast<std::size_t>(c.roots[1])]) {
        const cd v = time_integral(tt[0], t, -1.0 / std::numbers::pi) * time_integral(tt[1], t, -1.0 / std::numbers::pi);
        out[idx[static_cast<std::size_t>(c.roots[0])]] += weight * v;
      }
    }
    std::size_t j = 0;
    while (j < P && ++choice[j] == base) {
      choice[j] = 0;
      ++j;
    }
    if (j == P) break;
  }
  return pre * out;
}

Eigen::VectorXd truncated_moment(const ModeSet& modes, const Eigen::VectorXd& n_in, double t, int N,
                                 const CensusBudget& budget, double imag_tolerance) {
  if (N < 0) throw std::invalid_argument("truncated moment: N must be >= 0");
  if (N > kLatticeCap) throw CapError("truncated moment: N exceeds the lattice expansion cap");
  Eigen::VectorXcd total = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(modes.size()));
  for (int order = 0; order <= N; ++order) {
    for (int np = 0; np <= order; ++np) {
      for (const Couple& c : enum_couples(np, order - np, kLatticeCap)) total += couple_value(c, modes, n_in, t, budget);
    }
  }
  const double scale = std::max(1.0, n_in.size() ? n_in.cwiseAbs().maxCoeff() : 0.0);
  if (total.imag().cwiseAbs().maxCoeff() > imag_tolerance * scale)
    throw std::runtime_error("truncated moment: imaginary part does not cancel");
  return total.real();
}

}  // namespace wavekin
