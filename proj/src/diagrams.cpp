#include "wavekin/diagrams.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace wavekin {

namespace {

int child_sign(int parent_sign, int position) { return position == 1 ? -parent_sign : parent_sign; }

const std::vector<std::string>& shape_words(int n) {
  static std::map<int, std::vector<std::string>> memo;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::vector<std::string> out;
  if (n == 0) {
    out.push_back("L");
  } else {
    for (int a = 0; a <= n - 1; ++a) {
      for (int b = 0; a + b <= n - 1; ++b) {
        const int c = n - 1 - a - b;
        for (const auto& sa : shape_words(a)) {
          for (const auto& sb : shape_words(b)) {
            for (const auto& sc : shape_words(c)) out.push_back("B" + sa + sb + sc);
          }
        }
      }
    }
  }
  return memo.emplace(n, std::move(out)).first->second;
}

int build_from_word(const std::string& word, std::size_t& pos, int parent, int sign, int tree,
                    std::vector<DiagramNode>& nodes) {
  const int id = static_cast<int>(nodes.size());
  DiagramNode node;
  node.tree = tree;
  node.parent = parent;
  node.sign = sign;
  nodes.push_back(node);
  if (word[pos++] == 'B') {
    for (int c = 0; c < 3; ++c) {
      const int child = build_from_word(word, pos, id, child_sign(sign, c), tree, nodes);
      nodes[static_cast<std::size_t>(id)].children[static_cast<std::size_t>(c)] = child;
    }
  }
  return id;
}

void preorder(const std::vector<DiagramNode>& nodes, int v, std::vector<int>& out) {
  out.push_back(v);
  const DiagramNode& n = nodes[static_cast<std::size_t>(v)];
  if (n.is_leaf()) return;
  for (int c : n.children) preorder(nodes, c, out);
}

std::string shape_of(const std::vector<DiagramNode>& nodes, int root) {
  std::vector<int> order;
  preorder(nodes, root, order);
  std::string s;
  for (int v : order) s += nodes[static_cast<std::size_t>(v)].is_leaf() ? 'L' : 'B';
  return s;
}

void replace_child(Couple& c, int parent, int tree, int old_id, int new_id) {
  if (parent < 0) {
    c.roots[static_cast<std::size_t>(tree)] = new_id;
    return;
  }
  for (int& ch : c.nodes[static_cast<std::size_t>(parent)].children) {
    if (ch == old_id) ch = new_id;
  }
}

int add_node(Couple& c, int tree, int parent, int sign) {
  DiagramNode n;
  n.tree = tree;
  n.parent = parent;
  n.sign = sign;
  c.nodes.push_back(n);
  return static_cast<int>(c.nodes.size()) - 1;
}

void pair_leaves(Couple& c, int a, int b) {
  c.nodes[static_cast<std::size_t>(a)].partner = b;
  c.nodes[static_cast<std::size_t>(b)].partner = a;
}

bool all_leaf_children(const Couple& c, int v) {
  const DiagramNode& n = c.nodes[static_cast<std::size_t>(v)];
  if (n.is_leaf()) return false;
  for (int ch : n.children) {
    if (!c.nodes[static_cast<std::size_t>(ch)].is_leaf()) return false;
  }
  return true;
}

// Every couple obtained by undoing one insertion.
std::vector<Couple> reductions(const Couple& c) {
  std::vector<Couple> out;
  const auto& N = c.nodes;
  auto at = [&](int v) -> const DiagramNode& { return N[static_cast<std::size_t>(v)]; };
  for (int x = 0; x < static_cast<int>(N.size()); ++x) {
    // Pair insertion: x (+) and y (-) branch into leaves only, middles paired,
    // outer leaves paired straight or crossed.
    if (at(x).sign == +1 && all_leaf_children(c, x)) {
      const auto& xc = at(x).children;
      const int y = at(at(xc[1]).partner).parent;
      if (y >= 0 && y != x && all_leaf_children(c, y) && at(xc[1]).partner == at(y).children[1]) {
        const auto& yc = at(y).children;
        const int p0 = at(xc[0]).partner;
        const int p2 = at(xc[2]).partner;
        if ((p0 == yc[0] && p2 == yc[2]) || (p0 == yc[2] && p2 == yc[0])) {
          Couple r = c;
          for (int v : {x, y}) r.nodes[static_cast<std::size_t>(v)].children = {-1, -1, -1};
          pair_leaves(r, x, y);
          out.push_back(canonical(r));
        }
      }
    }
    // Node insertion: O = x with branching child X at `outer`, n at X's `inner`.
    if (at(x).is_leaf()) continue;
    for (int outer = 0; outer < 3; ++outer) {
      const int X = at(x).children[static_cast<std::size_t>(outer)];
      if (at(X).is_leaf()) continue;
      std::vector<int> oleaves;
      bool ok = true;
      for (int p = 0; p < 3; ++p) {
        if (p == outer) continue;
        const int ch = at(x).children[static_cast<std::size_t>(p)];
        if (!at(ch).is_leaf()) ok = false;
        oleaves.push_back(ch);
      }
      if (!ok) continue;
      for (int inner = 0; inner < 3; ++inner) {
        const int n = at(X).children[static_cast<std::size_t>(inner)];
        if (at(n).sign != at(x).sign) continue;
        std::vector<int> xpartners;
        bool leaves_ok = true;
        for (int p = 0; p < 3; ++p) {
          if (p == inner) continue;
          const int ch = at(X).children[static_cast<std::size_t>(p)];
          if (!at(ch).is_leaf()) {
            leaves_ok = false;
            break;
          }
          xpartners.push_back(at(ch).partner);
        }
        if (!leaves_ok) continue;
        std::sort(xpartners.begin(), xpartners.end());
        std::vector<int> os = oleaves;
        std::sort(os.begin(), os.end());
        if (xpartners != os) continue;
        Couple r = c;
        r.nodes[static_cast<std::size_t>(n)].parent = at(x).parent;
        replace_child(r, at(x).parent, at(x).tree, x, n);
        out.push_back(canonical(r));
      }
    }
  }
  return out;
}

bool regular_search(const Couple& c, std::map<std::string, bool>& memo) {
  const int order = c.order();
  if (order == 0) return true;
  if (order % 2 != 0) return false;
  const std::string k = c.key();
  auto it = memo.find(k);
  if (it != memo.end()) return it->second;
  bool result = false;
  for (const Couple& r : reductions(c)) {
    if (regular_search(r, memo)) {
      result = true;
      break;
    }
  }
  memo.emplace(k, result);
  return result;
}

}  // namespace

int SignedTree::order() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const DiagramNode& n) { return !n.is_leaf(); }));
}

int SignedTree::leaf_count() const { return static_cast<int>(nodes.size()) - order(); }

std::string SignedTree::shape() const { return shape_of(nodes, 0); }

std::vector<SignedTree> enum_trees(int n, int root_sign, int cap) {
  if (n < 0) throw std::invalid_argument("trees: order must be >= 0");
  if (n > cap) throw CapError("trees: order exceeds the expansion cap");
  if (root_sign != 1 && root_sign != -1) throw std::invalid_argument("trees: root sign must be +1 or -1");
  std::vector<SignedTree> out;
  for (const std::string& w : shape_words(n)) {
    SignedTree t;
    std::size_t pos = 0;
    build_from_word(w, pos, -1, root_sign, 0, t.nodes);
    out.push_back(std::move(t));
  }
  return out;
}

int Couple::order() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const DiagramNode& n) { return !n.is_leaf(); }));
}

int Couple::order_of(int tree) const {
  std::vector<int> pre;
  preorder(nodes, roots[static_cast<std::size_t>(tree)], pre);
  return static_cast<int>(
      std::count_if(pre.begin(), pre.end(), [&](int v) { return !nodes[static_cast<std::size_t>(v)].is_leaf(); }));
}

std::vector<int> Couple::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (nodes[static_cast<std::size_t>(v)].is_leaf()) out.push_back(v);
  }
  return out;
}

std::vector<int> Couple::branching() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (!nodes[static_cast<std::size_t>(v)].is_leaf()) out.push_back(v);
  }
  return out;
}

std::string Couple::key() const {
  std::vector<int> order;
  preorder(nodes, roots[0], order);
  preorder(nodes, roots[1], order);
  std::map<int, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  std::ostringstream os;
  os << shape_of(nodes, roots[0]) << '|' << shape_of(nodes, roots[1]) << '|';
  for (int v : order) {
    const DiagramNode& n = nodes[static_cast<std::size_t>(v)];
    if (n.is_leaf()) os << rank.at(n.partner) << ',';
  }
  return os.str();
}

Couple canonical(const Couple& c) {
  std::vector<int> order;
  preorder(c.nodes, c.roots[0], order);
  const std::size_t first = order.size();
  preorder(c.nodes, c.roots[1], order);
  std::map<int, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  Couple out;
  out.nodes.resize(order.size());
  out.roots = {0, static_cast<int>(first)};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const DiagramNode& src = c.nodes[static_cast<std::size_t>(order[i])];
    DiagramNode& dst = out.nodes[i];
    dst.tree = i < first ? 0 : 1;
    dst.sign = src.sign;
    dst.parent = src.parent < 0 ? -1 : rank.at(src.parent);
    if (!src.is_leaf()) {
      for (std::size_t j = 0; j < 3; ++j) dst.children[j] = rank.at(src.children[j]);
    } else {
      dst.partner = rank.at(src.partner);
    }
  }
  return out;
}

namespace {

Couple join_trees(const SignedTree& plus, const SignedTree& minus) {
  Couple c;
  c.nodes = plus.nodes;
  const int shift = static_cast<int>(plus.nodes.size());
  for (DiagramNode n : minus.nodes) {
    n.tree = 1;
    if (n.parent >= 0) n.parent += shift;
    if (!n.is_leaf()) {
      for (int& ch : n.children) ch += shift;
    }
    c.nodes.push_back(n);
  }
  c.roots = {0, shift};
  return c;
}

}  // namespace

Couple make_couple(const SignedTree& plus, const SignedTree& minus, const std::vector<std::pair<int, int>>& pairs) {
  Couple c = join_trees(plus, minus);
  for (const auto& [a, b] : pairs) {
    const DiagramNode& na = c.nodes.at(static_cast<std::size_t>(a));
    const DiagramNode& nb = c.nodes.at(static_cast<std::size_t>(b));
    if (!na.is_leaf() || !nb.is_leaf() || na.sign == nb.sign)
      throw std::invalid_argument("couple: pairs must join a + leaf with a - leaf");
    pair_leaves(c, a, b);
  }
  for (const DiagramNode& n : c.nodes) {
    if (n.is_leaf() && n.partner < 0) throw std::invalid_argument("couple: pairing is not perfect");
  }
  return c;
}

Couple trivial_couple() {
  SignedTree p;
  p.nodes.push_back(DiagramNode{});
  SignedTree m;
  DiagramNode leaf;
  leaf.sign = -1;
  m.nodes.push_back(leaf);
  return make_couple(p, m, {{0, 1}});
}

std::vector<Couple> enum_couples(int n_plus, int n_minus, int cap) {
  if (n_plus < 0 || n_minus < 0) throw std::invalid_argument("couples: orders must be >= 0");
  if (n_plus + n_minus > cap) throw CapError("couples: total order exceeds the expansion cap");
  std::vector<Couple> out;
  const auto plus_trees = enum_trees(n_plus, +1, cap);
  const auto minus_trees = enum_trees(n_minus, -1, cap);
  for (const SignedTree& tp : plus_trees) {
    for (const SignedTree& tm : minus_trees) {
      const Couple base = join_trees(tp, tm);
      std::vector<int> pos;
      std::vector<int> neg;
      for (int v = 0; v < static_cast<int>(base.nodes.size()); ++v) {
        const DiagramNode& n = base.nodes[static_cast<std::size_t>(v)];
        if (!n.is_leaf()) continue;
        (n.sign > 0 ? pos : neg).push_back(v);
      }
      if (pos.size() != neg.size()) continue;
      std::vector<int> perm(neg.size());
      std::iota(perm.begin(), perm.end(), 0);
      do {
        Couple c = base;
        for (std::size_t i = 0; i < pos.size(); ++i) pair_leaves(c, pos[i], neg[static_cast<std::size_t>(perm[i])]);
        out.push_back(std::move(c));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  return out;
}

Couple insert_pair_minicouple(const Couple& c, int leaf, int variant) {
  const DiagramNode& x0 = c.nodes.at(static_cast<std::size_t>(leaf));
  if (!x0.is_leaf()) throw std::invalid_argument("pair insertion: node is not a leaf");
  Couple r = c;
  const int x = leaf;
  const int y = x0.partner;
  std::array<std::array<int, 3>, 2> kids{};
  int which = 0;
  for (int v : {x, y}) {
    const DiagramNode node = r.nodes[static_cast<std::size_t>(v)];
    for (int p = 0; p < 3; ++p) {
      kids[static_cast<std::size_t>(which)][static_cast<std::size_t>(p)] =
          add_node(r, node.tree, v, child_sign(node.sign, p));
    }
    r.nodes[static_cast<std::size_t>(v)].children = kids[static_cast<std::size_t>(which)];
    r.nodes[static_cast<std::size_t>(v)].partner = -1;
    ++which;
  }
  pair_leaves(r, kids[0][1], kids[1][1]);
  if (variant == 0) {
    pair_leaves(r, kids[0][0], kids[1][0]);
    pair_leaves(r, kids[0][2], kids[1][2]);
  } else {
    pair_leaves(r, kids[0][0], kids[1][2]);
    pair_leaves(r, kids[0][2], kids[1][0]);
  }
  return canonical(r);
}

std::optional<Couple> insert_node_minicouple(const Couple& c, int node, int outer, int inner, bool swap) {
  const DiagramNode n0 = c.nodes.at(static_cast<std::size_t>(node));
  const int s = n0.sign;
  const int sx = child_sign(s, outer);
  if (child_sign(sx, inner) != s) return std::nullopt;
  Couple r = c;
  const int O = add_node(r, n0.tree, n0.parent, s);
  replace_child(r, n0.parent, n0.tree, node, O);
  std::vector<int> oleaves;
  std::vector<int> xleaves;
  int X = -1;
  for (int p = 0; p < 3; ++p) {
    if (p == outer) {
      X = add_node(r, n0.tree, O, sx);
      r.nodes[static_cast<std::size_t>(O)].children[static_cast<std::size_t>(p)] = X;
    } else {
      const int l = add_node(r, n0.tree, O, child_sign(s, p));
      r.nodes[static_cast<std::size_t>(O)].children[static_cast<std::size_t>(p)] = l;
      oleaves.push_back(l);
    }
  }
  for (int p = 0; p < 3; ++p) {
    if (p == inner) {
      r.nodes[static_cast<std::size_t>(X)].children[static_cast<std::size_t>(p)] = node;
      r.nodes[static_cast<std::size_t>(node)].parent = X;
    } else {
      const int l = add_node(r, n0.tree, X, child_sign(sx, p));
      r.nodes[static_cast<std::size_t>(X)].children[static_cast<std::size_t>(p)] = l;
      xleaves.push_back(l);
    }
  }
  auto sign_of = [&](int v) { return r.nodes[static_cast<std::size_t>(v)].sign; };
  std::vector<std::array<int, 2>> matchings;
  if (sign_of(xleaves[0]) != sign_of(oleaves[0]) && sign_of(xleaves[1]) != sign_of(oleaves[1])) matchings.push_back({0, 1});
  if (sign_of(xleaves[0]) != sign_of(oleaves[1]) && sign_of(xleaves[1]) != sign_of(oleaves[0])) matchings.push_back({1, 0});
  const std::size_t pick = swap ? 1 : 0;
  if (pick >= matchings.size()) return std::nullopt;
  pair_leaves(r, xleaves[0], oleaves[static_cast<std::size_t>(matchings[pick][0])]);
  pair_leaves(r, xleaves[1], oleaves[static_cast<std::size_t>(matchings[pick][1])]);
  return canonical(r);
}

std::vector<Couple> generate_regular(int max_order) {
  if (max_order > kCombinatoricsCap) throw CapError("generator: order exceeds the expansion cap");
  std::vector<Couple> out{trivial_couple()};
  std::set<std::string> seen{out.front().key()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Couple cur = out[i];
    if (cur.order() + 2 > max_order) continue;
    auto push = [&](Couple&& nc) {
      if (seen.insert(nc.key()).second) out.push_back(std::move(nc));
    };
    for (int v = 0; v < static_cast<int>(cur.nodes.size()); ++v) {
      const DiagramNode& n = cur.nodes[static_cast<std::size_t>(v)];
      if (n.is_leaf() && n.sign > 0) {
        for (int variant = 0; variant < 2; ++variant) push(insert_pair_minicouple(cur, v, variant));
      }
      for (int outer = 0; outer < 3; ++outer) {
        for (int inner = 0; inner < 3; ++inner) {
          for (bool swap : {false, true}) {
            if (auto nc = insert_node_minicouple(cur, v, outer, inner, swap)) push(std::move(*nc));
          }
        }
      }
    }
  }
  return out;
}

bool is_regular(const Couple& c) {
  std::map<std::string, bool> memo;
  return regular_search(canonical(c), memo);
}

bool is_regular_greedy(const Couple& c) {
  Couple cur = canonical(c);
  while (cur.order() > 0) {
    auto r = reductions(cur);
    if (r.empty()) return false;
    cur = std::move(r.front());
  }
  return true;
}

std::string to_string(BondKind k) {
  switch (k) {
    case BondKind::parent_child: return "parent_child";
    case BondKind::leaf_pair: return "leaf_pair";
    case BondKind::root_root: return "root_root";
  }
  return "?";
}

std::vector<int> Molecule::degree() const {
  std::vector<int> d(atoms.size(), 0);
  for (const Bond& b : bonds) {
    ++d[static_cast<std::size_t>(b.from)];
    ++d[static_cast<std::size_t>(b.to)];
  }
  return d;
}

std::vector<int> Molecule::in_degree() const {
  std::vector<int> d(atoms.size(), 0);
  for (const Bond& b : bonds) ++d[static_cast<std::size_t>(b.to)];
  return d;
}

std::vector<int> Molecule::out_degree() const {
  std::vector<int> d(atoms.size(), 0);
  for (const Bond& b : bonds) ++d[static_cast<std::size_t>(b.from)];
  return d;
}

Molecule build_molecule(const Couple& c) {
  Molecule m;
  std::map<int, int> atom_of;
  for (int v : c.branching()) {
    atom_of[v] = static_cast<int>(m.atoms.size());
    m.atoms.push_back(v);
  }
  if (m.atoms.empty()) return m;
  const auto& N = c.nodes;
  auto at = [&](int v) -> const DiagramNode& { return N[static_cast<std::size_t>(v)]; };
  for (int v : m.atoms) {
    const int p = at(v).parent;
    if (p < 0) continue;
    if (at(v).sign > 0) {
      m.bonds.push_back({atom_of.at(p), atom_of.at(v), BondKind::parent_child});
    } else {
      m.bonds.push_back({atom_of.at(v), atom_of.at(p), BondKind::parent_child});
    }
  }
  for (int v : c.leaves()) {
    if (at(v).sign < 0) continue;
    const int pp = at(v).parent;
    const int pm = at(at(v).partner).parent;
    if (pp < 0 || pm < 0) continue;
    m.bonds.push_back({atom_of.at(pp), atom_of.at(pm), BondKind::leaf_pair});
  }
  const int rp = c.roots[0];
  const int rm = c.roots[1];
  if (!at(rp).is_leaf() && !at(rm).is_leaf()) {
    m.bonds.push_back({atom_of.at(rm), atom_of.at(rp), BondKind::root_root});
  } else {
    const int single = at(rp).is_leaf() ? rp : rm;
    const int other = single == rp ? rm : rp;
    const int p = at(at(single).partner).parent;
    if (at(other).sign > 0) {
      m.bonds.push_back({atom_of.at(p), atom_of.at(other), BondKind::root_root});
    } else {
      m.bonds.push_back({atom_of.at(other), atom_of.at(p), BondKind::root_root});
    }
  }
  return m;
}

void write_couple_text(std::ostream& os, const Couple& c) {
  os << "couple " << c.order_of(0) << ' ' << c.order_of(1) << ' ' << c.key() << '\n';
  for (std::size_t v = 0; v < c.nodes.size(); ++v) {
    const DiagramNode& n = c.nodes[v];
    os << "node " << v << " tree " << n.tree << " sign " << (n.sign > 0 ? '+' : '-') << " parent " << n.parent;
    if (!n.is_leaf()) os << " children " << n.children[0] << ' ' << n.children[1] << ' ' << n.children[2];
    os << '\n';
  }
  for (std::size_t v = 0; v < c.nodes.size(); ++v) {
    const DiagramNode& n = c.nodes[v];
    if (n.is_leaf() && n.sign > 0) os << "pair " << v << ' ' << n.partner << '\n';
  }
}

void write_molecule_text(std::ostream& os, const Molecule& m) {
  os << "molecule " << m.atoms.size() << ' ' << m.bonds.size() << '\n';
  for (std::size_t a = 0; a < m.atoms.size(); ++a) os << "atom " << a << " node " << m.atoms[a] << '\n';
  for (const Bond& b : m.bonds) os << "bond " << b.from << ' ' << b.to << ' ' << to_string(b.kind) << '\n';
}

}  // namespace wavekin
