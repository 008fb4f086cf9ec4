#ifndef WAVEKIN_DIAGRAMS_HPP
#define WAVEKIN_DIAGRAMS_HPP

#include "wavekin/census.hpp"
#include "wavekin/fields.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wavekin {

/// Node of a signed ternary tree, or of one of the two trees of a couple.
/// children[0..2] are node ids of the left, middle and right child, or -1 for
/// a leaf. partner is the paired leaf in a couple (-1 otherwise).
struct DiagramNode {
  int tree = 0;
  int parent = -1;
  std::array<int, 3> children{-1, -1, -1};
  int sign = +1;
  int partner = -1;

  bool is_leaf() const { return children[0] < 0; }
};

/// Tree with nodes stored in preorder; node 0 is the root.
struct SignedTree {
  std::vector<DiagramNode> nodes;

  int order() const;
  int leaf_count() const;
  /// Preorder shape word: 'L' for a leaf, 'B' followed by three subtrees.
  std::string shape() const;
};

class CapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kCombinatoricsCap = 4;
inline constexpr int kLatticeCap = 2;

/// All tree shapes with n branching nodes, signs by the propagation rule
/// (left and right children keep the parent sign, the middle one flips).
std::vector<SignedTree> enum_trees(int n, int root_sign, int cap = kCombinatoricsCap);

/// Two trees (tree 0 with root +, tree 1 with root -) and a perfect matching
/// of + leaves with - leaves across the union. Nodes of tree 0 come first,
/// both in preorder.
struct Couple {
  std::vector<DiagramNode> nodes;
  std::array<int, 2> roots{0, 1};

  int order() const;
  int order_of(int tree) const;
  std::vector<int> leaves() const;
  std::vector<int> branching() const;
  /// Deterministic text key of shapes and pairing; equal for equal couples.
  std::string key() const;
};

/// Rebuild the node array in canonical preorder (tree 0 then tree 1).
Couple canonical(const Couple& c);

Couple trivial_couple();

Couple make_couple(const SignedTree& plus, const SignedTree& minus, const std::vector<std::pair<int, int>>& pairs);

/// All couples of orders (n_plus, n_minus), in deterministic order.
std::vector<Couple> enum_couples(int n_plus, int n_minus, int cap = kCombinatoricsCap);

/// Mini-couple insertion at a leaf pair: both leaves branch, middle children
/// pair with each other, outer children pair straight (variant 0) or crossed
/// (variant 1).
Couple insert_pair_minicouple(const Couple& c, int leaf, int variant);

/// Order-two insertion at node n: a new node O takes n's place, O's child at
/// position `outer` branches into X, n becomes X's child at position `inner`
/// (its sign must agree), and the remaining two leaves of X pair with the
/// remaining two leaves of O. `swap` picks between the two pairings when both
/// are sign-compatible. Returns nothing for an inadmissible variant.
std::optional<Couple> insert_node_minicouple(const Couple& c, int node, int outer, int inner, bool swap);

/// Every couple reachable from the trivial couple with total order <= max_order.
std::vector<Couple> generate_regular(int max_order);

/// True when the couple reduces to the trivial couple by undoing the two
/// insertions.
bool is_regular(const Couple& c);

/// Single-path reduction that always applies the first available undo; used
/// to check that the reduction order does not matter.
bool is_regular_greedy(const Couple& c);

enum class BondKind { parent_child, leaf_pair, root_root };

std::string to_string(BondKind k);

struct Bond {
  int from = -1;  ///< atom index
  int to = -1;
  BondKind kind = BondKind::parent_child;
};

/// Atoms are the branching nodes of a couple, in node order.
struct Molecule {
  std::vector<int> atoms;  ///< node id of each atom
  std::vector<Bond> bonds;

  std::vector<int> degree() const;
  std::vector<int> in_degree() const;
  std::vector<int> out_degree() const;
};

/// Bonds: one per branching parent-child relation, one per leaf pair whose
/// leaves have branching parents, and one root_root bond between the root
/// atoms. When one tree is a single leaf, the root_root bond joins the other
/// root atom with the parent of the leaf paired to that single leaf. Bonds
/// point from parent to child when the child sign is +, from the parent of the
/// + leaf to the parent of the - leaf, and from the - root to the + root.
Molecule build_molecule(const Couple& c);

void write_couple_text(std::ostream& os, const Couple& c);
void write_molecule_text(std::ostream& os, const Molecule& m);

/// Branching nodes of one tree for the time integral: parent (index into the
/// same list, -1 for the root), sign and resonance factor.
struct TimeTree {
  std::vector<int> parent;
  std::vector<int> sign;
  std::vector<double> omega;
};

/// Integral over 0 < t_child < t_parent < tau of prod_n
/// exp(pi i zeta_n lambda Omega_n t_n). Exact; factors with small
/// |lambda Omega| tau switch to their Taylor series.
std::complex<double> time_integral(const TimeTree& tree, double tau, double lambda);

/// Number of linear extensions of the tree order; the integral at lambda = 0
/// is tau^n times this over n!.
std::int64_t linear_extensions(const TimeTree& tree);

/// Contribution of one couple to E|A_k(t)|^2 for every mode k, in physical
/// time t, Gaussian data with spectrum n_in. Each branching node carries
/// -i zeta eps L^-d; decorations range over the mode set at every node.
Eigen::VectorXcd couple_value(const Couple& c, const ModeSet& modes, const Eigen::VectorXd& n_in, double t,
                              const CensusBudget& budget = {});

/// Physical time of the diagram window: tau * delta * T_kin.
inline double diagram_time(const BoxSpec& spec, double tau, double delta) { return tau * delta * spec.t_kin(); }

/// Sum of couple values over every couple of total order <= N. Imaginary parts
/// above tolerance raise.
Eigen::VectorXd truncated_moment(const ModeSet& modes, const Eigen::VectorXd& n_in, double t, int N,
                                 const CensusBudget& budget = {}, double imag_tolerance = 1e-10);

}  // namespace wavekin

#endif  // WAVEKIN_DIAGRAMS_HPP
