#ifndef WAVEKIN_ENSEMBLE_HPP
#define WAVEKIN_ENSEMBLE_HPP

#include "wavekin/evolver.hpp"
#include "wavekin/fields.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wavekin {

/// Exact running sums of x and x^2 for one mode, held in fixed point after
/// division by a per-mode reference scale. Integer addition makes merging
/// associative and commutative, so any partition of the samples gives
/// bit-identical results.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(Eigen::VectorXd scale);

  void add(const Eigen::VectorXd& x);
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return count_; }
  std::size_t size() const { return static_cast<std::size_t>(scale_.size()); }
  Eigen::VectorXd mean() const;
  /// Standard error of the mean, sqrt(sample variance / M).
  Eigen::VectorXd stderr_of_mean() const;

 private:
  Eigen::VectorXd scale_;
  std::vector<__int128> sum_;
  std::vector<__int128> sum_sq_;
  std::int64_t count_ = 0;
};

struct MomentTable {
  double t = 0.0;
  std::int64_t samples = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd stderr_of_mean;
};

struct EnsembleOptions {
  /// Modes whose complex amplitudes are kept per sample (for joint moments).
  std::vector<WaveVector> tracked;
  /// 0 keeps the OpenMP default.
  int threads = 0;
};

struct EnsembleResult {
  std::shared_ptr<const ModeSet> modes;
  std::vector<std::uint64_t> seeds;
  std::vector<MomentTable> tables;
  /// One (samples x tracked) matrix per snapshot, rows in seed order.
  std::vector<Eigen::MatrixXcd> tracked;
};

/// Seed of member i.
inline std::uint64_t member_seed(std::uint64_t base_seed, std::int64_t i) {
  return base_seed + static_cast<std::uint64_t>(i);
}

EnsembleResult run_ensemble(std::shared_ptr<const ModeSet> modes, const SpectrumFamily& f, NoiseLaw law,
                            const EvolveConfig& cfg, std::int64_t M, std::uint64_t base_seed,
                            const EnsembleOptions& options = {});

struct JointMomentQuery {
  std::vector<WaveVector> modes;
  std::vector<int> p;
  std::vector<int> q;
};

struct Estimate {
  Complex mean;
  double stderr_of_mean = 0.0;
};

/// Sample mean of prod_j A_{k_j}^{p_j} conj(A_{k_j})^{q_j}.
Estimate joint_moment(const std::vector<WaveField>& samples, const JointMomentQuery& q);

/// Same, on a (samples x r) matrix whose column j holds A_{k_j}.
Estimate joint_moment(const Eigen::MatrixXcd& samples, const std::vector<int>& p, const std::vector<int>& q);

struct ChaosDefect {
  /// max over patterns of |joint moment - factorized prediction| / scale.
  double defect = 0.0;
  /// Standard error of the normalized moment at the maximizing pattern.
  double stderr_of_defect = 0.0;
  /// max over patterns of |difference| / standard error.
  double max_z = 0.0;
  std::vector<int> p;
  std::vector<int> q;
};

/// Propagation-of-chaos defect over all exponent patterns with
/// 1 <= sum_j (p_j + q_j) <= 4. The factorized
/// prediction is prod_j [p_j == q_j] E|A_{k_j}|^{2 p_j}; the scale is
/// prod_j (E|A_{k_j}|^2)^{(p_j + q_j) / 2}.
ChaosDefect chaos_defect(const Eigen::MatrixXcd& samples);

ChaosDefect chaos_defect(const std::vector<WaveField>& samples, const std::vector<WaveVector>& modes);

/// Columns: t, m_1..m_d, mean, stderr, M.
void write_moment_csv(std::ostream& os, const ModeSet& modes, const std::vector<MomentTable>& tables);

}  // namespace wavekin

#endif  // WAVEKIN_ENSEMBLE_HPP
