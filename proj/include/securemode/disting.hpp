#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "securemode/geocontrol.hpp"
#include "securemode/model.hpp"
#include "securemode/subspace.hpp"

namespace securemode {

/// Raised when a secure test is requested with 2σ >= p.
class BoundError : public Error {
 public:
  using Error::Error;
};

enum class VerdictKind { input_generic, autonomous, sigma_secure_autonomous, sigma_rho_secure_controlled };

inline std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::input_generic: return "input_generic";
    case VerdictKind::autonomous: return "autonomous";
    case VerdictKind::sigma_secure_autonomous: return "sigma_secure_autonomous";
    case VerdictKind::sigma_rho_secure_controlled: return "sigma_rho_secure_controlled";
  }
  return "unknown";
}

/// Initial state and sensor attacks that make two modes produce identical
/// corrupted outputs. Wi, Wj are (samples x p) and supported on gamma_i,
/// gamma_j at every sample.
template <Scalar T>
struct Witness {
  Matrix<T> x0;  ///< (x0_i, x0_j), 2n x 1
  IndexSet gamma;
  IndexSet gamma_i;
  IndexSet gamma_j;
  Matrix<T> Wi;
  Matrix<T> Wj;
};

/// Rank of the sensor-restricted observability stack for one Γ.
struct RankEntry {
  IndexSet gamma;
  std::size_t rank = 0;
};

template <Scalar T>
struct Verdict {
  VerdictKind kind{};
  std::string i;
  std::string j;
  bool result = false;
  std::optional<AttackPattern> failing_pattern;
  std::optional<Witness<T>> witness;
  std::size_t checked_patterns = 0;
  std::vector<RankEntry> ranks;
  std::optional<int> failed_condition;  ///< controlled test: 1 or 2
};

template <Scalar T>
Verdict<T> make_verdict(VerdictKind kind, const std::string& i, const std::string& j) {
  Verdict<T> v;
  v.kind = kind;
  v.i = i;
  v.j = j;
  return v;
}

struct DecideOptions {
  bool exhaustive = false;
};

inline void check_sensor_bound(std::size_t sigma, std::size_t p) {
  if (2 * sigma >= p)
    throw BoundError("sensor attack budget violates 2*sigma < p (sigma=" + std::to_string(sigma) +
                     ", p=" + std::to_string(p) + ")");
}

/// Input-generic distinguishability: M_ij (nominal inputs, horizon 2n) is not
/// identically zero.
template <Scalar T>
Verdict<T> input_generic_distinguishable(const LinearMode<T>& si, const LinearMode<T>& sj) {
  if (si.m() == 0)
    throw Error("modes " + si.id + "/" + sj.id + " have no inputs; use the autonomous test");
  const auto pair = build_augmented(si, sj);
  auto v = make_verdict<T>(VerdictKind::input_generic, si.id, sj.id);
  v.result = !markov_matrices(pair).M_U.is_zero();
  v.checked_patterns = 1;
  return v;
}

/// Nominal autonomous distinguishability: rank(O_ij) = 2n.
template <Scalar T>
Verdict<T> autonomous_distinguishable(const LinearMode<T>& si, const LinearMode<T>& sj) {
  LinearMode<T> ai{si.id, si.A, Matrix<T>(si.n(), 0), si.C};
  LinearMode<T> aj{sj.id, sj.A, Matrix<T>(sj.n(), 0), sj.C};
  const auto pair = build_augmented(ai, aj);
  auto v = make_verdict<T>(VerdictKind::autonomous, si.id, sj.id);
  const std::size_t r = rank(observability_matrix(pair));
  v.ranks.push_back({{}, r});
  v.result = r == pair.state_dim();
  v.checked_patterns = 1;
  return v;
}

/// Observability stack of the pairs (A_i, C_i without Γ rows), (A_j, C_j
/// without Γ rows), horizon 2n.
template <Scalar T>
Matrix<T> restricted_observability(const AugmentedPair<T>& pair, const IndexSet& gamma) {
  return observability_matrix(pair.A, restrict_rows(pair.C, gamma), pair.horizon());
}

/// Builds attacks that cancel O_ij x0 on the sensors in Γ: the lowest σ
/// sensors of Γ go to mode i (W_i = -v there), the rest to mode j (W_j = v),
/// so Y_i - Y_j = O_ij x0 + W_i - W_j = 0.
template <Scalar T>
Witness<T> witness_construct(const AugmentedPair<T>& pair, const IndexSet& gamma, const Matrix<T>& x0,
                             std::size_t sigma) {
  validate_index_set(gamma, pair.p(), "sensor set");
  if (gamma.size() > 2 * sigma)
    throw Error("witness: |Gamma|=" + std::to_string(gamma.size()) + " exceeds 2*sigma=" + std::to_string(2 * sigma));
  if (x0.rows() != pair.state_dim() || x0.cols() != 1) throw DimensionError("witness: x0 shape " + x0.shape());
  if (x0.is_zero()) throw Error("witness: x0 must be nonzero");
  const Matrix<T> restricted = restricted_observability(pair, gamma);
  if (!is_negligible(Matrix<T>(restricted * x0), max_abs(restricted) * max_abs(x0)))
    throw Error("witness: x0 is not in the kernel of the sensor-restricted observability matrix");

  const std::size_t tau = pair.horizon(), p = pair.p();
  const Matrix<T> v = observability_matrix(pair) * x0;

  Witness<T> w;
  w.x0 = x0;
  w.gamma = gamma;
  const std::size_t split = std::min(sigma, gamma.size());
  w.gamma_i.assign(gamma.begin(), gamma.begin() + static_cast<std::ptrdiff_t>(split));
  w.gamma_j.assign(gamma.begin() + static_cast<std::ptrdiff_t>(split), gamma.end());
  w.Wi = Matrix<T>(tau, p);
  w.Wj = Matrix<T>(tau, p);
  for (std::size_t t = 0; t < tau; ++t) {
    for (auto k : w.gamma_i) w.Wi(t, k) = -v(t * p + k, 0);
    for (auto k : w.gamma_j) w.Wj(t, k) = v(t * p + k, 0);
  }
  return w;
}

/// σ-secure distinguishability of two autonomous modes: for every sensor set
/// Γ with |Γ| <= 2σ the restricted observability stack has rank 2n. Removing
/// more rows can only lower the rank, so by default only |Γ| = 2σ is checked.
template <Scalar T>
Verdict<T> sigma_secure_autonomous(const LinearMode<T>& si, const LinearMode<T>& sj, std::size_t sigma,
                                   const DecideOptions& opts = {}) {
  check_sensor_bound(sigma, si.p());
  LinearMode<T> ai{si.id, si.A, Matrix<T>(si.n(), 0), si.C};
  LinearMode<T> aj{sj.id, sj.A, Matrix<T>(sj.n(), 0), sj.C};
  const auto pair = build_augmented(ai, aj);
  const std::size_t max_gamma = std::min(2 * sigma, pair.p() - 1);
  const auto gammas = opts.exhaustive ? subsets_up_to(pair.p(), max_gamma) : subsets_of_size(pair.p(), max_gamma);

  auto v = make_verdict<T>(VerdictKind::sigma_secure_autonomous, si.id, sj.id);
  v.result = true;
  for (const auto& gamma : gammas) {
    const Matrix<T> O = restricted_observability(pair, gamma);
    const std::size_t r = rank(O);
    v.ranks.push_back({gamma, r});
    ++v.checked_patterns;
    if (r < pair.state_dim() && v.result) {
      v.result = false;
      v.failing_pattern = AttackPattern{gamma, {}, {}};
      const Matrix<T> K = kernel(O).basis();
      v.witness = witness_construct(pair, gamma, K.col(0), sigma);
    }
  }
  return v;
}

/// (Δ_i, Δ_j) pairs to examine. Condition 1 is monotone in Δ_j and condition
/// 2 in Δ_i, so the pruned set keeps every pair where at least one side has
/// the full budget ρ.
inline std::vector<std::pair<IndexSet, IndexSet>> actuator_pairs(std::size_t m, std::size_t rho, bool exhaustive) {
  const auto all = subsets_up_to(m, rho);
  std::vector<std::pair<IndexSet, IndexSet>> out;
  for (const auto& di : all)
    for (const auto& dj : all)
      if (exhaustive || di.size() == rho || dj.size() == rho) out.emplace_back(di, dj);
  return out;
}

/// σρ-secure distinguishability of two controlled modes: for every (Γ, Δ_i,
/// Δ_j) within budget, neither
///   Im(B_ij) + Im(Bhat_i) ⊆ W_{ij,Γ} + Im(Bhat_j)   (condition 1)
/// nor the same with i and j swapped (condition 2) holds. The first failing
/// tuple in enumeration order is reported.
template <Scalar T>
Verdict<T> sigma_rho_secure_controlled(const LinearMode<T>& si, const LinearMode<T>& sj, std::size_t sigma,
                                       std::size_t rho, const DecideOptions& opts = {}) {
  check_sensor_bound(sigma, si.p());
  if (rho > si.m())
    throw Error("actuator budget rho=" + std::to_string(rho) + " exceeds m=" + std::to_string(si.m()));
  const std::size_t p = si.p();
  const auto gammas = opts.exhaustive ? subsets_up_to(p, 2 * sigma) : subsets_of_size(p, 2 * sigma);
  const auto deltas = actuator_pairs(si.m(), rho, opts.exhaustive);

  auto v = make_verdict<T>(VerdictKind::sigma_rho_secure_controlled, si.id, sj.id);
  v.result = true;
  for (const auto& gamma : gammas) {
    for (const auto& [di, dj] : deltas) {
      const auto pair = build_augmented(si, sj, di, dj);
      const Subspace<T> W = pair_invariant(pair, gamma).W;
      ++v.checked_patterns;
      int failed = 0;
      if (attack_absorbs(W, pair.B, pair.Bhat_i, pair.Bhat_j))
        failed = 1;
      else if (attack_absorbs(W, pair.B, pair.Bhat_j, pair.Bhat_i))
        failed = 2;
      if (failed != 0) {
        v.result = false;
        v.failing_pattern = AttackPattern{gamma, di, dj};
        v.failed_condition = failed;
        return v;
      }
    }
  }
  return v;
}

struct AnalysisOptions {
  std::size_t sigma = 0;
  std::size_t rho = 0;
  bool autonomous = false;  ///< treat the modes as autonomous (ignore B)
  bool exhaustive = false;
  std::optional<std::pair<std::string, std::string>> only_pair;
};

template <Scalar T>
struct PairReport {
  std::string i;
  std::string j;
  std::vector<Verdict<T>> verdicts;
  VerdictKind decisive{};  ///< which verdict decides this pair's entry in the overall flag
  bool distinguishable = false;
};

template <Scalar T>
struct Report {
  std::size_t sigma = 0;
  std::size_t rho = 0;
  bool autonomous = false;
  bool exhaustive = false;
  std::vector<PairReport<T>> pairs;
  bool reconstructable = false;  ///< AND over pairs
  std::vector<std::string> warnings;
};

/// Runs the applicable deciders on every unordered pair. Autonomous analysis
/// (or m = 0) is decided by σ-secure distinguishability; controlled analysis
/// by σρ-secure distinguishability.
template <Scalar T>
Report<T> pairwise_report(const SwitchingSystem<T>& sys, const AnalysisOptions& opts) {
  if (sys.modes.size() < 2) throw Error("at least two modes required");
  for (const auto& md : sys.modes) md.validate();
  check_sensor_bound(opts.sigma, sys.p());
  const bool autonomous = opts.autonomous || sys.m() == 0;
  if (!autonomous && opts.rho > sys.m())
    throw Error("actuator budget rho=" + std::to_string(opts.rho) + " exceeds m=" + std::to_string(sys.m()));

  Report<T> rep;
  rep.sigma = opts.sigma;
  rep.rho = autonomous ? 0 : opts.rho;
  rep.autonomous = autonomous;
  rep.exhaustive = opts.exhaustive;
  if (sys.dwell < 2 * sys.n())
    rep.warnings.push_back("dwell time " + std::to_string(sys.dwell) + " is shorter than the 2n=" +
                           std::to_string(2 * sys.n()) + " samples the verdicts assume");
  if (opts.only_pair) {
    sys.mode(opts.only_pair->first);
    sys.mode(opts.only_pair->second);
    if (opts.only_pair->first == opts.only_pair->second) throw Error("--pair needs two different modes");
  }

  const DecideOptions dopts{opts.exhaustive};
  rep.reconstructable = true;
  for (std::size_t a = 0; a < sys.modes.size(); ++a) {
    for (std::size_t b = a + 1; b < sys.modes.size(); ++b) {
      const auto& si = sys.modes[a];
      const auto& sj = sys.modes[b];
      if (opts.only_pair) {
        const auto& [x, y] = *opts.only_pair;
        if (!((si.id == x && sj.id == y) || (si.id == y && sj.id == x))) continue;
      }
      PairReport<T> pr{si.id, sj.id, {}, {}, false};
      pr.verdicts.push_back(autonomous_distinguishable(si, sj));
      pr.verdicts.push_back(sigma_secure_autonomous(si, sj, opts.sigma, dopts));
      if (autonomous) {
        pr.decisive = VerdictKind::sigma_secure_autonomous;
        pr.distinguishable = pr.verdicts.back().result;
      } else {
        pr.verdicts.push_back(input_generic_distinguishable(si, sj));
        pr.verdicts.push_back(sigma_rho_secure_controlled(si, sj, opts.sigma, opts.rho, dopts));
        pr.decisive = VerdictKind::sigma_rho_secure_controlled;
        pr.distinguishable = pr.verdicts.back().result;
      }
      rep.reconstructable = rep.reconstructable && pr.distinguishable;
      rep.pairs.push_back(std::move(pr));
    }
  }
  return rep;
}

template <Scalar T>
const Verdict<T>& find_verdict(const PairReport<T>& pr, VerdictKind kind) {
  for (const auto& v : pr.verdicts)
    if (v.kind == kind) return v;
  throw Error("pair " + pr.i + "/" + pr.j + " has no " + to_string(kind) + " verdict");
}

}  // namespace securemode
