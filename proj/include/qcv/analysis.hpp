#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qcv/errors.hpp"
#include "qcv/protocol.hpp"

namespace qcv {

inline constexpr int kExactCap = 3;  // exact enumeration is meant for desk-scale N

// Binomial point estimate with a normal-approximation 95% interval. The
// interval is approximate near 0 and 1; exact enumeration is the authority
// for claims there.
struct Estimate {
  double mean = 0.0;
  std::uint64_t trials = 0;
  double ci95_halfwidth = 0.0;
  std::uint64_t seed = 0;
};

inline double ci95_halfwidth(double mean, std::uint64_t trials) {
  return 1.96 * std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials));
}

inline Estimate estimate_pacc(Variant variant, const XZHamiltonian& ham,
                              const ProverStrategy& strategy, std::uint64_t trials,
                              std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("estimate_pacc: trials must be positive");
  ResolvedStrategy rs = resolve_strategy(strategy, ham);
  RandomSource root(seed);
  std::uint64_t accepts = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = root.substream(t);
    if (run_protocol_resolved(variant, ham, rs, rng).verdict == Verdict::accept) ++accepts;
  }
  double mean = static_cast<double>(accepts) / static_cast<double>(trials);
  return {mean, trials, ci95_halfwidth(mean, trials), seed};
}

// A finite law over integer tuples. Keys are ordered so iteration (and any
// serialization) is deterministic.
class DiscreteDistribution {
 public:
  void add(std::vector<int> outcome, double prob) { probs_[std::move(outcome)] += prob; }

  double prob(const std::vector<int>& outcome) const {
    auto it = probs_.find(outcome);
    return it == probs_.end() ? 0.0 : it->second;
  }

  const std::map<std::vector<int>, double>& entries() const { return probs_; }

  double total() const {
    double t = 0.0;
    for (const auto& [k, p] : probs_) t += p;
    return t;
  }

  std::vector<std::string> validate() const {
    std::vector<std::string> errors;
    for (const auto& [k, p] : probs_)
      if (p < -1e-12) errors.push_back("negative probability");
    if (std::abs(total() - 1.0) > 1e-9) errors.push_back("probabilities do not sum to 1");
    return errors;
  }

 private:
  std::map<std::vector<int>, double> probs_;
};

// Total variation distance (1/2) sum |p - q| over the union of supports.
inline double tvd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (!p.validate().empty() || !q.validate().empty())
    throw std::invalid_argument("tvd: invalid distribution");
  double acc = 0.0;
  for (const auto& [k, pp] : p.entries()) acc += std::abs(pp - q.prob(k));
  for (const auto& [k, qq] : q.entries())
    if (p.prob(k) == 0.0) acc += std::abs(qq);
  return 0.5 * acc;
}

namespace detail {

inline void require_exact_cap(const XZHamiltonian& ham) {
  if (ham.n_qubits > kExactCap)
    throw CapExceededError("exact enumeration needs N <= " + std::to_string(kExactCap) +
                           ", got " + std::to_string(ham.n_qubits));
}

// Acceptance probability over the verifier's term draw, given corrected bits.
inline double accept_weight(const XZHamiltonian& ham, const std::vector<int>& mprime) {
  double acc = 0.0;
  for (const XZTerm& t : ham.terms)
    if (parity_accepts(t.s, mprime[t.i - 1], mprime[t.j - 1])) acc += t.p;
  return acc;
}

// Same under the ZK rule: pairs other than (a, b) always accept.
inline double accept_weight_zk(const XZHamiltonian& ham, const std::vector<int>& mprime, int a,
                               int b) {
  double acc = 0.0;
  for (const XZTerm& t : ham.terms) {
    bool hit = t.i == a && t.j == b;
    if (!hit || parity_accepts(t.s, mprime[a - 1], mprime[b - 1])) acc += t.p;
  }
  return acc;
}

inline std::vector<int> corrected_all(const std::vector<int>& m, int h,
                                      const std::vector<int>& x, const std::vector<int>& z) {
  std::vector<int> mp(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) mp[j] = m[j] ^ (h ? z[j] : x[j]);
  return mp;
}

// Enumerates the prover's Bell-measurement outcome law on local ⊗ received,
// applying the strategy's flip masks. Returns (prob, x, z) triples.
struct AnswerBranch {
  double prob;
  std::vector<int> x;
  std::vector<int> z;
};

inline std::vector<AnswerBranch> enumerate_answers(const ResolvedStrategy& rs,
                                                   const StateVector& received) {
  int n = received.n_qubits();
  if (!rs.teleports()) return {AnswerBranch{1.0, rs.const_x, rs.const_z}};
  std::vector<Branch> branches = initial_branch(tensor(*rs.local, received));
  for (int j = 1; j <= n; ++j) branch_bell(branches, j, n + j);
  std::vector<AnswerBranch> out;
  out.reserve(branches.size());
  for (const Branch& br : branches) {
    AnswerBranch ab{br.prob, std::vector<int>(n), std::vector<int>(n)};
    for (int j = 0; j < n; ++j) {
      ab.x[j] = br.outcomes[2 * j] ^ (rs.mask_x.empty() ? 0 : rs.mask_x[j]);
      ab.z[j] = br.outcomes[2 * j + 1] ^ (rs.mask_z.empty() ? 0 : rs.mask_z[j]);
    }
    out.push_back(std::move(ab));
  }
  return out;
}

// Leaf law of the virtual protocols on the Bell-pair layout: outcome order is
// fixed by `prover_first` (virtual1/virtual-zk measure the prover's side
// before the center's, virtual2 the other way around). Each leaf carries
// (x, z, m) and its joint probability under basis h.
struct VirtualLeaf {
  double prob;
  std::vector<int> x;
  std::vector<int> z;
  std::vector<int> m;
};

inline std::vector<VirtualLeaf> enumerate_virtual(const ResolvedStrategy& rs, int n, int h,
                                                  bool prover_first) {
  std::vector<Branch> branches = initial_branch(virtual_initial_state(rs, n));
  auto bell_stage = [&](std::vector<Branch>& b) {
    if (!rs.teleports()) return;
    for (int j = 1; j <= n; ++j) branch_bell(b, 2 * n + j, n + j);
  };
  auto center_stage = [&](std::vector<Branch>& b) {
    for (int j = 1; j <= n; ++j) branch_measure(b, j, h);
  };
  if (prover_first) {
    bell_stage(branches);
    center_stage(branches);
  } else {
    center_stage(branches);
    bell_stage(branches);
  }
  int bell_outcomes = rs.teleports() ? 2 * n : 0;
  std::vector<VirtualLeaf> leaves;
  leaves.reserve(branches.size());
  for (const Branch& br : branches) {
    VirtualLeaf leaf{br.prob, std::vector<int>(n), std::vector<int>(n), std::vector<int>(n)};
    int bell_at = prover_first ? 0 : n;
    int center_at = prover_first ? bell_outcomes : 0;
    for (int j = 0; j < n; ++j) {
      if (rs.teleports()) {
        leaf.x[j] = br.outcomes[bell_at + 2 * j] ^ (rs.mask_x.empty() ? 0 : rs.mask_x[j]);
        leaf.z[j] = br.outcomes[bell_at + 2 * j + 1] ^ (rs.mask_z.empty() ? 0 : rs.mask_z[j]);
      } else {
        leaf.x[j] = rs.const_x[j];
        leaf.z[j] = rs.const_z[j];
      }
      leaf.m[j] = br.outcomes[center_at + j];
    }
    leaves.push_back(std::move(leaf));
  }
  return leaves;
}

}  // namespace detail

// Exact acceptance probability by full enumeration of keys, measurement
// branches, and check pairs. Restricted to N <= kExactCap.
inline double exact_pacc(Variant variant, const XZHamiltonian& ham,
                         const ProverStrategy& strategy) {
  detail::require_exact_cap(ham);
  ResolvedStrategy rs = resolve_strategy(strategy, ham);
  int n = ham.n_qubits;
  const std::size_t dim = std::size_t{1} << n;

  switch (variant) {
    case Variant::posthoc: {
      if (!rs.teleports() || !rs.mask_x.empty() || !rs.local)
        throw std::invalid_argument("posthoc needs a submitted state, not an answer strategy");
      double acc = 0.0;
      for (int h : {0, 1}) {
        StateVector rho = *rs.local;
        if (h == 1)
          for (int q = 1; q <= n; ++q) rho.apply_h(q);
        for (std::size_t k = 0; k < dim; ++k) {
          double pk = std::norm(rho.amplitudes()[k]);
          if (pk == 0.0) continue;
          std::vector<int> m(n);
          for (int j = 1; j <= n; ++j) m[j - 1] = qubit_bit(k, j, n);
          acc += 0.5 * pk * detail::accept_weight(ham, m);
        }
      }
      return acc;
    }
    case Variant::main:
    case Variant::zk: {
      auto pairs = all_pairs(n);
      double acc = 0.0;
      for (int h : {0, 1}) {
        for (std::size_t k = 0; k < dim; ++k) {
          std::vector<int> m(n);
          for (int j = 1; j <= n; ++j) m[j - 1] = qubit_bit(k, j, n);
          double key_w = 0.5 / static_cast<double>(dim);
          auto answers = detail::enumerate_answers(rs, prepare_bb84(h, m));
          for (const auto& ab : answers) {
            std::vector<int> mp = detail::corrected_all(m, h, ab.x, ab.z);
            if (variant == Variant::main) {
              acc += key_w * ab.prob * detail::accept_weight(ham, mp);
            } else {
              for (const auto& [a, b] : pairs)
                acc += key_w * ab.prob / static_cast<double>(pairs.size()) *
                       detail::accept_weight_zk(ham, mp, a, b);
            }
          }
        }
      }
      return acc;
    }
    case Variant::virtual1:
    case Variant::virtual2:
    case Variant::virtual_zk: {
      bool prover_first = variant != Variant::virtual2;
      auto pairs = all_pairs(n);
      double acc = 0.0;
      for (int h : {0, 1}) {
        auto leaves = detail::enumerate_virtual(rs, n, h, prover_first);
        for (const auto& leaf : leaves) {
          std::vector<int> mp = detail::corrected_all(leaf.m, h, leaf.x, leaf.z);
          if (variant == Variant::virtual_zk) {
            for (const auto& [a, b] : pairs)
              acc += 0.5 * leaf.prob / static_cast<double>(pairs.size()) *
                     detail::accept_weight_zk(ham, mp, a, b);
          } else {
            acc += 0.5 * leaf.prob * detail::accept_weight(ham, mp);
          }
        }
      }
      return acc;
    }
  }
  throw std::invalid_argument("unknown protocol variant");
}

enum class ViewSource { virtual_zk_honest, simulator };

// Tuple layout of a verifier view: (h, a, b, m_a, m_b, x_1..x_N, z_1..z_N).
inline std::vector<int> view_tuple(const ZkView& v) {
  std::vector<int> t{v.h, v.a, v.b, v.m_a, v.m_b};
  t.insert(t.end(), v.x.begin(), v.x.end());
  t.insert(t.end(), v.z.begin(), v.z.end());
  return t;
}

// Exact law of the ZK verifier view, from either the honest virtual-zk run
// or the simulator. Theorem-level claim: these two coincide.
inline DiscreteDistribution view_distribution_exact(ViewSource source,
                                                    const XZHamiltonian& ham) {
  detail::require_exact_cap(ham);
  int n = ham.n_qubits;
  auto pairs = all_pairs(n);
  DiscreteDistribution dist;

  if (source == ViewSource::virtual_zk_honest) {
    ResolvedStrategy rs = resolve_strategy(ProverStrategy::honest(), ham);
    for (int h : {0, 1}) {
      auto leaves = detail::enumerate_virtual(rs, n, h, /*prover_first=*/true);
      for (const auto& leaf : leaves) {
        for (const auto& [a, b] : pairs) {
          ZkView v{h, a, b, leaf.m[a - 1], leaf.m[b - 1], leaf.x, leaf.z};
          dist.add(view_tuple(v), 0.5 * leaf.prob / static_cast<double>(pairs.size()));
        }
      }
    }
    return dist;
  }

  StateVector ground = ground_state(ham).state;
  const std::size_t dim = std::size_t{1} << n;
  for (int h : {0, 1}) {
    for (std::size_t xk = 0; xk < dim; ++xk) {
      for (std::size_t zk = 0; zk < dim; ++zk) {
        std::vector<int> x(n), z(n);
        for (int j = 1; j <= n; ++j) {
          x[j - 1] = qubit_bit(xk, j, n);
          z[j - 1] = qubit_bit(zk, j, n);
        }
        StateVector twisted = ground;
        for (int j = 1; j <= n; ++j) {
          if (z[j - 1]) twisted.apply_z(j);
          if (x[j - 1]) twisted.apply_x(j);
        }
        double base = 0.5 / static_cast<double>(dim * dim * pairs.size());
        for (const auto& [a, b] : pairs) {
          auto probs = reduced_density(twisted, a, b).measure_probs(h);
          for (int k = 0; k < 4; ++k) {
            if (probs[k] <= 0.0) continue;
            ZkView v{h, a, b, k >> 1, k & 1, x, z};
            dist.add(view_tuple(v), base * probs[k]);
          }
        }
      }
    }
  }
  return dist;
}

inline DiscreteDistribution view_distribution_sampled(ViewSource source,
                                                      const XZHamiltonian& ham,
                                                      std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("view_distribution_sampled: trials must be positive");
  DiscreteDistribution dist;
  double w = 1.0 / static_cast<double>(trials);
  RandomSource root(seed);
  if (source == ViewSource::virtual_zk_honest) {
    ResolvedStrategy rs = resolve_strategy(ProverStrategy::honest(), ham);
    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomSource rng = root.substream(t);
      TrialRecord rec = run_protocol_resolved(Variant::virtual_zk, ham, rs, rng);
      dist.add(view_tuple(view_of(rec)), w);
    }
  } else {
    StateVector ground = ground_state(ham).state;
    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomSource rng = root.substream(t);
      dist.add(view_tuple(zk_simulator_from_ground(ham, ground, rng)), w);
    }
  }
  return dist;
}

// Exact law of the corrected bits m' in the main protocol, conditioned on h.
// Completeness hinges on this matching the basis-h law of the ground state.
inline DiscreteDistribution corrected_bits_law_exact(const XZHamiltonian& ham,
                                                     const ProverStrategy& strategy, int h) {
  detail::require_exact_cap(ham);
  ResolvedStrategy rs = resolve_strategy(strategy, ham);
  int n = ham.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  DiscreteDistribution dist;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<int> m(n);
    for (int j = 1; j <= n; ++j) m[j - 1] = qubit_bit(k, j, n);
    auto answers = detail::enumerate_answers(rs, prepare_bb84(h, m));
    for (const auto& ab : answers)
      dist.add(detail::corrected_all(m, h, ab.x, ab.z),
               ab.prob / static_cast<double>(dim));
  }
  return dist;
}

// Born law of measuring every qubit of `state` in basis h.
inline DiscreteDistribution measurement_law(const StateVector& state, int h) {
  StateVector rotated = state;
  if (h == 1)
    for (int q = 1; q <= state.n_qubits(); ++q) rotated.apply_h(q);
  DiscreteDistribution dist;
  int n = state.n_qubits();
  for (std::size_t k = 0; k < rotated.dim(); ++k) {
    double p = std::norm(rotated.amplitudes()[k]);
    if (p == 0.0) continue;
    std::vector<int> bits(n);
    for (int j = 1; j <= n; ++j) bits[j - 1] = qubit_bit(k, j, n);
    dist.add(std::move(bits), p);
  }
  return dist;
}

struct SweepRow {
  std::string name;
  Estimate estimate;
  bool breach = false;  // lower CI bound above the spectral ceiling
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double ceiling = 0.0;  // 1 - lambda_min
  double max_mean = 0.0;
  bool any_breach = false;
};

// Estimates p_acc for every strategy in the family and flags any whose lower
// 95% CI bound exceeds 1 - lambda_min (which no prover can beat).
inline SweepResult adversary_sweep(Variant variant, const XZHamiltonian& ham,
                                   const std::vector<std::pair<std::string, ProverStrategy>>& family,
                                   std::uint64_t trials, std::uint64_t seed) {
  if (family.empty()) throw std::invalid_argument("adversary_sweep: empty strategy family");
  SweepResult result;
  result.ceiling = 1.0 - ground_state(ham).lambda_min;
  RandomSource root(seed);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& [name, strategy] = family[k];
    Estimate est = estimate_pacc(variant, ham, strategy, trials, root.substream(k).seed());
    SweepRow row{name, est, est.mean - est.ci95_halfwidth > result.ceiling + 1e-9};
    result.max_mean = std::max(result.max_mean, est.mean);
    result.any_breach = result.any_breach || row.breach;
    result.rows.push_back(std::move(row));
  }
  return result;
}

// Gap amplification: k independent runs per decision, accept when the
// accepted fraction reaches the threshold.
inline Estimate parallel_repetition(Variant variant, const XZHamiltonian& ham,
                                    const ProverStrategy& strategy, int k, double threshold,
                                    std::uint64_t trials, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("parallel_repetition: k must be positive");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("parallel_repetition: threshold must lie in (0, 1)");
  if (trials < 1) throw std::invalid_argument("parallel_repetition: trials must be positive");
  ResolvedStrategy rs = resolve_strategy(strategy, ham);
  RandomSource root(seed);
  std::uint64_t accepts = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = root.substream(t);
    int run_accepts = 0;
    for (int r = 0; r < k; ++r)
      if (run_protocol_resolved(variant, ham, rs, rng).verdict == Verdict::accept) ++run_accepts;
    if (static_cast<double>(run_accepts) >= threshold * k - 1e-12) ++accepts;
  }
  double mean = static_cast<double>(accepts) / static_cast<double>(trials);
  return {mean, trials, ci95_halfwidth(mean, trials), seed};
}

}  // namespace qcv
