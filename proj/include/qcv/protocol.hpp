#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcv/density.hpp"
#include "qcv/errors.hpp"
#include "qcv/hamiltonian.hpp"
#include "qcv/random.hpp"
#include "qcv/state.hpp"

namespace qcv {

// The six executable protocols. posthoc is the baseline where a state is
// handed to the verifier directly; virtual1/virtual2 are the intermediate
// Bell-pair forms whose equivalence carries the soundness argument; main is
// the trusted-center protocol; zk and virtual_zk are the zero-knowledge
// variants where the verifier learns only two of the center's bits.
enum class Variant { posthoc, virtual1, virtual2, main, zk, virtual_zk };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::posthoc: return "posthoc";
    case Variant::virtual1: return "virtual1";
    case Variant::virtual2: return "virtual2";
    case Variant::main: return "main";
    case Variant::zk: return "zk";
    case Variant::virtual_zk: return "virtual-zk";
  }
  return "?";
}

inline std::optional<Variant> variant_from_string(const std::string& s) {
  if (s == "posthoc") return Variant::posthoc;
  if (s == "virtual1") return Variant::virtual1;
  if (s == "virtual2") return Variant::virtual2;
  if (s == "main") return Variant::main;
  if (s == "zk") return Variant::zk;
  if (s == "virtual-zk") return Variant::virtual_zk;
  return std::nullopt;
}

// The trusted center's secret: the basis bit h and the pad bits m, plus the
// revealed pair (a, b) in ZK mode. Sampled from N and a random source alone;
// center_sample has no instance parameter, which is what makes the center's
// messages instance-independent.
struct CenterKey {
  int h = 0;
  std::vector<int> m;
  std::optional<std::pair<int, int>> zk_pair;
};

// The prover's 2N-bit report (x, z) of teleportation byproducts.
struct ProverAnswer {
  std::vector<int> x;
  std::vector<int> z;
};

// Lexicographic list of the N-choose-2 ordered pairs (a, b), a < b.
inline std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 1; a < n; ++a)
    for (int b = a + 1; b <= n; ++b) pairs.emplace_back(a, b);
  return pairs;
}

inline CenterKey center_sample(int n, bool zk, RandomSource& rng) {
  if (n < 2) throw std::invalid_argument("center_sample: N must be at least 2");
  CenterKey key;
  key.h = rng.bit();
  key.m = rng.bits(static_cast<std::size_t>(n));
  if (zk) {
    auto pairs = all_pairs(n);
    key.zk_pair = pairs[rng.index(pairs.size())];
  }
  return key;
}

// Prover strategies. The honest ones perform exactly N Bell measurements of
// a locally held state against the received qubits; byproduct_flip reports
// the honest answer XORed with fixed masks; constant ignores the qubits.
struct ProverStrategy {
  enum class Kind { honest, honest_with_state, byproduct_flip, constant };

  Kind kind = Kind::honest;
  std::optional<StateVector> state;   // honest_with_state
  std::vector<int> mask_x, mask_z;    // byproduct_flip
  std::vector<int> const_x, const_z;  // constant

  static ProverStrategy honest() { return ProverStrategy{}; }

  static ProverStrategy with_state(StateVector s) {
    ProverStrategy st;
    st.kind = Kind::honest_with_state;
    st.state = std::move(s);
    return st;
  }

  static ProverStrategy byproduct_flip(std::vector<int> mx, std::vector<int> mz) {
    ProverStrategy st;
    st.kind = Kind::byproduct_flip;
    st.mask_x = std::move(mx);
    st.mask_z = std::move(mz);
    return st;
  }

  static ProverStrategy constant(std::vector<int> cx, std::vector<int> cz) {
    ProverStrategy st;
    st.kind = Kind::constant;
    st.const_x = std::move(cx);
    st.const_z = std::move(cz);
    return st;
  }
};

inline std::string to_string(ProverStrategy::Kind k) {
  switch (k) {
    case ProverStrategy::Kind::honest: return "honest";
    case ProverStrategy::Kind::honest_with_state: return "honest-with-state";
    case ProverStrategy::Kind::byproduct_flip: return "byproduct-flip";
    case ProverStrategy::Kind::constant: return "constant";
  }
  return "?";
}

// Strategy with the instance-dependent pieces filled in (the honest kinds
// need the ground state). Resolving once per experiment keeps the per-trial
// cost free of eigensolves.
struct ResolvedStrategy {
  ProverStrategy::Kind kind = ProverStrategy::Kind::honest;
  std::optional<StateVector> local;  // state teleported (or submitted in posthoc)
  std::vector<int> mask_x, mask_z;
  std::vector<int> const_x, const_z;

  bool teleports() const { return kind != ProverStrategy::Kind::constant; }
};

inline ResolvedStrategy resolve_strategy(const ProverStrategy& strategy,
                                         const XZHamiltonian& ham) {
  int n = ham.n_qubits;
  ResolvedStrategy rs;
  rs.kind = strategy.kind;
  switch (strategy.kind) {
    case ProverStrategy::Kind::honest:
      rs.local = ground_state(ham).state;
      break;
    case ProverStrategy::Kind::honest_with_state:
      if (!strategy.state) throw std::invalid_argument("honest_with_state: state missing");
      if (strategy.state->n_qubits() != n)
        throw std::invalid_argument("honest_with_state: state has wrong qubit count");
      rs.local = strategy.state;
      break;
    case ProverStrategy::Kind::byproduct_flip:
      if (strategy.mask_x.size() != static_cast<std::size_t>(n) ||
          strategy.mask_z.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("byproduct_flip: masks must have length N");
      rs.local = ground_state(ham).state;
      rs.mask_x = strategy.mask_x;
      rs.mask_z = strategy.mask_z;
      break;
    case ProverStrategy::Kind::constant:
      if (strategy.const_x.size() != static_cast<std::size_t>(n) ||
          strategy.const_z.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("constant: answer bits must have length N");
      rs.const_x = strategy.const_x;
      rs.const_z = strategy.const_z;
      break;
  }
  return rs;
}

// Teleportation measurement of the honest prover: forms local ⊗ received and
// Bell-measures qubit j of the local state against received qubit j.
inline ProverAnswer honest_prover(const StateVector& bb84, const StateVector& local_state,
                                  RandomSource& rng) {
  int n = bb84.n_qubits();
  if (local_state.n_qubits() != n)
    throw std::invalid_argument("honest_prover: local state and received state differ in size");
  StateVector joint = tensor(local_state, bb84);
  ProverAnswer ans;
  ans.x.resize(n);
  ans.z.resize(n);
  for (int j = 1; j <= n; ++j) {
    BellOutcome o = bell_measure_inplace(joint, j, n + j);
    ans.x[j - 1] = o.x;
    ans.z[j - 1] = o.z;
  }
  return ans;
}

// Answer of a resolved strategy upon receiving the BB84 message.
inline ProverAnswer prover_answer(const ResolvedStrategy& rs, const StateVector& bb84,
                                  RandomSource& rng) {
  if (rs.kind == ProverStrategy::Kind::constant) return {rs.const_x, rs.const_z};
  ProverAnswer ans = honest_prover(bb84, *rs.local, rng);
  for (std::size_t j = 0; j < rs.mask_x.size(); ++j) {
    ans.x[j] ^= rs.mask_x[j];
    ans.z[j] ^= rs.mask_z[j];
  }
  return ans;
}

// Byproduct correction  m'_j = m_j XOR (h z_j + (1-h) x_j).
inline std::vector<int> correct_bits(const CenterKey& key, const ProverAnswer& answer,
                                     std::span<const int> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int j : indices) {
    if (j < 1 || j > static_cast<int>(key.m.size()))
      throw std::out_of_range("correct_bits: index outside 1..N");
    int corr = key.h == 1 ? answer.z[j - 1] : answer.x[j - 1];
    out.push_back(key.m[j - 1] ^ corr);
  }
  return out;
}

enum class Verdict { accept, reject };

inline std::string to_string(Verdict v) { return v == Verdict::accept ? "accept" : "reject"; }

// accept iff (-1)^(m'_i + m'_j) == -s
inline bool parity_accepts(int s, int mi, int mj) { return (mi ^ mj) == (s > 0 ? 1 : 0); }

// One full execution. The record is the lab's complete view (in ZK runs the
// verifier itself only ever touches the projection view_of gives).
struct TrialRecord {
  Variant variant = Variant::main;
  CenterKey key;
  ProverAnswer answer;
  std::pair<int, int> check_pair{0, 0};
  std::array<int, 2> corrected{0, 0};
  Verdict verdict = Verdict::reject;
};

// Main-protocol decision: sample (i, j) with probability p_{i,j}, correct the
// two bits, apply the parity rule.
inline TrialRecord verifier_decide(const XZHamiltonian& ham, const CenterKey& key,
                                   const ProverAnswer& answer, RandomSource& rng) {
  if (key.zk_pair) throw std::invalid_argument("verifier_decide: key carries a ZK pair");
  const XZTerm& t = ham.terms[sample_term_index(ham, rng)];
  std::array<int, 2> idx{t.i, t.j};
  std::vector<int> corrected = correct_bits(key, answer, idx);
  TrialRecord rec;
  rec.key = key;
  rec.answer = answer;
  rec.check_pair = {t.i, t.j};
  rec.corrected = {corrected[0], corrected[1]};
  rec.verdict = parity_accepts(t.s, corrected[0], corrected[1]) ? Verdict::accept : Verdict::reject;
  return rec;
}

// ZK decision: the verifier holds only (h, a, b, m_a, m_b). It accepts
// whenever the sampled pair differs from (a, b); otherwise it applies the
// parity rule on the two corrected bits it can compute.
inline TrialRecord verifier_decide_zk(const XZHamiltonian& ham, const CenterKey& key,
                                      const ProverAnswer& answer, RandomSource& rng) {
  if (!key.zk_pair) throw std::invalid_argument("verifier_decide_zk: key has no ZK pair");
  auto [a, b] = *key.zk_pair;
  const XZTerm& t = ham.terms[sample_term_index(ham, rng)];
  std::array<int, 2> idx{a, b};
  std::vector<int> corrected = correct_bits(key, answer, idx);
  TrialRecord rec;
  rec.variant = Variant::zk;
  rec.key = key;
  rec.answer = answer;
  rec.check_pair = {t.i, t.j};
  rec.corrected = {corrected[0], corrected[1]};
  if (t.i != a || t.j != b) {
    rec.verdict = Verdict::accept;
  } else {
    rec.verdict =
        parity_accepts(t.s, corrected[0], corrected[1]) ? Verdict::accept : Verdict::reject;
  }
  return rec;
}

// Re-derives the verdict of a finished trial from its own fields.
inline Verdict reverify(const XZHamiltonian& ham, const TrialRecord& rec) {
  auto [i, j] = rec.check_pair;
  if (rec.key.zk_pair) {
    auto [a, b] = *rec.key.zk_pair;
    if (i != a || j != b) return Verdict::accept;
    std::array<int, 2> idx{a, b};
    std::vector<int> corrected = correct_bits(rec.key, rec.answer, idx);
    const XZTerm& t = ham.terms[find_term(ham, i, j)];
    return parity_accepts(t.s, corrected[0], corrected[1]) ? Verdict::accept : Verdict::reject;
  }
  std::array<int, 2> idx{i, j};
  std::vector<int> corrected = correct_bits(rec.key, rec.answer, idx);
  const XZTerm& t = ham.terms[find_term(ham, i, j)];
  return parity_accepts(t.s, corrected[0], corrected[1]) ? Verdict::accept : Verdict::reject;
}

namespace detail {

// Bell-pair layout shared by the virtual protocols: qubits 1..N are the
// center/verifier halves, N+1..2N the halves sent to the prover, and (for
// teleporting strategies) 2N+1..3N the prover's local state.
inline StateVector virtual_initial_state(const ResolvedStrategy& rs, int n) {
  StateVector base(2 * n);
  StateVector joint = rs.teleports() ? tensor(base, *rs.local) : base;
  for (int j = 1; j <= n; ++j) {
    joint.apply_h(j);
    joint.apply_cnot(j, n + j);
  }
  return joint;
}

inline ProverAnswer virtual_prover_answer(StateVector& joint, const ResolvedStrategy& rs, int n,
                                          RandomSource& rng) {
  if (!rs.teleports()) return {rs.const_x, rs.const_z};
  ProverAnswer ans;
  ans.x.resize(n);
  ans.z.resize(n);
  for (int j = 1; j <= n; ++j) {
    BellOutcome o = bell_measure_inplace(joint, 2 * n + j, n + j);
    ans.x[j - 1] = o.x ^ (rs.mask_x.empty() ? 0 : rs.mask_x[j - 1]);
    ans.z[j - 1] = o.z ^ (rs.mask_z.empty() ? 0 : rs.mask_z[j - 1]);
  }
  return ans;
}

inline std::vector<int> measure_center_halves(StateVector& joint, int n, int h,
                                              RandomSource& rng) {
  std::vector<int> m(n);
  for (int j = 1; j <= n; ++j) m[j - 1] = measure_qubit_inplace(joint, j, h, rng);
  return m;
}

}  // namespace detail

// Runs one trial of any variant. Strategy compatibility: posthoc needs a
// submitted state (honest or honest_with_state); the other variants take any
// strategy. Within a trial, randomness is consumed in the order the protocol
// figures state the steps, so a (seed, variant) pair fixes the transcript.
inline TrialRecord run_protocol_resolved(Variant variant, const XZHamiltonian& ham,
                                         const ResolvedStrategy& rs, RandomSource& rng) {
  int n = ham.n_qubits;
  switch (variant) {
    case Variant::posthoc: {
      if (!rs.teleports() || !rs.local)
        throw std::invalid_argument("posthoc needs a submitted state, not an answer strategy");
      if (!rs.mask_x.empty())
        throw std::invalid_argument("posthoc does not carry byproduct reports");
      StateVector rho = *rs.local;
      CenterKey key;
      key.h = rng.bit();
      key.m = detail::measure_center_halves(rho, n, key.h, rng);  // measures all qubits of rho
      ProverAnswer zeros{std::vector<int>(n, 0), std::vector<int>(n, 0)};
      TrialRecord rec = verifier_decide(ham, key, zeros, rng);
      rec.variant = variant;
      return rec;
    }
    case Variant::main: {
      CenterKey key = center_sample(n, false, rng);
      StateVector bb84 = prepare_bb84(key.h, key.m);
      ProverAnswer ans = prover_answer(rs, bb84, rng);
      TrialRecord rec = verifier_decide(ham, key, ans, rng);
      rec.variant = variant;
      return rec;
    }
    case Variant::zk: {
      CenterKey key = center_sample(n, true, rng);
      StateVector bb84 = prepare_bb84(key.h, key.m);
      ProverAnswer ans = prover_answer(rs, bb84, rng);
      TrialRecord rec = verifier_decide_zk(ham, key, ans, rng);
      rec.variant = variant;
      return rec;
    }
    case Variant::virtual1: {
      int h = rng.bit();
      StateVector joint = detail::virtual_initial_state(rs, n);
      ProverAnswer ans = detail::virtual_prover_answer(joint, rs, n, rng);  // prover first
      CenterKey key;
      key.h = h;
      key.m = detail::measure_center_halves(joint, n, h, rng);
      TrialRecord rec = verifier_decide(ham, key, ans, rng);
      rec.variant = variant;
      return rec;
    }
    case Variant::virtual2: {
      int h = rng.bit();
      StateVector joint = detail::virtual_initial_state(rs, n);
      CenterKey key;
      key.h = h;
      key.m = detail::measure_center_halves(joint, n, h, rng);  // verifier first
      ProverAnswer ans = detail::virtual_prover_answer(joint, rs, n, rng);
      TrialRecord rec = verifier_decide(ham, key, ans, rng);
      rec.variant = variant;
      return rec;
    }
    case Variant::virtual_zk: {
      int h = rng.bit();
      StateVector joint = detail::virtual_initial_state(rs, n);
      ProverAnswer ans = detail::virtual_prover_answer(joint, rs, n, rng);  // prover first
      CenterKey key;
      key.h = h;
      key.m = detail::measure_center_halves(joint, n, h, rng);
      auto pairs = all_pairs(n);
      key.zk_pair = pairs[rng.index(pairs.size())];
      TrialRecord rec = verifier_decide_zk(ham, key, ans, rng);
      rec.variant = variant;
      return rec;
    }
  }
  throw std::invalid_argument("unknown protocol variant");
}

inline TrialRecord run_protocol(Variant variant, const XZHamiltonian& ham,
                                const ProverStrategy& strategy, RandomSource& rng) {
  return run_protocol_resolved(variant, ham, resolve_strategy(strategy, ham), rng);
}

// The ZK verifier's view of one execution: everything it observes.
struct ZkView {
  int h = 0;
  int a = 0;
  int b = 0;
  int m_a = 0;
  int m_b = 0;
  std::vector<int> x;
  std::vector<int> z;
};

inline ZkView view_of(const TrialRecord& rec) {
  if (!rec.key.zk_pair) throw std::invalid_argument("view_of: record is not a ZK trial");
  auto [a, b] = *rec.key.zk_pair;
  return {rec.key.h, a,
          b,         rec.key.m[static_cast<std::size_t>(a) - 1],
          rec.key.m[static_cast<std::size_t>(b) - 1],
          rec.answer.x,
          rec.answer.z};
}

// The simulator: samples (h, x, z, a, b) uniformly, computes the reduced
// state of X^x Z^z |G><G| Z^z X^x on {a, b}, and Born-samples (m_a, m_b)
// from it in basis h. Needs no prover and no center, only the instance.
inline ZkView zk_simulator_from_ground(const XZHamiltonian& ham, const StateVector& ground,
                                       RandomSource& rng) {
  int n = ham.n_qubits;
  ZkView view;
  view.h = rng.bit();
  view.x = rng.bits(static_cast<std::size_t>(n));
  view.z = rng.bits(static_cast<std::size_t>(n));
  auto pairs = all_pairs(n);
  auto [a, b] = pairs[rng.index(pairs.size())];
  view.a = a;
  view.b = b;
  StateVector twisted = ground;
  for (int j = 1; j <= n; ++j) {
    if (view.z[j - 1]) twisted.apply_z(j);
    if (view.x[j - 1]) twisted.apply_x(j);
  }
  DensityMatrix2Q rho = reduced_density(twisted, a, b);
  auto probs = rho.measure_probs(view.h);
  std::size_t k = rng.categorical(probs);
  view.m_a = static_cast<int>(k >> 1);
  view.m_b = static_cast<int>(k & 1);
  return view;
}

inline ZkView zk_simulator(const XZHamiltonian& ham, RandomSource& rng,
                           int cap = kDefaultEigCap) {
  return zk_simulator_from_ground(ham, ground_state(ham, cap).state, rng);
}

}  // namespace qcv
