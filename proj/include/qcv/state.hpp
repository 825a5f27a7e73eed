#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcv/random.hpp"

namespace qcv {

using complex = std::complex<double>;

inline constexpr double kStateTol = 1e-9;

// Amplitude-vector convention, fixed once for the whole library:
//
//   * Qubits are numbered 1..n.
//   * Qubit 1 is the MOST significant bit of the basis index, so the
//     amplitude of |m_1 m_2 ... m_n> sits at index
//     m_1*2^(n-1) + m_2*2^(n-2) + ... + m_n.
//   * tensor(a, b) therefore places a's qubits before (above) b's.
//
// All index arithmetic below derives from this.
inline int qubit_bit(std::size_t index, int qubit, int n_qubits) {
  return static_cast<int>((index >> (n_qubits - qubit)) & 1u);
}

class StateVector {
 public:
  // |0...0> on n qubits.
  explicit StateVector(int n_qubits)
      : n_(check_count(n_qubits)), amps_(std::size_t{1} << n_qubits, complex{0.0, 0.0}) {
    amps_[0] = 1.0;
  }

  static StateVector from_amplitudes(int n_qubits, std::vector<complex> amps) {
    StateVector s(n_qubits);
    if (amps.size() != s.amps_.size())
      throw std::invalid_argument("StateVector: amplitude count must be 2^n_qubits");
    s.amps_ = std::move(amps);
    double n2 = s.norm_sq();
    if (std::abs(n2 - 1.0) > kStateTol)
      throw std::invalid_argument("StateVector: amplitudes are not normalized");
    return s;
  }

  // |b_1 b_2 ... b_n> for bits b.
  static StateVector basis_state(const std::vector<int>& bits) {
    StateVector s(static_cast<int>(bits.size()));
    std::size_t idx = 0;
    for (int b : bits) {
      if (b != 0 && b != 1) throw std::invalid_argument("basis_state: bits must be 0 or 1");
      idx = (idx << 1) | static_cast<std::size_t>(b);
    }
    s.amps_[0] = 0.0;
    s.amps_[idx] = 1.0;
    return s;
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<complex>& amplitudes() const { return amps_; }
  complex amplitude(std::size_t index) const { return amps_.at(index); }

  double norm_sq() const {
    double t = 0.0;
    for (const auto& a : amps_) t += std::norm(a);
    return t;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  void apply_h(int q) {
    std::size_t bit = mask_of(q);
    const double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      complex a0 = amps_[i];
      complex a1 = amps_[i | bit];
      amps_[i] = (a0 + a1) * inv;
      amps_[i | bit] = (a0 - a1) * inv;
    }
  }

  void apply_x(int q) {
    std::size_t bit = mask_of(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      std::swap(amps_[i], amps_[i | bit]);
    }
  }

  void apply_z(int q) {
    std::size_t bit = mask_of(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) amps_[i] = -amps_[i];
    }
  }

  void apply_cnot(int control, int target) {
    std::size_t cbit = mask_of(control);
    std::size_t tbit = mask_of(target);
    if (cbit == tbit) throw std::invalid_argument("apply_cnot: control equals target");
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
    }
  }

  // Probability that measuring qubit q in basis h yields 1.
  double prob_one(int q, int basis_h) const {
    if (basis_h == 0) {
      std::size_t bit = mask_of(q);
      double p = 0.0;
      for (std::size_t i = 0; i < amps_.size(); ++i)
        if (i & bit) p += std::norm(amps_[i]);
      return p;
    }
    StateVector rotated = *this;
    rotated.apply_h(q);
    return rotated.prob_one(q, 0);
  }

  // Projects qubit q onto `outcome` in basis h and renormalizes.
  // Returns the Born probability of that outcome. In the Hadamard basis the
  // post-state keeps qubit q in H|outcome>, so re-measuring in the same basis
  // reproduces the outcome.
  double collapse(int q, int basis_h, int outcome) {
    if (basis_h == 1) apply_h(q);
    std::size_t bit = mask_of(q);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      bool keep = ((i & bit) != 0) == (outcome == 1);
      if (keep)
        p += std::norm(amps_[i]);
      else
        amps_[i] = 0.0;
    }
    if (p > 0.0) {
      double inv = 1.0 / std::sqrt(p);
      for (auto& a : amps_) a *= inv;
    }
    if (basis_h == 1) apply_h(q);
    return p;
  }

  void check_qubit(int q) const {
    if (q < 1 || q > n_)
      throw std::out_of_range("qubit index " + std::to_string(q) + " outside 1.." +
                              std::to_string(n_));
  }

 private:
  static int check_count(int n) {
    if (n < 1 || n > 24) throw std::invalid_argument("StateVector: n_qubits must be in 1..24");
    return n;
  }
  std::size_t mask_of(int q) const {
    check_qubit(q);
    return std::size_t{1} << (n_ - q);
  }

  int n_;
  std::vector<complex> amps_;
};

enum class Gate { H, X, Z, CNOT };

inline StateVector apply_gate(StateVector state, Gate gate, std::span<const int> targets) {
  switch (gate) {
    case Gate::H:
    case Gate::X:
    case Gate::Z: {
      if (targets.size() != 1) throw std::invalid_argument("single-qubit gate takes one target");
      int q = targets[0];
      if (gate == Gate::H) state.apply_h(q);
      if (gate == Gate::X) state.apply_x(q);
      if (gate == Gate::Z) state.apply_z(q);
      return state;
    }
    case Gate::CNOT: {
      if (targets.size() != 2) throw std::invalid_argument("CNOT takes two targets");
      if (targets[0] == targets[1]) throw std::invalid_argument("CNOT targets must be distinct");
      state.apply_cnot(targets[0], targets[1]);
      return state;
    }
  }
  throw std::invalid_argument("unknown gate");
}

inline StateVector apply_gate(StateVector state, Gate gate, std::initializer_list<int> targets) {
  return apply_gate(std::move(state), gate, std::span<const int>(targets.begin(), targets.size()));
}

// The BB84 product state  ⊗_j H^h |m_j>.
inline StateVector prepare_bb84(int h, const std::vector<int>& m) {
  if (m.empty()) throw std::invalid_argument("prepare_bb84: need at least one qubit");
  StateVector s = StateVector::basis_state(m);
  if (h == 1)
    for (int q = 1; q <= s.n_qubits(); ++q) s.apply_h(q);
  return s;
}

// ⊗^k (|00>+|11>)/sqrt(2); pair j lives on qubits (2j-1, 2j).
inline StateVector make_bell_pairs(int k) {
  if (k < 1) throw std::invalid_argument("make_bell_pairs: k must be positive");
  StateVector s(2 * k);
  for (int j = 1; j <= k; ++j) {
    s.apply_h(2 * j - 1);
    s.apply_cnot(2 * j - 1, 2 * j);
  }
  return s;
}

// a ⊗ b; a's qubits become 1..n_a, b's become n_a+1..n_a+n_b.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<complex> amps(a.dim() * b.dim());
  for (std::size_t ia = 0; ia < a.dim(); ++ia)
    for (std::size_t ib = 0; ib < b.dim(); ++ib)
      amps[ia * b.dim() + ib] = a.amplitudes()[ia] * b.amplitudes()[ib];
  return StateVector::from_amplitudes(a.n_qubits() + b.n_qubits(), std::move(amps));
}

// |<a|b>|^2; global phase drops out.
inline double fidelity(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("fidelity: qubit count mismatch");
  complex overlap{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i)
    overlap += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return std::norm(overlap);
}

struct MeasureResult {
  int outcome;
  StateVector state;
};

// Born-rule measurement of qubit q; h = 0 computational, h = 1 Hadamard.
inline int measure_qubit_inplace(StateVector& state, int q, int basis_h, RandomSource& rng) {
  double p1 = state.prob_one(q, basis_h);
  int outcome = rng.real01() < p1 ? 1 : 0;
  state.collapse(q, basis_h, outcome);
  return outcome;
}

inline MeasureResult measure_qubit(const StateVector& state, int q, int basis_h,
                                   RandomSource& rng) {
  StateVector post = state;
  int outcome = measure_qubit_inplace(post, q, basis_h, rng);
  return {outcome, std::move(post)};
}

struct BellOutcome {
  int x;
  int z;
};

// Bell measurement of (qA, qB), labeled so that teleporting |psi> held on qA
// through a |Phi+> pair (qB, receiver) leaves X^x Z^z |psi> on the receiver.
// Circuit: CNOT qA->qB, H qA, then computational measurements give z on qA
// and x on qB. The post-state keeps the measured pair in |z>|x>.
inline BellOutcome bell_measure_inplace(StateVector& state, int qA, int qB, RandomSource& rng) {
  if (qA == qB) throw std::invalid_argument("bell_measure: qubits must be distinct");
  state.apply_cnot(qA, qB);
  state.apply_h(qA);
  int z = measure_qubit_inplace(state, qA, 0, rng);
  int x = measure_qubit_inplace(state, qB, 0, rng);
  return {x, z};
}

struct BellResult {
  int x;
  int z;
  StateVector state;
};

inline BellResult bell_measure(const StateVector& state, int qA, int qB, RandomSource& rng) {
  StateVector post = state;
  BellOutcome o = bell_measure_inplace(post, qA, qB, rng);
  return {o.x, o.z, std::move(post)};
}

// Haar-ish random pure state: i.i.d. complex Gaussian amplitudes, normalized.
// Box-Muller over RandomSource keeps the draw reproducible.
inline StateVector random_state(int n_qubits, RandomSource& rng) {
  std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<complex> amps(dim);
  double n2 = 0.0;
  for (auto& a : amps) {
    double u1 = rng.real01();
    double u2 = rng.real01();
    while (u1 <= 0.0) u1 = rng.real01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    a = complex{r * std::cos(th), r * std::sin(th)};
    n2 += std::norm(a);
  }
  double inv = 1.0 / std::sqrt(n2);
  for (auto& a : amps) a *= inv;
  return StateVector::from_amplitudes(n_qubits, std::move(amps));
}

// ---------------------------------------------------------------------------
// Exhaustive measurement branching. Each Branch carries the joint probability
// of the outcomes recorded so far and the corresponding post-state; tiny
// branches are pruned so impossible outcomes never appear.

struct Branch {
  double prob;
  StateVector state;
  std::vector<int> outcomes;
};

inline constexpr double kBranchPruneTol = 1e-15;

inline std::vector<Branch> initial_branch(StateVector state) {
  std::vector<Branch> b;
  b.push_back(Branch{1.0, std::move(state), {}});
  return b;
}

// Splits every branch on measuring qubit q in basis h; appends the outcome bit.
inline void branch_measure(std::vector<Branch>& branches, int q, int basis_h) {
  std::vector<Branch> next;
  next.reserve(branches.size() * 2);
  for (const Branch& br : branches) {
    for (int outcome : {0, 1}) {
      StateVector post = br.state;
      double p = post.collapse(q, basis_h, outcome);
      if (p <= kBranchPruneTol) continue;
      Branch nb{br.prob * p, std::move(post), br.outcomes};
      nb.outcomes.push_back(outcome);
      next.push_back(std::move(nb));
    }
  }
  branches = std::move(next);
}

// Splits every branch on a Bell measurement of (qA, qB); appends x then z.
inline void branch_bell(std::vector<Branch>& branches, int qA, int qB) {
  std::vector<Branch> next;
  next.reserve(branches.size() * 4);
  for (const Branch& br : branches) {
    StateVector rotated = br.state;
    rotated.apply_cnot(qA, qB);
    rotated.apply_h(qA);
    for (int z : {0, 1}) {
      StateVector afterz = rotated;
      double pz = afterz.collapse(qA, 0, z);
      if (pz <= kBranchPruneTol) continue;
      for (int x : {0, 1}) {
        StateVector post = afterz;
        double px = post.collapse(qB, 0, x);
        if (px <= kBranchPruneTol) continue;
        Branch nb{br.prob * pz * px, std::move(post), br.outcomes};
        nb.outcomes.push_back(x);
        nb.outcomes.push_back(z);
        next.push_back(std::move(nb));
      }
    }
  }
  branches = std::move(next);
}

}  // namespace qcv
