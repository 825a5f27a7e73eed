#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcv/errors.hpp"
#include "qcv/random.hpp"
#include "qcv/state.hpp"

namespace qcv {

inline constexpr double kWeightSumTol = 1e-9;
inline constexpr int kDefaultEigCap = 12;

// One 2-local term: weight p_{i,j} and sign s_{i,j} on the qubit pair (i, j).
struct XZTerm {
  int i = 0;
  int j = 0;
  double p = 0.0;
  int s = 0;  // +1 or -1
};

enum class PromiseLabel { yes, no, unknown };

inline std::string to_string(PromiseLabel label) {
  switch (label) {
    case PromiseLabel::yes: return "yes";
    case PromiseLabel::no: return "no";
    case PromiseLabel::unknown: return "unknown";
  }
  return "unknown";
}

// H = sum_{i<j} (p_{i,j}/2) [ (I + s XX)/2 + (I + s ZZ)/2 ], a convex
// combination of projector averages, so 0 <= H <= I. alpha/beta carry the
// promise thresholds when the instance provides them; promise_label is test
// metadata only and never consulted by any protocol.
struct XZHamiltonian {
  int n_qubits = 0;
  std::vector<XZTerm> terms;
  std::optional<double> alpha;
  std::optional<double> beta;
  PromiseLabel promise_label = PromiseLabel::unknown;
};

// Returns every violated invariant; empty means valid. Nothing is ever
// silently normalized.
inline std::vector<std::string> validate(const XZHamiltonian& ham) {
  std::vector<std::string> errors;
  if (ham.n_qubits < 2) errors.push_back("n_qubits must be at least 2");
  if (ham.terms.empty()) errors.push_back("at least one term required");
  double sum = 0.0;
  for (std::size_t k = 0; k < ham.terms.size(); ++k) {
    const XZTerm& t = ham.terms[k];
    std::string where = "term " + std::to_string(k) + " (" + std::to_string(t.i) + "," +
                        std::to_string(t.j) + ")";
    if (t.i >= t.j) errors.push_back(where + ": indices not strictly ordered");
    if (t.i < 1 || t.j > ham.n_qubits) errors.push_back(where + ": index outside 1..N");
    if (!(t.p > 0.0)) errors.push_back(where + ": weight must be positive");
    if (t.s != 1 && t.s != -1) errors.push_back(where + ": sign must be +1 or -1");
    for (std::size_t l = 0; l < k; ++l)
      if (ham.terms[l].i == t.i && ham.terms[l].j == t.j)
        errors.push_back(where + ": duplicate qubit pair");
    sum += t.p;
  }
  if (!ham.terms.empty() && std::abs(sum - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << sum << ", expected 1";
    errors.push_back(os.str());
  }
  if (ham.alpha && ham.beta && !(*ham.alpha < *ham.beta))
    errors.push_back("alpha must be strictly below beta");
  return errors;
}

inline std::size_t find_term(const XZHamiltonian& ham, int i, int j) {
  for (std::size_t k = 0; k < ham.terms.size(); ++k)
    if (ham.terms[k].i == i && ham.terms[k].j == j) return k;
  throw std::invalid_argument("no term on pair (" + std::to_string(i) + "," + std::to_string(j) +
                              ")");
}

// Categorical draw of a term index with probability p_{i,j}.
inline std::size_t sample_term_index(const XZHamiltonian& ham, RandomSource& rng) {
  std::vector<double> weights;
  weights.reserve(ham.terms.size());
  for (const XZTerm& t : ham.terms) weights.push_back(t.p);
  return rng.categorical(weights);
}

inline std::pair<int, int> sample_term(const XZHamiltonian& ham, RandomSource& rng) {
  const XZTerm& t = ham.terms[sample_term_index(ham, rng)];
  return {t.i, t.j};
}

inline double pauli_zz_expect(const StateVector& state, int i, int j) {
  int n = state.n_qubits();
  double acc = 0.0;
  for (std::size_t k = 0; k < state.dim(); ++k) {
    int parity = qubit_bit(k, i, n) ^ qubit_bit(k, j, n);
    double w = std::norm(state.amplitudes()[k]);
    acc += parity ? -w : w;
  }
  return acc;
}

inline double pauli_xx_expect(const StateVector& state, int i, int j) {
  int n = state.n_qubits();
  std::size_t mask = (std::size_t{1} << (n - i)) | (std::size_t{1} << (n - j));
  complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < state.dim(); ++k)
    acc += std::conj(state.amplitudes()[k]) * state.amplitudes()[k ^ mask];
  return acc.real();
}

struct EnergyReport {
  double energy = 0.0;
  double p_acc_predicted = 0.0;
};

// Exact <psi|H|psi> assembled term by term from Pauli expectations.
inline EnergyReport energy(const XZHamiltonian& ham, const StateVector& state) {
  if (state.n_qubits() != ham.n_qubits)
    throw std::invalid_argument("energy: state has " + std::to_string(state.n_qubits()) +
                                " qubits, instance expects " + std::to_string(ham.n_qubits));
  double e = 0.0;
  for (const XZTerm& t : ham.terms) {
    double xx = pauli_xx_expect(state, t.i, t.j);
    double zz = pauli_zz_expect(state, t.i, t.j);
    e += (t.p / 2.0) * (1.0 + t.s * (xx + zz) / 2.0);
  }
  return {e, 1.0 - e};
}

namespace detail {

// H is real symmetric in this term basis (XX and ZZ have real entries).
inline Eigen::MatrixXd build_dense_real(const XZHamiltonian& ham, int cap) {
  if (ham.n_qubits > cap)
    throw CapExceededError("dense form needs n_qubits <= " + std::to_string(cap) + ", got " +
                           std::to_string(ham.n_qubits));
  const std::size_t dim = std::size_t{1} << ham.n_qubits;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  int n = ham.n_qubits;
  for (const XZTerm& t : ham.terms) {
    std::size_t mask = (std::size_t{1} << (n - t.i)) | (std::size_t{1} << (n - t.j));
    for (std::size_t k = 0; k < dim; ++k) {
      int parity = qubit_bit(k, t.i, n) ^ qubit_bit(k, t.j, n);
      double zz = parity ? -1.0 : 1.0;
      m(k, k) += (t.p / 2.0) * (1.0 + t.s * zz) / 2.0;  // (I + s ZZ)/2 piece
      m(k, k) += (t.p / 2.0) * 0.5;                     // diagonal of (I + s XX)/2
      m(k ^ mask, k) += (t.p / 2.0) * t.s * 0.5;        // off-diagonal of XX
    }
  }
  return m;
}

}  // namespace detail

inline Eigen::MatrixXcd build_dense(const XZHamiltonian& ham, int cap = kDefaultEigCap) {
  return detail::build_dense_real(ham, cap).cast<complex>();
}

struct GroundState {
  StateVector state;
  double lambda_min;
};

// Minimal eigenpair of the dense form. Degenerate ground spaces are fine:
// any minimizing vector is returned.
inline GroundState ground_state(const XZHamiltonian& ham, int cap = kDefaultEigCap) {
  Eigen::MatrixXd m = detail::build_dense_real(ham, cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("ground_state: eigensolver failed to converge");
  double lambda = solver.eigenvalues()(0);
  Eigen::VectorXd vec = solver.eigenvectors().col(0);
  std::vector<complex> amps(vec.size());
  for (Eigen::Index k = 0; k < vec.size(); ++k) amps[k] = complex{vec(k), 0.0};
  return {StateVector::from_amplitudes(ham.n_qubits, std::move(amps)), lambda};
}

}  // namespace qcv
