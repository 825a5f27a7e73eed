#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>

#include "qcv/state.hpp"

namespace qcv {

// 4x4 density matrix of an ordered qubit pair (a, b), a's bit most
// significant: row/column index = 2*bit_a + bit_b.
class DensityMatrix2Q {
 public:
  DensityMatrix2Q() : m_{} {}

  complex& at(int r, int c) { return m_[static_cast<std::size_t>(r) * 4 + c]; }
  const complex& at(int r, int c) const { return m_[static_cast<std::size_t>(r) * 4 + c]; }

  complex trace() const { return at(0, 0) + at(1, 1) + at(2, 2) + at(3, 3); }

  double max_hermiticity_error() const {
    double worst = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
    return worst;
  }

  std::array<double, 4> eigenvalues() const {
    Eigen::Matrix4cd m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = at(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m, Eigen::EigenvaluesOnly);
    std::array<double, 4> ev{};
    for (int k = 0; k < 4; ++k) ev[k] = solver.eigenvalues()(k);
    return ev;
  }

  // Conjugates by H⊗H: the Hadamard-basis view of the pair.
  DensityMatrix2Q hadamard_frame() const {
    // H⊗H entries are all ±1/2.
    static const double had[4][4] = {
        {0.5, 0.5, 0.5, 0.5}, {0.5, -0.5, 0.5, -0.5}, {0.5, 0.5, -0.5, -0.5}, {0.5, -0.5, -0.5, 0.5}};
    DensityMatrix2Q out;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        complex acc{0.0, 0.0};
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) acc += had[r][k] * at(k, l) * had[l][c];
        out.at(r, c) = acc;
      }
    return out;
  }

  // Born probabilities of the four (m_a, m_b) outcomes in basis h.
  std::array<double, 4> measure_probs(int basis_h) const {
    const DensityMatrix2Q& framed = *this;
    DensityMatrix2Q rotated;
    if (basis_h == 1) rotated = hadamard_frame();
    const DensityMatrix2Q& src = basis_h == 1 ? rotated : framed;
    std::array<double, 4> probs{};
    for (int k = 0; k < 4; ++k) probs[k] = std::max(0.0, src.at(k, k).real());
    return probs;
  }

 private:
  std::array<complex, 16> m_;
};

// Partial trace of a pure state onto qubits {a, b}, a < b.
inline DensityMatrix2Q reduced_density(const StateVector& state, int a, int b) {
  state.check_qubit(a);
  state.check_qubit(b);
  if (a >= b) throw std::invalid_argument("reduced_density: need a < b");
  int n = state.n_qubits();
  std::size_t abit = std::size_t{1} << (n - a);
  std::size_t bbit = std::size_t{1} << (n - b);
  DensityMatrix2Q rho;
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (std::norm(amps[i]) == 0.0) continue;
    int ra = (i & abit) ? 1 : 0;
    int rb = (i & bbit) ? 1 : 0;
    std::size_t rest = i & ~(abit | bbit);
    for (int ca = 0; ca < 2; ++ca)
      for (int cb = 0; cb < 2; ++cb) {
        std::size_t j = rest | (ca ? abit : 0) | (cb ? bbit : 0);
        rho.at(2 * ra + rb, 2 * ca + cb) += amps[i] * std::conj(amps[j]);
      }
  }
  return rho;
}

}  // namespace qcv
