#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "tangleforge/qstate.hpp"

namespace tangleforge {

/// The three degree-4 amplitude polynomials entering the three-tangle.
struct HyperdetTerms {
  Complex d1, d2, d3;
};

inline HyperdetTerms hyperdet_terms(const PureState& psi) {
  require(psi.n_qubits == 3, errc::wrong_size, "three-tangle needs a 3-qubit state");
  const Vec& v = psi.amplitudes;
  auto a = [&](int i, int j, int k) { return v[(i << 2) | (j << 1) | k]; };

  const Complex d1 = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1) +
                     a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0) +
                     a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1) +
                     a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
  const Complex d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0) +
                     a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0) +
                     a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1) +
                     a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0) +
                     a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1) +
                     a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
  const Complex d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) +
                     a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
  return {d1, d2, d3};
}

/// tau3 = 4 |d1 - 2 d2 + 4 d3|. Homogeneous of degree 4 in the amplitudes;
/// lies in [0,1] for unit-norm input.
inline double three_tangle_pure(const PureState& psi) {
  const HyperdetTerms t = hyperdet_terms(psi);
  return 4.0 * std::abs(t.d1 - 2.0 * t.d2 + 4.0 * t.d3);
}

/// Wootters concurrence: C = max(0, l1-l2-l3-l4) with l_i the decreasing
/// square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).
inline double concurrence_two_qubit(const DensityMatrix& rho) {
  require(rho.dim() == 4, errc::wrong_size, "concurrence needs a two-qubit density matrix");
  static const Mat spin_flip = kron(pauli_y(), pauli_y());
  const Mat m = rho.entries * spin_flip * rho.entries.conjugate() * spin_flip;
  Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) {
    double ev = es.eigenvalues()[i].real();
    if (ev < 0.0) ev = 0.0;  // rounding below the PSD floor
    lam[static_cast<std::size_t>(i)] = std::sqrt(ev);
  }
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

/// Squared concurrence across the one-vs-rest split of a pure state:
/// 4 det of the single-qubit reduced matrix.
inline double one_tangle_pure(const PureState& psi, int partition_qubit) {
  require(partition_qubit >= 0 && partition_qubit < psi.n_qubits, errc::bad_subset,
          "qubit index out of range");
  const int p = bit_position(psi.n_qubits, partition_qubit);
  double p00 = 0.0, p11 = 0.0;
  Complex off = 0.0;
  for (long i = 0; i < psi.dim(); ++i) {
    if ((i >> p) & 1) continue;
    const Complex a0 = psi.amplitudes[i];
    const Complex a1 = psi.amplitudes[i | (1L << p)];
    p00 += std::norm(a0);
    p11 += std::norm(a1);
    off += a0 * std::conj(a1);
  }
  return 4.0 * (p00 * p11 - std::norm(off));
}

/// Global negativity ||rho^T_S||_1 - 1, computed from Hermitian eigenvalues.
inline double negativity(const DensityMatrix& rho, const std::vector<int>& subsystem) {
  const Mat pt = partial_transpose(rho, subsystem);
  Eigen::SelfAdjointEigenSolver<Mat> es(pt, Eigen::EigenvaluesOnly);
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  return std::max(0.0, trace_norm - 1.0);
}

inline double negativity(const DensityMatrix& rho, int subsystem) {
  return negativity(rho, std::vector<int>{subsystem});
}

/// Per-qubit terms pi_q = N^2(q|rest) - sum of the two pairwise N^2 for
/// qubit q.
inline std::array<double, 3> pi_tangle_components(const DensityMatrix& rho) {
  require(rho.dim() == 8, errc::wrong_size, "pi-tangle needs a 3-qubit density matrix");
  auto sq = [](double v) { return v * v; };
  std::array<double, 3> components{};
  for (int q = 0; q < 3; ++q) {
    const double n_global = negativity(rho, q);
    double n_pair_sq = 0.0;
    for (int other = 0; other < 3; ++other) {
      if (other == q) continue;
      const std::vector<int> keep = {std::min(q, other), std::max(q, other)};
      const DensityMatrix red = partial_trace(rho, keep);
      const int q_in_reduced = q < other ? 0 : 1;
      n_pair_sq += sq(negativity(red, q_in_reduced));
    }
    components[static_cast<std::size_t>(q)] = sq(n_global) - n_pair_sq;
  }
  return components;
}

/// Negativity-based three-party measure: the average of the per-qubit terms.
inline double pi_tangle(const DensityMatrix& rho) {
  const std::array<double, 3> components = pi_tangle_components(rho);
  return (components[0] + components[1] + components[2]) / 3.0;
}

/// Linear-entropy tangle 2 (1 - Tr rho^2) of a single-qubit reduction.
inline double linear_entropy_tangle(const DensityMatrix& rho) {
  require(rho.dim() == 2, errc::wrong_size, "linear-entropy tangle needs a qubit state");
  return 2.0 * (1.0 - (rho.entries * rho.entries).trace().real());
}

/// Difference between the total one-tangle and total two-tangle of a pure
/// N-qubit state, divided by N.
inline double e_ms(const PureState& psi) {
  const int n = psi.n_qubits;
  require(n >= 3 && n <= 5, errc::wrong_size, "e_ms supports 3 to 5 qubits");
  const DensityMatrix full = projector(psi);
  double one_tangles = 0.0;
  for (int k = 0; k < n; ++k)
    one_tangles += linear_entropy_tangle(partial_trace(full, {k}));
  double two_tangles = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double c = concurrence_two_qubit(partial_trace(full, {i, j}));
      two_tangles += c * c;
    }
  return (one_tangles - 2.0 * two_tangles) / n;
}

struct TangleReport {
  double tau3 = 0.0;
  double one_tangle_A = 0.0;      // 4 det of the qubit-A reduction
  double concurrence_AB = 0.0;
  double concurrence_AC = 0.0;
  double negativity_A_BC = 0.0;
  double pi_tangle = 0.0;
};

/// Aggregates the measures above for a 3-qubit density matrix. tau3 for mixed
/// states is an optimization concern and is supplied by the caller.
inline TangleReport full_report(const DensityMatrix& rho, double tau3_value) {
  require(rho.dim() == 8, errc::wrong_size, "report needs a 3-qubit density matrix");
  TangleReport r;
  r.tau3 = tau3_value;
  const DensityMatrix rho_a = partial_trace(rho, {0});
  r.one_tangle_A = 4.0 * (rho_a.entries(0, 0) * rho_a.entries(1, 1) -
                          rho_a.entries(0, 1) * rho_a.entries(1, 0))
                             .real();
  r.concurrence_AB = concurrence_two_qubit(partial_trace(rho, {0, 1}));
  r.concurrence_AC = concurrence_two_qubit(partial_trace(rho, {0, 2}));
  r.negativity_A_BC = negativity(rho, 0);
  r.pi_tangle = pi_tangle(rho);
  return r;
}

}  // namespace tangleforge
