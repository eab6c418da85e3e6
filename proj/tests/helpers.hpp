#pragma once

#include <cmath>
#include <numbers>

#include <tangleforge/tangleforge.hpp>

namespace tftest {

using namespace tangleforge;

inline double gauss(SplitMix64& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Complex gauss_complex(SplitMix64& rng) {
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

inline PureState random_pure(int n_qubits, SplitMix64& rng) {
  Vec v(1L << n_qubits);
  for (long i = 0; i < v.size(); ++i) v[i] = gauss_complex(rng);
  v /= v.norm();
  return PureState{n_qubits, std::move(v)};
}

inline DensityMatrix random_density(int n_qubits, int rank, SplitMix64& rng) {
  Ensemble e;
  double total = 0.0;
  std::vector<double> weights(static_cast<std::size_t>(rank));
  for (double& w : weights) {
    w = 0.05 + rng.uniform();
    total += w;
  }
  for (int k = 0; k < rank; ++k)
    e.members.push_back({weights[static_cast<std::size_t>(k)] / total,
                         random_pure(n_qubits, rng)});
  return density_from_ensemble(e);
}

inline Mat random_unitary(int dim, SplitMix64& rng) {
  Mat g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = gauss_complex(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

inline Mat random_invertible2(SplitMix64& rng) {
  while (true) {
    Mat m(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = gauss_complex(rng);
    if (std::abs(m.determinant()) > 0.1) return m;
  }
}

inline double projector_distance(const PureState& a, const PureState& b) {
  return frobenius_distance(projector(a).entries, projector(b).entries);
}

}  // namespace tftest
