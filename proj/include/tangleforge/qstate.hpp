#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tangleforge/errors.hpp"
#include "tangleforge/linalg.hpp"

namespace tangleforge {

// Qubit ordering: qubit 0 (called A) is the most significant bit of the
// amplitude index, so an n-qubit basis label b1 b2 ... bn maps to the index
// (b1 << (n-1)) | ... | bn. All partitions (A|BC and friends) refer to this
// ordering.
inline int bit_position(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

struct PureState {
  int n_qubits = 0;
  Vec amplitudes;  // length 2^n_qubits

  long dim() const { return amplitudes.size(); }
};

struct DensityMatrix {
  Mat entries;

  long dim() const { return entries.rows(); }
};

struct Ensemble {
  struct Member {
    double weight;
    PureState state;
  };
  std::vector<Member> members;
};

/// Named states used throughout: the canonical GHZ/W pair, the eight
/// GHZ-basis states, the one-parameter J and X families and the 5-qubit
/// purification Psi5.
struct StateLabel {
  enum class Tag { GHZ, W, GHZPlusMinus, J, X, Psi5 };

  Tag tag = Tag::GHZ;
  int k = 1;         // GHZPlusMinus: which complementary bit-string pair, 1..4
  int sign = +1;     // GHZPlusMinus: relative phase, +1 or -1
  double theta1 = 0, theta2 = 0;          // J
  double x = 0, phi1 = 0, phi2 = 0, phi3 = 0;  // X

  static StateLabel ghz() { return {}; }
  static StateLabel w() { return {Tag::W}; }
  static StateLabel ghz_pm(int k, int sign) {
    StateLabel l{Tag::GHZPlusMinus};
    l.k = k;
    l.sign = sign;
    return l;
  }
  static StateLabel j(double theta1, double theta2) {
    StateLabel l{Tag::J};
    l.theta1 = theta1;
    l.theta2 = theta2;
    return l;
  }
  static StateLabel x_state(double x, double phi1, double phi2, double phi3) {
    StateLabel l{Tag::X};
    l.x = x;
    l.phi1 = phi1;
    l.phi2 = phi2;
    l.phi3 = phi3;
    return l;
  }
  static StateLabel psi5() { return {Tag::Psi5}; }
};

namespace detail {

inline PureState pure_from_vec(int n_qubits, Vec v) {
  PureState s;
  s.n_qubits = n_qubits;
  s.amplitudes = std::move(v);
  return s;
}

}  // namespace detail

inline void validate_pure(const PureState& s, double tol = 1e-12) {
  require(s.amplitudes.size() == (1L << s.n_qubits), errc::bad_length,
          "amplitude vector length does not match qubit count");
  require(std::abs(s.amplitudes.squaredNorm() - 1.0) <= tol, errc::not_normalized,
          "state is not unit norm");
}

inline void validate_density(const DensityMatrix& rho, double herm_tol = 1e-12,
                             double eig_tol = 1e-10) {
  require(rho.entries.rows() == rho.entries.cols(), errc::wrong_size,
          "density matrix must be square");
  require(is_hermitian(rho.entries, herm_tol), errc::not_a_state,
          "density matrix is not Hermitian");
  require(std::abs(rho.entries.trace().real() - 1.0) <= herm_tol &&
              std::abs(rho.entries.trace().imag()) <= herm_tol,
          errc::not_a_state, "density matrix trace is not 1");
  require(min_eigenvalue(rho.entries) >= -eig_tol, errc::not_a_state,
          "density matrix has a negative eigenvalue");
}

inline PureState make_pure(const std::vector<Complex>& amplitudes, bool normalize) {
  const long len = static_cast<long>(amplitudes.size());
  require(len == 4 || len == 8 || len == 32, errc::bad_length,
          "supported amplitude vector lengths are 4, 8 and 32");
  Vec v(len);
  for (long i = 0; i < len; ++i) v[i] = amplitudes[static_cast<std::size_t>(i)];
  const double norm = v.norm();
  require(norm > 0.0, errc::zero_vector, "all amplitudes are zero");
  if (!normalize)
    require(std::abs(norm - 1.0) <= 1e-9, errc::not_normalized,
            "amplitudes are not normalized and normalize=false");
  return detail::pure_from_vec(log2_exact(len), v / norm);
}

/// |GHZ,k+-> pairs the complementary bit strings (k-1) and (2^3-k) with a
/// +- relative phase, e.g. k=2 gives (|001> +- |110>)/sqrt(2).
inline PureState ghz_basis_state(int k, int sign) {
  require(k >= 1 && k <= 4, errc::bad_parameter, "GHZ basis index must be 1..4");
  require(sign == +1 || sign == -1, errc::bad_parameter, "sign must be +1 or -1");
  Vec v = Vec::Zero(8);
  const int lo = k - 1;
  const int hi = 7 - lo;
  v[lo] = 1.0 / std::sqrt(2.0);
  v[hi] = sign / std::sqrt(2.0);
  return detail::pure_from_vec(3, v);
}

inline PureState named_pure(const StateLabel& label) {
  using Tag = StateLabel::Tag;
  switch (label.tag) {
    case Tag::GHZ:
      return ghz_basis_state(1, +1);
    case Tag::W: {
      Vec v = Vec::Zero(8);
      v[1] = v[2] = v[4] = 1.0 / std::sqrt(3.0);
      return detail::pure_from_vec(3, v);
    }
    case Tag::GHZPlusMinus:
      return ghz_basis_state(label.k, label.sign);
    case Tag::J: {
      const Vec g2 = ghz_basis_state(2, +1).amplitudes;
      const Vec g3 = ghz_basis_state(3, +1).amplitudes;
      const Vec g4 = ghz_basis_state(4, +1).amplitudes;
      const double c = 1.0 / std::sqrt(3.0);
      Vec v = c * g2 - c * std::exp(I_UNIT * label.theta1) * g3 -
              c * std::exp(I_UNIT * label.theta2) * g4;
      return detail::pure_from_vec(3, v);
    }
    case Tag::X: {
      require(label.x >= 0.0 && label.x <= 1.0, errc::bad_parameter,
              "X-state parameter x must lie in [0,1]");
      const Vec g1 = ghz_basis_state(1, +1).amplitudes;
      const Vec g2 = ghz_basis_state(2, +1).amplitudes;
      const Vec g3 = ghz_basis_state(3, +1).amplitudes;
      const Vec g4 = ghz_basis_state(4, +1).amplitudes;
      const double c = std::sqrt((1.0 - label.x) / 3.0);
      Vec v = std::sqrt(label.x) * g1 -
              c * (std::exp(I_UNIT * label.phi1) * g2 + std::exp(I_UNIT * label.phi2) * g3 +
                   std::exp(I_UNIT * label.phi3) * g4);
      return detail::pure_from_vec(3, v);
    }
    case Tag::Psi5: {
      // Three-qubit part at the most significant positions, the two ancilla
      // qubits least significant.
      Vec v = Vec::Zero(32);
      const double c = 1.0 / std::sqrt(6.0);
      v[(1 << 2) | 0] = c;   // |001>|00>
      v[(6 << 2) | 0] = c;   // |110>|00>
      v[(2 << 2) | 1] = c;   // |010>|01>
      v[(5 << 2) | 1] = c;   // |101>|01>
      v[(3 << 2) | 2] = c;   // |011>|10>
      v[(4 << 2) | 2] = c;   // |100>|10>
      return detail::pure_from_vec(5, v);
    }
  }
  fail(errc::bad_parameter, "unknown state label");
}

inline DensityMatrix projector(const PureState& s) {
  return DensityMatrix{s.amplitudes * s.amplitudes.adjoint()};
}

inline DensityMatrix density_from_ensemble(const Ensemble& e) {
  require(!e.members.empty(), errc::bad_parameter, "ensemble is empty");
  const int n = e.members.front().state.n_qubits;
  double total = 0.0;
  Mat rho = Mat::Zero(1L << n, 1L << n);
  for (const auto& m : e.members) {
    require(m.state.n_qubits == n, errc::mixed_dimensions,
            "ensemble members have mixed qubit counts");
    require(m.weight >= 0.0, errc::bad_parameter, "ensemble weight is negative");
    rho += m.weight * (m.state.amplitudes * m.state.amplitudes.adjoint());
    total += m.weight;
  }
  require(std::abs(total - 1.0) <= 1e-12, errc::bad_parameter,
          "ensemble weights do not sum to 1");
  DensityMatrix out{std::move(rho)};
  validate_density(out);
  return out;
}

/// Rank-3 equal mixture of |GHZ,2+>, |GHZ,3+>, |GHZ,4+>.
inline DensityMatrix pi_ghz() {
  Mat rho = Mat::Zero(8, 8);
  for (int k = 2; k <= 4; ++k) {
    const Vec g = ghz_basis_state(k, +1).amplitudes;
    rho += (g * g.adjoint()) / 3.0;
  }
  return DensityMatrix{std::move(rho)};
}

/// Rank-4 mixture x |GHZ,1+><GHZ,1+| + (1-x) pi_ghz.
inline DensityMatrix sigma(double x) {
  require(x >= 0.0 && x <= 1.0, errc::bad_parameter, "sigma parameter x must lie in [0,1]");
  const Vec g1 = ghz_basis_state(1, +1).amplitudes;
  Mat rho = x * (g1 * g1.adjoint()) + (1.0 - x) * pi_ghz().entries;
  return DensityMatrix{std::move(rho)};
}

/// Minus-phase counterpart of sigma; local-unitary equivalent to sigma(y)
/// under Z on qubit A.
inline DensityMatrix sigma_tilde(double y) {
  require(y >= 0.0 && y <= 1.0, errc::bad_parameter,
          "sigma_tilde parameter y must lie in [0,1]");
  const Vec g1 = ghz_basis_state(1, -1).amplitudes;
  Mat rho = y * (g1 * g1.adjoint());
  for (int k = 2; k <= 4; ++k) {
    const Vec g = ghz_basis_state(k, -1).amplitudes;
    rho += (1.0 - y) / 3.0 * (g * g.adjoint());
  }
  return DensityMatrix{std::move(rho)};
}

/// Rank-8 interpolation xi sigma(x) + (1-xi) sigma_tilde(y).
inline DensityMatrix rho_rank8(double xi, double x, double y) {
  require(xi >= 0.0 && xi <= 1.0, errc::bad_parameter, "xi must lie in [0,1]");
  Mat rho = xi * sigma(x).entries + (1.0 - xi) * sigma_tilde(y).entries;
  return DensityMatrix{std::move(rho)};
}

namespace detail {

inline void check_qubit_subset(int n, const std::vector<int>& qs, bool proper) {
  require(!qs.empty(), errc::bad_subset, "qubit subset is empty");
  std::vector<int> sorted = qs;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    require(sorted[i] >= 0 && sorted[i] < n, errc::bad_subset, "qubit index out of range");
    if (i > 0) require(sorted[i] != sorted[i - 1], errc::bad_subset, "duplicate qubit index");
  }
  if (proper)
    require(static_cast<int>(qs.size()) < n, errc::bad_subset,
            "subset must be a proper subset");
}

inline int qubit_count(const DensityMatrix& rho) {
  require(is_power_of_two(rho.dim()), errc::wrong_size,
          "matrix dimension is not a power of two");
  return log2_exact(rho.dim());
}

}  // namespace detail

/// Reduced density matrix on the kept qubits (ascending order, first kept
/// qubit most significant in the reduced index).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = detail::qubit_count(rho);
  detail::check_qubit_subset(n, keep, /*proper=*/true);
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const int nk = static_cast<int>(kept.size());
  const int nt = static_cast<int>(traced.size());
  const long dk = 1L << nk;
  const long dt = 1L << nt;

  auto compose = [&](long reduced, long traced_bits) {
    long full = 0;
    for (int j = 0; j < nk; ++j)
      if (reduced & (1L << (nk - 1 - j))) full |= 1L << bit_position(n, kept[j]);
    for (int j = 0; j < nt; ++j)
      if (traced_bits & (1L << (nt - 1 - j))) full |= 1L << bit_position(n, traced[j]);
    return full;
  };

  Mat out = Mat::Zero(dk, dk);
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (long t = 0; t < dt; ++t) acc += rho.entries(compose(i, t), compose(j, t));
      out(i, j) = acc;
    }
  return DensityMatrix{std::move(out)};
}

/// Transpose the indices of the chosen qubits only. The result is Hermitian
/// with trace 1 but may fail positivity.
inline Mat partial_transpose(const DensityMatrix& rho, const std::vector<int>& subsystem) {
  const int n = detail::qubit_count(rho);
  detail::check_qubit_subset(n, subsystem, /*proper=*/false);
  const long d = rho.dim();
  long mask = 0;
  for (int q : subsystem) mask |= 1L << bit_position(n, q);

  Mat out(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) {
      const long r2 = (r & ~mask) | (c & mask);
      const long c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = rho.entries(r, c);
    }
  return out;
}

inline Mat partial_transpose(const DensityMatrix& rho, int qubit) {
  return partial_transpose(rho, std::vector<int>{qubit});
}

/// (O_1 x ... x O_n)|psi>, one 2x2 operator per qubit. With renormalize=false
/// the raw (possibly unnormalized) image is returned, which is what the
/// determinant-covariance checks need.
inline PureState apply_local_operator(const PureState& psi, const std::vector<Mat>& ops,
                                      bool renormalize) {
  const int n = psi.n_qubits;
  require(static_cast<int>(ops.size()) == n, errc::bad_parameter,
          "need exactly one operator per qubit");
  for (const Mat& o : ops)
    require(o.rows() == 2 && o.cols() == 2, errc::bad_parameter, "operators must be 2x2");

  Vec v = psi.amplitudes;
  for (int q = 0; q < n; ++q) {
    const int p = bit_position(n, q);
    Vec next = Vec::Zero(v.size());
    for (long i = 0; i < v.size(); ++i) {
      const int b = static_cast<int>((i >> p) & 1);
      // basis index with qubit q set to 0 / 1
      const long i0 = i & ~(1L << p);
      const long i1 = i | (1L << p);
      next[i] = ops[q](b, 0) * v[i0] + ops[q](b, 1) * v[i1];
    }
    v = std::move(next);
  }
  const double norm = v.norm();
  require(norm > 1e-15, errc::zero_result, "operator annihilates the state");
  if (renormalize) v /= norm;
  return detail::pure_from_vec(n, std::move(v));
}

/// |<psi|chi>|^2; equality of states is always checked through projectors,
/// never through amplitude vectors (global phase is not canonicalized).
inline double state_overlap(const PureState& a, const PureState& b) {
  const Complex ip = a.amplitudes.adjoint() * b.amplitudes;
  return std::norm(ip);
}

}  // namespace tangleforge
