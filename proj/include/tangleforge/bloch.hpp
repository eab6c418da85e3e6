#pragma once

#include <array>
#include <optional>

#include "tangleforge/qstate.hpp"
#include "tangleforge/roof.hpp"

namespace tangleforge {

/// Generalized Gell-Mann matrices for d=4, ordered as the six symmetric
/// off-diagonal generators (pair order 12,13,14,23,24,34), the six
/// antisymmetric ones in the same pair order, then the three diagonal ones.
/// Normalized so Tr(l_i l_j) = 2 delta_ij.
struct GellMannBasis {
  std::array<Mat, 15> matrices;
};

inline const GellMannBasis& gell_mann_basis() {
  static const GellMannBasis basis = [] {
    GellMannBasis b;
    int idx = 0;
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        Mat m = Mat::Zero(4, 4);
        m(j, k) = 1.0;
        m(k, j) = 1.0;
        b.matrices[static_cast<std::size_t>(idx++)] = m;
      }
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        Mat m = Mat::Zero(4, 4);
        m(j, k) = -I_UNIT;
        m(k, j) = I_UNIT;
        b.matrices[static_cast<std::size_t>(idx++)] = m;
      }
    for (int l = 1; l <= 3; ++l) {
      Mat m = Mat::Zero(4, 4);
      const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) m(j, j) = scale;
      m(l, l) = -scale * l;
      b.matrices[static_cast<std::size_t>(idx++)] = m;
    }
    return b;
  }();
  return basis;
}

struct BlochVector {
  Eigen::Matrix<double, 15, 1> components;

  double norm() const { return components.norm(); }
};

/// Coefficients of rho in the representation (1/4)(I + sqrt(6) n . lambda);
/// the sqrt(6) scaling puts every pure state on the unit sphere.
inline BlochVector bloch_vector(const DensityMatrix& rho) {
  require(rho.dim() == 4, errc::wrong_size, "Bloch map is defined for dim-4 states");
  const GellMannBasis& basis = gell_mann_basis();
  BlochVector n;
  for (int i = 0; i < 15; ++i)
    n.components[i] = (rho.entries * basis.matrices[static_cast<std::size_t>(i)])
                          .trace()
                          .real() *
                      2.0 / std::sqrt(6.0);
  return n;
}

/// Inverse of bloch_vector. Not every point of the unit ball is a state in
/// d=4; positivity is checked and violations are reported, not clamped.
inline DensityMatrix state_from_bloch(const BlochVector& n) {
  const GellMannBasis& basis = gell_mann_basis();
  Mat rho = Mat::Identity(4, 4) / 4.0;
  for (int i = 0; i < 15; ++i)
    rho += std::sqrt(6.0) / 4.0 * n.components[i] * basis.matrices[static_cast<std::size_t>(i)];
  require(min_eigenvalue(rho) >= -1e-10, errc::not_a_state,
          "Bloch point has a negative eigenvalue");
  return DensityMatrix{std::move(rho)};
}

/// Matrix of an 8-dim state in the ordered |GHZ,k+> basis. The input must be
/// supported on that subspace.
inline DensityMatrix embed_ghz_subspace(const DensityMatrix& rho) {
  require(rho.dim() == 8, errc::wrong_size, "expected a 3-qubit density matrix");
  Mat b(8, 4);
  for (int k = 1; k <= 4; ++k) b.col(k - 1) = ghz_basis_state(k, +1).amplitudes;
  const Mat reduced = b.adjoint() * rho.entries * b;
  const Mat reconstructed = b * reduced * b.adjoint();
  require((rho.entries - reconstructed).norm() <= 1e-10, errc::outside_subspace,
          "state leaks outside the GHZ+ subspace");
  return DensityMatrix{reduced};
}

/// The simplex of the four zero-tangle X(3/4, .) projectors, in the GHZ+
/// basis. Every state inside it lifts to a 3-qubit state with zero
/// three-tangle.
struct Polyhedron {
  std::array<Mat, 4> vertex_projectors;      // 4x4, GHZ+ basis
  std::array<BlochVector, 4> vertex_blochs;
};

inline const Polyhedron& ghz_zero_polyhedron() {
  static const Polyhedron poly = [] {
    Polyhedron p;
    const auto patterns = detail::even_phase_patterns();
    for (std::size_t i = 0; i < 4; ++i) {
      const PureState s =
          named_pure(StateLabel::x_state(0.75, patterns[i][0], patterns[i][1], patterns[i][2]));
      const DensityMatrix embedded = embed_ghz_subspace(projector(s));
      p.vertex_projectors[i] = embedded.entries;
      p.vertex_blochs[i] = bloch_vector(embedded);
    }
    return p;
  }();
  return poly;
}

/// Decide whether rho lies in the vertex simplex: least squares over the
/// affine hull (the sum-to-one constraint is eliminated exactly), then a
/// nonnegativity check. Returns the barycentric weights on success.
inline std::optional<std::array<double, 4>> polyhedron_membership(const DensityMatrix& rho,
                                                                  double tol = 1e-8) {
  require(rho.dim() == 4, errc::wrong_size, "membership test needs a dim-4 state");
  const Polyhedron& poly = ghz_zero_polyhedron();

  auto vectorize = [](const Mat& m) {
    Eigen::VectorXd v(32);
    int p = 0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        v[p++] = m(r, c).real();
        v[p++] = m(r, c).imag();
      }
    return v;
  };

  Eigen::MatrixXd a(32, 3);
  for (int i = 0; i < 3; ++i)
    a.col(i) = vectorize(poly.vertex_projectors[static_cast<std::size_t>(i)] -
                         poly.vertex_projectors[3]);
  const Eigen::VectorXd b = vectorize(rho.entries - poly.vertex_projectors[3]);

  const Eigen::VectorXd z = a.colPivHouseholderQr().solve(b);
  const double residual = (a * z - b).norm();

  std::array<double, 4> w{z[0], z[1], z[2], 1.0 - z[0] - z[1] - z[2]};
  if (residual > tol) return std::nullopt;
  for (double wi : w)
    if (wi < -tol) return std::nullopt;

  double total = 0.0;
  for (double& wi : w) {
    wi = std::max(wi, 0.0);
    total += wi;
  }
  for (double& wi : w) wi /= total;
  return w;
}

}  // namespace tangleforge
