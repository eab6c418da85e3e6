#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "tangleforge/analytic.hpp"
#include "tangleforge/measures.hpp"
#include "tangleforge/qstate.hpp"

namespace tangleforge {

/// Portable splittable RNG; identical streams on every platform, which keeps
/// seeded roof runs reproducible.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    return g.next();
  }
};

enum class RoofMeasure { tau3, one_tangle_A };

struct RoofProblem {
  DensityMatrix target;
  RoofMeasure measure = RoofMeasure::tau3;
  int ensemble_size = 0;  // 0 picks max(8, 2 * rank)
  int restarts = 32;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
  int max_sweeps = 2000;
  // Both measures are nonnegative, so any ensemble average at or below this
  // floor certifies (to that accuracy) that the global roof is reached;
  // remaining restarts are skipped. 0 disables the shortcut.
  double stop_below = 0.0;
};

struct RoofResult {
  double value = 0.0;
  Ensemble ensemble;
  bool converged = false;
  int iterations = 0;
};

struct CurvePoint {
  double x;
  double value;
};

inline int density_rank(const DensityMatrix& rho, double cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.entries, Eigen::EigenvaluesOnly);
  int r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > cutoff) ++r;
  return r;
}

namespace detail {

struct EigenBasis {
  Mat scaled_vectors;  // dim x r, column j = sqrt(lambda_j) |v_j>
  int rank = 0;
};

inline EigenBasis eigen_basis(const DensityMatrix& rho, double cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.entries);
  std::vector<int> kept;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    if (es.eigenvalues()[i] > cutoff) kept.push_back(static_cast<int>(i));
  EigenBasis basis;
  basis.rank = static_cast<int>(kept.size());
  basis.scaled_vectors.resize(rho.dim(), basis.rank);
  for (int j = 0; j < basis.rank; ++j)
    basis.scaled_vectors.col(j) =
        std::sqrt(es.eigenvalues()[kept[static_cast<std::size_t>(j)]]) *
        es.eigenvectors().col(kept[static_cast<std::size_t>(j)]);
  return basis;
}

// Degree-4 homogeneous forms of the two supported measures; dividing by the
// squared norm turns them into weight * measure(normalized state).
inline double tau3_raw(const Vec& v) {
  const Complex d1 = v[0] * v[0] * v[7] * v[7] + v[1] * v[1] * v[6] * v[6] +
                     v[2] * v[2] * v[5] * v[5] + v[4] * v[4] * v[3] * v[3];
  const Complex d2 = v[0] * v[7] * v[3] * v[4] + v[0] * v[7] * v[5] * v[2] +
                     v[0] * v[7] * v[6] * v[1] + v[3] * v[4] * v[5] * v[2] +
                     v[3] * v[4] * v[6] * v[1] + v[5] * v[2] * v[6] * v[1];
  const Complex d3 = v[0] * v[6] * v[5] * v[3] + v[7] * v[1] * v[2] * v[4];
  return 4.0 * std::abs(d1 - 2.0 * d2 + 4.0 * d3);
}

inline double one_tangle_raw(const Vec& v) {
  double p0 = 0.0, p1 = 0.0;
  Complex off = 0.0;
  for (int i = 0; i < 4; ++i) {
    p0 += std::norm(v[i]);
    p1 += std::norm(v[i + 4]);
    off += v[i] * std::conj(v[i + 4]);
  }
  return 4.0 * (p0 * p1 - std::norm(off));
}

struct RoofObjective {
  Mat scaled_vectors;
  int m = 0;
  RoofMeasure measure = RoofMeasure::tau3;
  // Smoothing width for the modulus kinks of tau3; 0 evaluates the exact
  // ensemble average.
  double epsilon = 0.0;
  // Current chart center. theta parameterizes exp(i H(theta)) * base; the
  // descent periodically folds its progress into base and resets theta, so
  // steps always act near the identity where the chart is well conditioned.
  Mat base;

  int n_params() const { return m * m; }

  // theta -> Hermitian (diagonal first, then re/im pairs for the strict
  // upper triangle).
  Mat full_unitary(const Eigen::VectorXd& theta) const {
    Mat h(m, m);
    int p = m;
    for (int j = 0; j < m; ++j) h(j, j) = theta[j];
    for (int j = 0; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        h(j, k) = Complex(theta[p], theta[p + 1]);
        h(k, j) = std::conj(h(j, k));
        p += 2;
      }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(m);
    for (int j = 0; j < m; ++j) phases[j] = std::exp(I_UNIT * es.eigenvalues()[j]);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * base;
  }

  Mat isometry(const Eigen::VectorXd& theta) const {
    return full_unitary(theta).leftCols(scaled_vectors.cols());
  }

  void recenter(Eigen::VectorXd& theta) {
    base = full_unitary(theta);
    theta.setZero();
  }

  double operator()(const Eigen::VectorXd& theta) const {
    const Mat b = isometry(theta);
    const Mat members = scaled_vectors * b.transpose();  // column i = unnormalized member
    double total = 0.0;
    for (Eigen::Index i = 0; i < members.cols(); ++i) {
      const double w = members.col(i).squaredNorm();
      if (w < 1e-14) continue;
      const double raw = measure == RoofMeasure::tau3 ? tau3_raw(members.col(i))
                                                      : one_tangle_raw(members.col(i));
      const double v = raw / w;
      total += epsilon > 0.0 ? std::sqrt(v * v + epsilon * epsilon) : v;
    }
    return total;
  }
};

struct RestartOutcome {
  double value = 0.0;
  Eigen::VectorXd theta;
  Mat isometry;  // m x r point the restart ended at (chart-independent)
  bool converged = false;
  int sweeps = 0;
};

// One local descent. Coordinate search with per-coordinate adaptive steps
// plus two standard pattern-search refinements: a parabolic vertex trial when
// both side points fail, and a Hooke-Jeeves extrapolation along the
// aggregated sweep displacement. The modulus kinks of tau3 jam plain
// coordinate descent well above the valley floor, so the descent anneals a
// smoothed surrogate sqrt(v^2 + eps^2) over a fixed epsilon ladder, warm
// starting each stage and recentering the chart between stages; the last
// stage (and every reported value) is the exact objective.
inline RestartOutcome run_restart(RoofObjective f, std::uint64_t seed, int max_sweeps,
                                  double tolerance, double stop_below) {
  constexpr double kStepFloor = 1e-8;
  constexpr double kStepCap = 1.2;
  static constexpr double kEpsilonLadder[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5,
                                              1e-6, 1e-7, 1e-8, 0.0};
  const int n = f.n_params();

  SplitMix64 rng(seed);
  Eigen::VectorXd theta0(n);
  for (int i = 0; i < n; ++i) theta0[i] = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
  f.base = Mat::Identity(f.m, f.m);
  f.recenter(theta0);

  RestartOutcome out;
  out.theta = Eigen::VectorXd::Zero(n);

  int total_sweeps = 0;
  for (double eps : kEpsilonLadder) {
    f.epsilon = eps;
    out.value = f(out.theta);
    Eigen::VectorXd step = Eigen::VectorXd::Constant(n, eps >= 1e-1 ? 0.6 : 0.1);
    double cycle_start_value = out.value;
    // A smoothing stage only needs to park the iterate near its own floor;
    // sweeps that improve slower than this are better spent at smaller eps.
    const double stage_tolerance = std::max(tolerance, 1e-4 * eps);
    const int stage_cap = eps > 0.0 ? std::max(1, max_sweeps / 4) : max_sweeps;
    int stage_sweeps = 0;
    int slow_sweeps = 0;
    bool stage_done = false;
    while (total_sweeps < max_sweeps && stage_sweeps < stage_cap && !stage_done) {
      ++total_sweeps;
      ++stage_sweeps;
      const double sweep_start_value = out.value;
      const Eigen::VectorXd sweep_start_theta = out.theta;
      for (int j = 0; j < n; ++j) {
        const double s = step[j];
        const double original = out.theta[j];
        out.theta[j] = original + s;
        const double f_plus = f(out.theta);
        if (f_plus < out.value) {
          out.value = f_plus;
          step[j] = std::min(s * 1.6, kStepCap);
          continue;
        }
        out.theta[j] = original - s;
        const double f_minus = f(out.theta);
        if (f_minus < out.value) {
          out.value = f_minus;
          step[j] = std::min(s * 1.6, kStepCap);
          continue;
        }
        const double curvature = f_plus - 2.0 * out.value + f_minus;
        if (curvature > 0.0) {
          const double vertex = 0.5 * s * (f_minus - f_plus) / curvature;
          if (std::abs(vertex) > 1e-14 && std::abs(vertex) < s) {
            out.theta[j] = original + vertex;
            const double f_vertex = f(out.theta);
            if (f_vertex < out.value) {
              out.value = f_vertex;
              step[j] = s * 0.5;
              continue;
            }
          }
        }
        out.theta[j] = original;
        step[j] = s * 0.5;
      }
      const Eigen::VectorXd displacement = out.theta - sweep_start_theta;
      if (displacement.squaredNorm() > 0.0) {
        double scale = 1.0;
        for (int k = 0; k < 6; ++k) {
          const Eigen::VectorXd trial = out.theta + scale * displacement;
          const double candidate = f(trial);
          if (candidate >= out.value) break;
          out.value = candidate;
          out.theta = trial;
          scale *= 2.0;
        }
      }
      if (eps == 0.0 && out.value <= stop_below) {
        out.converged = true;
        out.sweeps = total_sweeps;
        out.isometry = f.isometry(out.theta);
        return out;
      }
      if (eps > 0.0) {
        slow_sweeps = sweep_start_value - out.value < stage_tolerance ? slow_sweeps + 1 : 0;
        if (slow_sweeps >= 2) stage_done = true;
      }
      if (step.maxCoeff() < kStepFloor) {
        if (eps > 0.0) {
          stage_done = true;
        } else if (cycle_start_value - out.value < tolerance) {
          out.converged = true;
          out.sweeps = total_sweeps;
          out.isometry = f.isometry(out.theta);
          return out;
        } else {
          cycle_start_value = out.value;
          f.recenter(out.theta);
          step.setConstant(0.1);
        }
      }
    }
    f.recenter(out.theta);
  }
  // Sweep budget exhausted mid-ladder; report the exact objective at the
  // final point.
  f.epsilon = 0.0;
  out.value = f(out.theta);
  out.sweeps = total_sweeps;
  out.converged = false;
  out.isometry = f.isometry(out.theta);
  return out;
}

}  // namespace detail

/// All size-m decompositions of a rank-r state arise from m x r isometries
/// applied to the scaled eigenvectors; this materializes one of them.
inline Ensemble ensemble_from_isometry(const DensityMatrix& rho, const Mat& u) {
  const detail::EigenBasis basis = detail::eigen_basis(rho);
  require(u.cols() == basis.rank, errc::rank_mismatch,
          "isometry column count must equal the state rank");
  require(u.rows() >= u.cols(), errc::not_isometry, "isometry needs at least r rows");
  const Mat gram = u.adjoint() * u;
  require((gram - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= 1e-10,
          errc::not_isometry, "columns are not orthonormal");

  const int n = detail::qubit_count(rho);
  const Mat members = basis.scaled_vectors * u.transpose();
  Ensemble e;
  for (Eigen::Index i = 0; i < members.cols(); ++i) {
    const double w = members.col(i).squaredNorm();
    if (w < 1e-12) continue;
    e.members.push_back({w, detail::pure_from_vec(n, members.col(i) / std::sqrt(w))});
  }
  return e;
}

template <typename F>
double ensemble_average(const Ensemble& e, F&& measure) {
  double total = 0.0;
  for (const auto& m : e.members) total += m.weight * measure(m.state);
  return total;
}

inline double ensemble_average_tau3(const Ensemble& e) {
  return ensemble_average(e, [](const PureState& s) { return three_tangle_pure(s); });
}

/// Multi-restart minimization of the ensemble-averaged pure-state measure
/// over decompositions of the target. Deterministic for a fixed seed; the
/// result is a valid upper bound on the convex roof whether or not the
/// search converged.
inline RoofResult roof_minimize(const RoofProblem& p) {
  validate_density(p.target);
  require(p.target.dim() == 8, errc::wrong_size, "roof search supports 3-qubit states only");
  require(p.restarts >= 1, errc::bad_parameter, "need at least one restart");

  const detail::EigenBasis basis = detail::eigen_basis(p.target);
  const int m = p.ensemble_size > 0 ? p.ensemble_size : std::max(8, 2 * basis.rank);
  require(m >= basis.rank, errc::rank_mismatch,
          "ensemble size must be at least the state rank");

  auto measure_of = [&](const PureState& s) {
    return p.measure == RoofMeasure::tau3 ? three_tangle_pure(s) : one_tangle_pure(s, 0);
  };

  if (basis.rank == 1) {
    Ensemble e = ensemble_from_isometry(p.target, Mat::Identity(1, 1));
    RoofResult r;
    r.ensemble = std::move(e);
    r.value = ensemble_average(r.ensemble, measure_of);
    r.converged = true;
    return r;
  }

  detail::RoofObjective objective{basis.scaled_vectors, m, p.measure, 0.0, Mat()};

  std::vector<detail::RestartOutcome> outcomes(static_cast<std::size_t>(p.restarts));
  auto run_index = [&](int i) {
    outcomes[static_cast<std::size_t>(i)] =
        detail::run_restart(objective, SplitMix64::derive(p.seed, static_cast<std::uint64_t>(i)),
                            p.max_sweeps, p.tolerance, p.stop_below);
  };

  if (p.stop_below > 0.0) {
    // Early-exit path is sequential so the set of evaluated restarts is
    // well defined.
    for (int i = 0; i < p.restarts; ++i) {
      run_index(i);
      if (outcomes[static_cast<std::size_t>(i)].value <= p.stop_below) {
        outcomes.resize(static_cast<std::size_t>(i) + 1);
        break;
      }
    }
  } else {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int n_threads = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(p.restarts)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < p.restarts; i += n_threads) run_index(i);
      });
    for (auto& th : pool) th.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].value < outcomes[best].value) best = i;

  RoofResult result;
  result.ensemble = ensemble_from_isometry(p.target, outcomes[best].isometry);
  result.value = ensemble_average(result.ensemble, measure_of);
  result.converged = outcomes[best].converged;
  result.iterations = outcomes[best].sweeps;
  return result;
}

/// Pointwise minimum of the X-family tangle over the phase cube, one value
/// per grid abscissa: coarse scan at the requested density, then a compass
/// refinement from the best cell.
inline std::vector<CurvePoint> characteristic_min_curve(const std::vector<double>& x_grid,
                                                        int phi_grid_density = 24) {
  require(phi_grid_density >= 4, errc::bad_parameter, "phi grid density must be >= 4");
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<CurvePoint> curve;
  curve.reserve(x_grid.size());
  for (double x : x_grid) {
    detail::check_unit_interval(x, "x");
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 3> best_phi{};
    for (int i1 = 0; i1 < phi_grid_density; ++i1)
      for (int i2 = 0; i2 < phi_grid_density; ++i2)
        for (int i3 = 0; i3 < phi_grid_density; ++i3) {
          const double p1 = two_pi * i1 / phi_grid_density;
          const double p2 = two_pi * i2 / phi_grid_density;
          const double p3 = two_pi * i3 / phi_grid_density;
          const double v = tau_x(x, p1, p2, p3);
          if (v < best) {
            best = v;
            best_phi = {p1, p2, p3};
          }
        }
    double step = two_pi / phi_grid_density;
    while (step > 1e-10) {
      bool improved = false;
      for (int j = 0; j < 3; ++j)
        for (double dir : {+1.0, -1.0}) {
          std::array<double, 3> trial = best_phi;
          trial[static_cast<std::size_t>(j)] += dir * step;
          const double v = tau_x(x, trial[0], trial[1], trial[2]);
          if (v < best) {
            best = v;
            best_phi = trial;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    curve.push_back({x, best});
  }
  return curve;
}

/// Largest convex function lying at or below the sampled points, evaluated on
/// the same abscissae (lower hull plus linear interpolation).
inline std::vector<CurvePoint> lower_convex_envelope(const std::vector<CurvePoint>& points) {
  require(points.size() >= 2, errc::too_few_points, "need at least two points");
  for (std::size_t i = 1; i < points.size(); ++i)
    require(points[i].x > points[i - 1].x, errc::bad_parameter,
            "points must be strictly increasing in x");

  std::vector<CurvePoint> hull;
  for (const CurvePoint& p : points) {
    while (hull.size() >= 2) {
      const CurvePoint& a = hull[hull.size() - 2];
      const CurvePoint& b = hull[hull.size() - 1];
      // pop b while slope(a,b) >= slope(b,p)
      if ((b.value - a.value) * (p.x - b.x) >= (p.value - b.value) * (b.x - a.x))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  std::vector<CurvePoint> env;
  env.reserve(points.size());
  std::size_t seg = 0;
  for (const CurvePoint& p : points) {
    while (seg + 1 < hull.size() && hull[seg + 1].x < p.x) ++seg;
    if (seg + 1 >= hull.size()) {
      env.push_back({p.x, hull.back().value});
      continue;
    }
    const CurvePoint& a = hull[seg];
    const CurvePoint& b = hull[seg + 1];
    const double t = (p.x - a.x) / (b.x - a.x);
    env.push_back({p.x, a.value + t * (b.value - a.value)});
  }
  return env;
}

enum class RefDecomposition {
  J_PiGHZ,        // eight equal-weight J states at the tau_j zeros
  X_sigma,        // four X(x, even-pattern) states, weights 1/4
  Mixed_lowx,     // X(3/4, .) block plus the J block, valid for x <= 3/4
  Mixed_highx,    // X(x1, .) block plus |GHZ,1+>, valid for x >= x1
  PatternB_sigma, // four X(x, odd-pattern) states, weights 1/4
  Product_PiGHZ,  // biseparable-product realization of pi_ghz
};

namespace detail {

inline constexpr std::array<std::array<double, 3>, 4> even_phase_patterns() {
  constexpr double pi = std::numbers::pi;
  return {{{0, 0, 0}, {0, pi, pi}, {pi, 0, pi}, {pi, pi, 0}}};
}

inline constexpr std::array<std::array<double, 3>, 4> odd_phase_patterns() {
  constexpr double pi = std::numbers::pi;
  return {{{pi, pi, pi}, {pi, 0, 0}, {0, pi, 0}, {0, 0, pi}}};
}

inline void append_x_block(Ensemble& e, double x, double block_weight,
                           const std::array<std::array<double, 3>, 4>& patterns) {
  for (const auto& p : patterns)
    e.members.push_back(
        {block_weight / 4.0, named_pure(StateLabel::x_state(x, p[0], p[1], p[2]))});
}

}  // namespace detail

inline Ensemble reference_decomposition(RefDecomposition which, double x = 0.0) {
  const Thresholds th;
  Ensemble e;
  switch (which) {
    case RefDecomposition::J_PiGHZ:
      for (const auto& [t1, t2] : j_zero_angles())
        e.members.push_back({1.0 / 8.0, named_pure(StateLabel::j(t1, t2))});
      break;
    case RefDecomposition::X_sigma:
      detail::check_unit_interval(x, "x");
      detail::append_x_block(e, x, 1.0, detail::even_phase_patterns());
      break;
    case RefDecomposition::PatternB_sigma:
      detail::check_unit_interval(x, "x");
      detail::append_x_block(e, x, 1.0, detail::odd_phase_patterns());
      break;
    case RefDecomposition::Mixed_lowx: {
      require(x >= 0.0 && x <= th.x0, errc::bad_parameter, "valid for x <= 3/4 only");
      detail::append_x_block(e, th.x0, x / th.x0, detail::even_phase_patterns());
      for (const auto& [t1, t2] : j_zero_angles())
        e.members.push_back({(th.x0 - x) / (8.0 * th.x0), named_pure(StateLabel::j(t1, t2))});
      break;
    }
    case RefDecomposition::Mixed_highx: {
      require(x >= th.x1 && x <= 1.0, errc::bad_parameter, "valid for x >= x1 only");
      detail::append_x_block(e, th.x1, (1.0 - x) / (1.0 - th.x1),
                             detail::even_phase_patterns());
      e.members.push_back({(x - th.x1) / (1.0 - th.x1), ghz_basis_state(1, +1)});
      break;
    }
    case RefDecomposition::Product_PiGHZ: {
      // (|GHZ,2+> +- |GHZ,3+>)/sqrt(2) are biseparable products with zero
      // one-tangle across A|(BC); together with |GHZ,4+> they realize pi_ghz
      // with ensemble-average one-tangle 1/3.
      const Vec g2 = ghz_basis_state(2, +1).amplitudes;
      const Vec g3 = ghz_basis_state(3, +1).amplitudes;
      const Vec plus = (g2 + g3) / std::sqrt(2.0);
      const Vec minus = (g2 - g3) / std::sqrt(2.0);
      e.members.push_back({1.0 / 3.0, detail::pure_from_vec(3, plus)});
      e.members.push_back({1.0 / 3.0, detail::pure_from_vec(3, minus)});
      e.members.push_back({1.0 / 3.0, ghz_basis_state(4, +1)});
      break;
    }
  }
  return e;
}

}  // namespace tangleforge
