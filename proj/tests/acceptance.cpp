// Acceptance suite: every quantitative claim the library reproduces, one
// criterion per line. Exits nonzero if any criterion fails.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "helpers.hpp"

using namespace tangleforge;

namespace {

struct Harness {
  int failures = 0;

  void criterion(int id, const std::string& label, const std::function<bool(std::string&)>& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %2d. %s%s%s\n", ok ? "PASS" : "FAIL", id, label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

RoofProblem problem(const DensityMatrix& rho, RoofMeasure measure, int restarts,
                    double stop_below = 0.0, int m = 0) {
  RoofProblem p;
  p.target = rho;
  p.measure = measure;
  p.ensemble_size = m;
  p.restarts = restarts;
  p.seed = 42;
  p.stop_below = stop_below;
  return p;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

int main() {
  Harness h;
  const Thresholds th;
  const double pi = std::numbers::pi;

  h.criterion(1, "tau3(GHZ) = 1 and tau3(W) = 0 within 1e-12", [&](std::string& d) {
    const double ghz = three_tangle_pure(named_pure(StateLabel::ghz()));
    const double w = three_tangle_pure(named_pure(StateLabel::w()));
    d = "tau3(GHZ)=" + fmt(ghz) + " tau3(W)=" + fmt(w);
    return std::abs(ghz - 1.0) <= 1e-12 && w <= 1e-12;
  });

  h.criterion(2, "J-family closed form on a 20x20 grid within 1e-10; 8 zeros below 1e-12",
              [&](std::string& d) {
                double worst = 0.0;
                for (int i = 0; i < 20; ++i)
                  for (int k = 0; k < 20; ++k) {
                    const double t1 = 2 * pi * i / 20, t2 = 2 * pi * k / 20;
                    const double poly =
                        three_tangle_pure(named_pure(StateLabel::j(t1, t2)));
                    worst = std::max(worst, std::abs(poly - tau_j(t1, t2)));
                  }
                double worst_zero = 0.0;
                for (const auto& [t1, t2] : j_zero_angles()) {
                  worst_zero = std::max(worst_zero, tau_j(t1, t2));
                  worst_zero = std::max(
                      worst_zero, three_tangle_pure(named_pure(StateLabel::j(t1, t2))));
                }
                d = "grid dev " + fmt(worst) + ", zero max " + fmt(worst_zero);
                return worst <= 1e-10 && j_zero_angles().size() == 8 && worst_zero <= 1e-12;
              });

  h.criterion(3, "roof(pi_ghz, tau3) <= 1e-6 and the J ensemble averages <= 1e-12",
              [&](std::string& d) {
                const RoofResult r =
                    roof_minimize(problem(pi_ghz(), RoofMeasure::tau3, 8, 1e-8));
                const double ens =
                    ensemble_average_tau3(reference_decomposition(RefDecomposition::J_PiGHZ));
                d = "roof " + fmt(r.value) + ", ensemble " + fmt(ens);
                return r.value <= 1e-6 && ens <= 1e-12;
              });

  h.criterion(4, "pi-tangle: pi3(pi_ghz) = 1/9 and pi3(W) = 4(sqrt(5)-1)/9 within 1e-10",
              [&](std::string& d) {
                const double a = pi_tangle(pi_ghz());
                const double b = pi_tangle(projector(named_pure(StateLabel::w())));
                const double expected_w = 4.0 * (std::sqrt(5.0) - 1.0) / 9.0;
                d = "pi3(pi_ghz)=" + fmt(a) + " pi3(W)=" + fmt(b);
                return std::abs(a - 1.0 / 9.0) <= 1e-10 && std::abs(b - expected_w) <= 1e-10;
              });

  h.criterion(5, "one-tangle closed form: 5/9 at x=0 and x=3/4; odd-pattern average on 21 points",
              [&](std::string& d) {
                const double at0 = one_tangle_sigma(0.0);
                const double at34 = one_tangle_sigma(0.75);
                double worst = 0.0;
                for (int i = 0; i <= 20; ++i) {
                  const double x = i / 20.0;
                  const Ensemble e =
                      reference_decomposition(RefDecomposition::PatternB_sigma, x);
                  const double avg = ensemble_average(
                      e, [](const PureState& s) { return one_tangle_pure(s, 0); });
                  worst = std::max(worst, std::abs(avg - one_tangle_sigma(x)));
                }
                d = "x=0: " + fmt(at0) + ", x=3/4: " + fmt(at34) + ", grid dev " + fmt(worst);
                return std::abs(at0 - 5.0 / 9.0) <= 1e-12 &&
                       std::abs(at34 - 5.0 / 9.0) <= 1e-12 && worst <= 1e-10;
              });

  h.criterion(6, "x1 minimizes alpha_II; alpha_I convexity flips once in (0.95, 0.97) at x*",
              [&](std::string& d) {
                const double h_fd = 1e-5;
                const double derivative =
                    (alpha_II(0.97, th.x1 + h_fd) - alpha_II(0.97, th.x1 - h_fd)) / (2 * h_fd);
                const double h2 = 1e-4;
                int sign_changes = 0;
                double change_at = 0.0;
                double prev = alpha_I(0.95 - h2) - 2 * alpha_I(0.95) + alpha_I(0.95 + h2);
                for (int i = 1; i <= 400; ++i) {
                  const double x = 0.95 + 0.02 * i / 400.0;
                  const double second = alpha_I(x - h2) - 2 * alpha_I(x) + alpha_I(x + h2);
                  if ((second < 0) != (prev < 0)) {
                    ++sign_changes;
                    change_at = x;
                  }
                  prev = second;
                }
                d = "dalpha_II/dx1 = " + fmt(derivative) + ", flip at " + fmt(change_at) +
                    " vs x* = " + fmt(th.x_star);
                return std::abs(derivative) < 1e-6 && sign_changes == 1 &&
                       std::abs(change_at - th.x_star) < 1e-3;
              });

  h.criterion(7, "tau_sigma continuous at x0, x1; roof within [-1e-9, +1e-3] on 7 x values",
              [&](std::string& d) {
                // branch values agree at the boundary points
                const bool continuous =
                    std::abs(alpha_I(th.x0) - 0.0) <= 1e-10 &&
                    std::abs(alpha_II(th.x1, th.x1) - alpha_I(th.x1)) <= 1e-10;
                double worst_low = 0.0, worst_high = 0.0;
                std::ostringstream detail;
                for (double x : {0.0, 0.25, 0.5, 0.8, 0.9, 0.95, 1.0}) {
                  const double analytic = tau_sigma(x);
                  const double stop = analytic == 0.0 ? 1e-10 : 0.0;
                  const RoofResult r =
                      roof_minimize(problem(sigma(x), RoofMeasure::tau3, 8, stop));
                  worst_low = std::min(worst_low, r.value - analytic);
                  worst_high = std::max(worst_high, r.value - analytic);
                  detail << " " << x << ":" << fmt(r.value - analytic);
                }
                d = "deviations" + detail.str();
                return continuous && worst_low >= -1e-9 && worst_high <= 1e-3;
              });

  h.criterion(8, "hull of the phi-minimized curves matches tau_sigma within 5e-3 on 101 points",
              [&](std::string& d) {
                std::vector<double> grid(101);
                for (int i = 0; i <= 100; ++i) grid[static_cast<std::size_t>(i)] = i / 100.0;
                const auto curve = characteristic_min_curve(grid, 24);
                const auto envelope = lower_convex_envelope(curve);
                double worst = 0.0;
                for (std::size_t i = 0; i < curve.size(); ++i)
                  worst = std::max(worst,
                                   std::abs(envelope[i].value - tau_sigma(curve[i].x)));
                d = "max deviation " + fmt(worst);
                return worst <= 5e-3;
              });

  h.criterion(9, "monogamy slack >= -1e-9 on 1001 points; sigma two-tangles vanish",
              [&](std::string& d) {
                double min_slack = std::numeric_limits<double>::infinity();
                double worst_conc = 0.0;
                for (int i = 0; i <= 1000; ++i) {
                  const double x = i / 1000.0;
                  min_slack = std::min(min_slack, one_tangle_sigma(x) - tau_sigma(x));
                  const DensityMatrix rho = sigma(x);
                  worst_conc = std::max(
                      worst_conc, concurrence_two_qubit(partial_trace(rho, {0, 1})));
                  worst_conc = std::max(
                      worst_conc, concurrence_two_qubit(partial_trace(rho, {0, 2})));
                }
                d = "min slack " + fmt(min_slack) + ", max concurrence " + fmt(worst_conc);
                return min_slack >= -1e-9 && worst_conc <= 1e-10;
              });

  h.criterion(10, "E_ms(Psi5) = 43/45, E_ms(GHZ) = 1, E_ms(W) = 0 within 1e-10",
              [&](std::string& d) {
                const double p5 = e_ms(named_pure(StateLabel::psi5()));
                const double g = e_ms(named_pure(StateLabel::ghz()));
                const double w = e_ms(named_pure(StateLabel::w()));
                d = "Psi5 " + fmt(p5) + ", GHZ " + fmt(g) + ", W " + fmt(w);
                return std::abs(p5 - 43.0 / 45.0) <= 1e-10 && std::abs(g - 1.0) <= 1e-10 &&
                       std::abs(w) <= 1e-10;
              });

  h.criterion(11, "Bloch purity law, simplex membership, and zero roofs on 100 hull points",
              [&](std::string& d) {
                SplitMix64 rng(20250810);
                double purity_dev = 0.0;
                for (int trial = 0; trial < 100; ++trial) {
                  const DensityMatrix rho = tftest::random_density(
                      2, 1 + static_cast<int>(rng.next() % 4), rng);
                  const BlochVector n = bloch_vector(rho);
                  const double purity = (rho.entries * rho.entries).trace().real();
                  purity_dev = std::max(
                      purity_dev,
                      std::abs(purity - (0.25 + 0.75 * n.components.squaredNorm())));
                }
                const auto center = polyhedron_membership(embed_ghz_subspace(sigma(0.75)));
                double center_dev = 1.0;
                if (center) {
                  center_dev = 0.0;
                  for (double w : *center) center_dev = std::max(center_dev, std::abs(w - 0.25));
                }
                const bool rejects = !polyhedron_membership(embed_ghz_subspace(pi_ghz()));

                const auto patterns = detail::even_phase_patterns();
                double worst_roof = 0.0, worst_recovery = 0.0;
                for (int trial = 0; trial < 100; ++trial) {
                  std::array<double, 4> w{};
                  double total = 0.0;
                  for (double& wi : w) {
                    wi = 0.05 + rng.uniform();
                    total += wi;
                  }
                  Ensemble hull;
                  for (std::size_t i = 0; i < 4; ++i) {
                    w[i] /= total;
                    hull.members.push_back(
                        {w[i], named_pure(StateLabel::x_state(0.75, patterns[i][0],
                                                              patterns[i][1], patterns[i][2]))});
                  }
                  const DensityMatrix rho = density_from_ensemble(hull);
                  const auto recovered = polyhedron_membership(embed_ghz_subspace(rho));
                  if (!recovered) return false;
                  for (std::size_t i = 0; i < 4; ++i)
                    worst_recovery = std::max(worst_recovery, std::abs((*recovered)[i] - w[i]));
                  const RoofResult r =
                      roof_minimize(problem(rho, RoofMeasure::tau3, 12, 1e-5, 4));
                  worst_roof = std::max(worst_roof, r.value);
                }
                d = "purity dev " + fmt(purity_dev) + ", center dev " + fmt(center_dev) +
                    ", recovery " + fmt(worst_recovery) + ", worst roof " + fmt(worst_roof);
                return purity_dev <= 1e-10 && center_dev <= 1e-8 && rejects &&
                       worst_recovery <= 1e-8 && worst_roof < 1e-4;
              });

  h.criterion(12, "LU equivalence of sigma_tilde: exact conjugation, roof match, bound refusal",
              [&](std::string& d) {
                const Mat z_op = kron(kron(pauli_z(), identity2()), identity2());
                double conj_dev = 0.0;
                for (double y : {0.2, 0.9})
                  conj_dev = std::max(
                      conj_dev, frobenius_distance(sigma_tilde(y).entries,
                                                   z_op * sigma(y).entries * z_op.adjoint()));
                double roof_dev = 0.0;
                for (double y : {0.2, 0.9}) {
                  const double stop = tau_sigma(y) == 0.0 ? 1e-10 : 0.0;
                  const RoofResult a =
                      roof_minimize(problem(sigma(y), RoofMeasure::tau3, 8, stop));
                  const RoofResult b =
                      roof_minimize(problem(sigma_tilde(y), RoofMeasure::tau3, 8, stop));
                  roof_dev = std::max(roof_dev, std::abs(a.value - b.value));
                }
                bool refused = false;
                try {
                  rank8_upper_bound(0.5, 0.5, 0.8);
                } catch (const Error& e) {
                  refused = e.code() == errc::bad_parameter;
                }
                d = "conjugation dev " + fmt(conj_dev) + ", roof dev " + fmt(roof_dev);
                return conj_dev <= 1e-12 && roof_dev <= 2e-3 && refused;
              });

  h.criterion(13, "CLI surfaces both the 5/9 closed form and a <= 1/3 roof upper bound",
              [&](std::string& d) {
                std::ostringstream out, err;
                const int code = cli::run(
                    {"measures", "pi-ghz", "--restarts", "4", "--seed", "42"}, out, err);
                if (code != 0) {
                  d = "exit code " + std::to_string(code);
                  return false;
                }
                const auto j = nlohmann::json::parse(out.str());
                const double closed = j["one_tangle_closed_form"].get<double>();
                const double upper = j["one_tangle_roof_upper"].get<double>();
                const bool flag = j["discrepancy"].get<bool>();
                d = "closed form " + fmt(closed) + ", roof upper " + fmt(upper) +
                    (flag ? ", flagged" : ", NOT flagged");
                return std::abs(closed - 5.0 / 9.0) <= 1e-10 && upper <= 1.0 / 3.0 + 1e-6 &&
                       flag;
              });

  std::printf("%s: %d of 13 criteria failed\n", h.failures == 0 ? "OK" : "FAILED", h.failures);
  return h.failures == 0 ? 0 : 1;
}
