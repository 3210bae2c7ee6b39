// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "generators.hpp"
#include "phasekit/symmetric.hpp"

namespace phasekit {
namespace {

using nlohmann::json;
using testing::kPi;
using testing::multiset_dist;
using testing::norm2;
using testing::Rng;
using testing::uniform;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// Runs the CLI, returns the exit code; stdout lands in `out`.
int cli(const std::string& args, std::string* out) {
  const std::string path = "/tmp/phasekit_acceptance_out.json";
  const std::string cmd = std::string(PHASEKIT_CLI_PATH) + " " + args + " >" + path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  if (out) *out = ss.str();
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/phasekit_acceptance_" + name;
  std::ofstream(path) << text;
  return path;
}

// 1. Example matrix [[1,2],[0,1]]
Outcome example_matrix() {
  Outcome o;
  const std::string in = write_temp("e1.json", R"({"re":[[1,2],[0,1]],"im":[[0,0],[0,0]]})");
  std::string out;
  o.check(cli("matrix-classify " + in, &out) == 0, "matrix-classify failed");
  if (!o.pass) return o;
  const json j = json::parse(out);
  o.check(j["class"] == "semi-sectorial", "class is " + j["class"].dump());
  const auto ph = j["phases"].get<std::vector<double>>();
  o.check(multiset_dist(ph, {kPi / 2, -kPi / 2}) <= 1e-9, "phases off");
  o.check(cli("real-congruence " + in, nullptr) == 1, "real-congruence did not refuse");
  ComplexMatrix C(2, 2);
  C << 1.0, 2.0, 0.0, 1.0;
  const double res = norm2(ComplexMatrix(semi_sectorial_decompose(C).reconstruct() - C));
  o.check(res <= 1e-10, "reconstruction " + num(res));
  return o;
}

// 2. K2 = -j TK^T Et TK and L2(a) = (1 + a j) TL^T Et TL
Outcome block_identities() {
  Outcome o;
  ComplexMatrix Et(2, 2);
  Et << 0.0, -kJ, -kJ, 1.0;
  ComplexMatrix K2(2, 2);
  K2 << 0.0, 1.0, 1.0, -kJ;
  o.check(norm2(ComplexMatrix(build_block({BlockKind::K, 2}) - K2)) == 0.0, "K2 block differs");
  ComplexMatrix TK(2, 2);
  TK << 1.0, 0.0, 0.0, -1.0;
  const double rk = norm2(ComplexMatrix(K2 - (-kJ) * TK.transpose() * Et * TK));
  o.check(rk <= 1e-12, "K2 residual " + num(rk));
  for (double a : {-3.0, -1.0, 0.0, 0.5, 2.0, 10.0}) {
    const Complex z(a, -1.0);
    ComplexMatrix L2(2, 2);
    L2 << 0.0, z, z, 1.0;
    o.check(norm2(ComplexMatrix(build_block({BlockKind::L, 2, a}) - L2)) == 0.0, "L2 block differs");
    ComplexMatrix TL(2, 2);
    TL << a * a + 1.0, a / 2.0, 0.0, 1.0;
    TL /= std::sqrt(a * a + 1.0);
    const double rl = norm2(ComplexMatrix(L2 - Complex(1.0, a) * TL.transpose() * Et * TL));
    o.check(rl <= 1e-12, "L2 residual " + num(rl) + " at a=" + num(a));
  }
  const BlockIdentityReport rep = verify_block_identities({-3.0, -1.0, 0.0, 0.5, 2.0, 10.0});
  o.check(rep.max_residual <= 1e-12, "library report " + num(rep.max_residual));
  return o;
}

// 3. zero location of every block family
Outcome zero_locations() {
  Outcome o;
  int wrong = 0;
  auto expect = [&](const ThompsonBlock& b, ZeroLocation z) {
    if (block_zero_location(b) != z) ++wrong;
    // the generic numerical-range classifier agrees
    if (zero_location(build_block(b)) != z) ++wrong;
  };
  expect({BlockKind::K, 2}, ZeroLocation::Boundary);
  for (int k : {3, 4, 5}) expect({BlockKind::K, k}, ZeroLocation::Interior);
  // block sizes are indices: M with size m is (2m - 1)-square, N with size n is 2n-square
  expect({BlockKind::M, 2}, ZeroLocation::Interior);
  expect({BlockKind::M, 3}, ZeroLocation::Interior);
  for (double a : {-2.0, 0.0, 1.0}) {
    expect({BlockKind::L, 2, a}, ZeroLocation::Boundary);
    expect({BlockKind::L, 3, a}, ZeroLocation::Interior);
    expect({BlockKind::L, 4, a}, ZeroLocation::Interior);
    for (double b : {-2.0, -0.5, 0.5, 2.0}) {
      expect({BlockKind::N, 1, a, b}, ZeroLocation::Interior);
      expect({BlockKind::N, 2, a, b}, ZeroLocation::Interior);
    }
  }
  o.check(wrong == 0, std::to_string(wrong) + " misclassifications");
  return o;
}

// 4. real congruence round trip on assembled symmetric matrices
Outcome real_congruence_round_trip() {
  Outcome o;
  Rng rng(401);
  for (int trial = 0; trial < 200 && o.pass; ++trial) {
    const int n = 1 + trial % 8;
    const testing::Structure s = testing::random_structure(rng, n);
    const RealMatrix T = testing::random_conditioned(rng, n, std::pow(10.0, uniform(rng, 0.0, 3.0)));
    const ComplexMatrix Tc = T.cast<Complex>();
    const ComplexMatrix C = Tc.transpose() * s.core() * Tc;
    const RealCongruenceDecomposition d = real_congruence_decompose(C);
    const std::string at = " (trial " + std::to_string(trial) + ")";
    const double res = norm2(ComplexMatrix(d.reconstruct() - C));
    o.check(res <= 1e-8 * norm2(C), "reconstruction " + num(res / norm2(C)) + at);
    o.check(d.kernel_dim == s.kernel_dim, "kernel dimension" + at);
    o.check(d.d_phases.size() == s.d_phases.size(), "diagonal count" + at);
    o.check(d.e_block_count == s.e_blocks, "E block count" + at);
    o.check(multiset_dist(d.phases(), s.phases) <= 1e-6, "phases" + at);
  }
  return o;
}

// 5. Takagi factorization against the SVD
Outcome takagi_suite() {
  Outcome o;
  Rng rng(501);
  for (int trial = 0; trial < 500 && o.pass; ++trial) {
    const int n = 1 + trial % 10;
    const ComplexMatrix X = testing::random_complex(rng, n, n);
    const ComplexMatrix C = (X + X.transpose()) / 2.0;
    const TakagiFactorization t = takagi(C);
    const std::string at = " (trial " + std::to_string(trial) + ")";
    const ComplexMatrix R = t.U * t.sigma.cast<Complex>().asDiagonal() * t.U.transpose();
    const double scale = std::max(1.0, norm2(C));
    o.check(norm2(ComplexMatrix(R - C)) <= 1e-10 * scale, "reconstruction" + at);
    o.check(norm2(ComplexMatrix(t.U.adjoint() * t.U - ComplexMatrix::Identity(n, n))) <= 1e-10, "unitarity" + at);
    const RealVector sv = Eigen::JacobiSVD<ComplexMatrix>(C).singularValues();
    o.check((t.sigma - sv).cwiseAbs().maxCoeff() <= 1e-10 * scale, "singular values" + at);
  }
  return o;
}

// Random semi-sectorial B = S^H diag(e^{j psi}) S with psi in [alpha, beta].
ComplexMatrix random_phase_bounded(Rng& rng, int n, double alpha, double beta) {
  ComplexVector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::polar(uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : 1.0, uniform(rng, alpha, beta));
  const ComplexMatrix S = testing::random_complex(rng, n, n);
  return S.adjoint() * d.asDiagonal() * S;
}

// 6. matrix small phase check against sampling
Outcome matrix_small_phase() {
  Outcome o;
  Rng rng(601);
  int held = 0, failed = 0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    const int n = 1 + trial % 5;
    const double theta0 = uniform(rng, -kPi, kPi);
    const int kernel = testing::uniform_int(rng, 0, n - 1);
    std::vector<double> phi;
    for (int i = kernel; i < n; ++i) phi.push_back(theta0 + uniform(rng, -1.4, 1.4));
    std::sort(phi.rbegin(), phi.rend());
    const ComplexMatrix T = testing::random_nonsingular(rng, n, 5.0);
    const ComplexMatrix A = T.adjoint() * assemble_core(kernel, phi, 0, 0.0) * T;
    const double alpha = uniform(rng, -2.5, 1.0);
    const double beta = alpha + uniform(rng, 0.0, 2.5);
    const MatrixCheck c = matrix_small_phase_check(A, alpha, beta);
    const ComplexMatrix I = ComplexMatrix::Identity(n, n);
    const std::string at = " (trial " + std::to_string(trial) + ")";
    if (c.holds) {
      ++held;
      double worst = INFINITY;
      for (int k = 0; k < 10000; ++k) {
        const ComplexMatrix B = random_phase_bounded(rng, n, alpha, beta);
        worst = std::min(worst, std::abs(ComplexMatrix(I + A * B).determinant()));
      }
      o.check(worst > 1e-6, "min |det(I + AB)| " + num(worst) + at);
    } else {
      ++failed;
      o.check(c.witness.has_value(), "no witness" + at);
      if (!o.pass) break;
      const ComplexMatrix& B = *c.witness;
      const PhaseSector pb = phases(B);
      o.check(testing::fits_mod_2pi(pb.min(), pb.max(), alpha, beta, 1e-9), "witness phases" + at);
      o.check(sigma_min(ComplexMatrix(I + A * B)) <= 1e-8, "witness not singular" + at);
    }
  }
  if (o.pass) o.detail = std::to_string(held) + " hold, " + std::to_string(failed) + " fail";
  return o;
}

std::vector<Complex> eigenvalues(const RealMatrix& A) {
  std::vector<Complex> out;
  if (A.rows() == 0) return out;
  const Eigen::EigenSolver<RealMatrix> es(A, false);
  for (Eigen::Index i = 0; i < A.rows(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Destabilization evidence recomputed from G and H.
void check_destabilizer(Outcome& o, const StateSpace& G, const DestabilizerReport& r, const PhaseEnvelope& env,
                        const std::string& at) {
  const bool inf = std::isinf(r.omega0);
  const ComplexMatrix g = inf ? eval_inf(G) : eval(G, Complex(0, r.omega0));
  const ComplexMatrix h = inf ? eval_inf(r.H) : eval(r.H, Complex(0, r.omega0));
  const double smin = sigma_min(ComplexMatrix(ComplexMatrix::Identity(G.size(), G.size()) + g * h));
  o.check(smin <= 1e-6 * (1 + norm2(g) * norm2(h)), "sigma_min " + num(smin) + at);
  o.check(is_stable(r.H) && is_symmetric_system(r.H), "H not stable and symmetric" + at);
  o.check(envelope_membership(r.H, env, true).member, "H outside the envelope" + at);
  if (inf) {
    // I + G(inf) H(inf) singular: the loop is ill-posed, hence not in RH-infinity
    return;
  }
  double d = INFINITY;
  for (const Complex& p : eigenvalues(interconnect(G, r.H).A)) d = std::min(d, std::abs(p - Complex(0, r.omega0)));
  o.check(d <= 1e-6, "closed-loop pole " + num(d) + " from j w0" + at);
}

// 7. destabilizer synthesis for symmetric plants
Outcome symmetric_synthesis() {
  Outcome o;
  const StateSpace G = testing::allpass_squared();
  const PhaseEnvelope zero = PhaseEnvelope::constant(0.0, 0.0);
  const DestabilizerReport r = synthesize_destabilizer_symmetric(G, zero);
  o.check(std::abs(r.omega0 - 1.0) <= 1e-6, "omega0 " + num(r.omega0));
  check_destabilizer(o, G, r, zero, " (all-pass squared)");

  Rng rng(701);
  int built = 0;
  for (int trial = 0; trial < 500 && built < 10 && o.pass; ++trial) {
    const StateSpace P = testing::random_symmetric_system(rng, 2);
    if (!is_stable(P)) continue;
    const double w = std::pow(10.0, uniform(rng, -1, 1));
    const ComplexMatrix p = eval(P, Complex(0, w));
    if (classify(p).tag == SectorialTag::Indefinite) continue;
    // pi - phi_max(w) placed inside an envelope that also holds 0
    const double c = testing::wrap(kPi - phases(p).max());
    const double alpha = std::min(c, 0.0) - uniform(rng, 0.05, 0.5);
    const double beta = std::max(c, 0.0) + uniform(rng, 0.05, 0.5);
    // a bump around w on a narrow band, pinned to 0 at w = 0 as C_s requires
    const PhaseEnvelope env({{0.0, 0.0, 0.0},
                             {w / 10, -0.05, 0.05},
                             {w, alpha, beta},
                             {10 * w, -0.05, 0.05},
                             {kInfFrequency, -0.05, 0.05}});
    DestabilizerReport d;
    try {
      d = synthesize_destabilizer_symmetric(P, env);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotFrequencyWiseSemiSectorial) continue;
      o.check(false, std::string(e.what()) + " (trial " + std::to_string(trial) + ")");
      break;
    }
    ++built;
    check_destabilizer(o, P, d, env, " (trial " + std::to_string(trial) + ")");
  }
  o.check(built == 10, "only " + std::to_string(built) + " random instances");
  return o;
}

// 8. sufficiency of both certificates
Outcome sufficiency() {
  Outcome o;
  Rng rng(801);
  int phase = 0, gain = 0;
  for (int trial = 0; trial < 5000 && phase < 500 && o.pass; ++trial) {
    const int m = 1 + trial % 2;
    const StateSpace G = testing::random_symmetric_system(rng, m);
    const StateSpace H = testing::random_symmetric_system(rng, m);
    if (certify_small_phase(G, H).verdict != Verdict::CertifiedStable) continue;
    ++phase;
    o.check(is_feedback_stable(G, H), "phase-certified pair unstable (trial " + std::to_string(trial) + ")");
  }
  for (int trial = 0; trial < 5000 && gain < 500 && o.pass; ++trial) {
    const int m = 1 + trial % 2;
    const StateSpace G = testing::random_stable_system(rng, 1 + trial % 3, m);
    StateSpace H = testing::random_stable_system(rng, 1 + trial % 2, m);
    const double k = uniform(rng, 0.3, 1.3) / (hinf_norm(G).value * hinf_norm(H).value);
    H.C *= k;
    H.D *= k;
    if (certify_small_gain(G, H).verdict != Verdict::CertifiedStable) continue;
    ++gain;
    o.check(is_feedback_stable(G, H), "gain-certified pair unstable (trial " + std::to_string(trial) + ")");
  }
  o.check(phase == 500 && gain == 500,
          "certified pairs: " + std::to_string(phase) + " phase, " + std::to_string(gain) + " gain");
  return o;
}

// 9. first- and second-order scalar oracles
Outcome siso_oracle() {
  Outcome o;
  const StateSpace G = tf({1.0}, {1.0, 1.0});
  std::vector<double> w;
  for (int i = 0; i < 1000; ++i) w.push_back(std::pow(10.0, -3.0 + 6.0 * i / 999));
  const PhaseResponse r = phase_response(G, axis_contour(w));
  double worst = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    worst = std::max({worst, std::abs(r.samples[i].phi_high + std::atan(w[i])),
                      std::abs(r.samples[i].phi_low + std::atan(w[i]))});
  }
  o.check(r.samples.size() == w.size() && worst <= 1e-12, "phase error " + num(worst));
  const PhaseInterval phi = phi_inf_sector(G);
  o.check(std::abs(phi.low + kPi / 2) <= 1e-6 && std::abs(phi.high) <= 1e-6,
          "sector [" + num(phi.low) + ", " + num(phi.high) + "]");
  double oracle = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double x = 10.0 * i / 1e6;
    oracle = std::max(oracle, 1.0 / std::abs(Complex(1 - x * x, 0.2 * x)));
  }
  const double h = hinf_norm(tf({1.0}, {1.0, 0.2, 1.0})).value;
  o.check(std::abs(h - oracle) <= 1e-3, "hinf " + num(h) + " vs " + num(oracle));
  return o;
}

// 10. static gain destabilizer at the gain bound
Outcome static_gain() {
  Outcome o;
  RealMatrix D = RealMatrix::Zero(2, 2);
  D(0, 0) = 0.5;
  D(1, 1) = 0.25;
  const StateSpace G = StateSpace::gain(D);
  GainEnvelope env;
  env.constant = 2.0;
  const DestabilizerReport r = synthesize_destabilizer_gain_symmetric(G, env);
  o.check(is_symmetric_system(r.H) && is_stable(r.H), "H not stable and symmetric");
  const double norm = hinf_norm(r.H).value;
  o.check(norm <= 2.0 + 1e-12, "||H|| " + num(norm));
  const double smin = sigma_min(ComplexMatrix(ComplexMatrix::Identity(2, 2) + eval(G, 0.0) * eval(r.H, 0.0)));
  o.check(smin <= 1e-10, "sigma_min " + num(smin));
  return o;
}

}  // namespace
}  // namespace phasekit

int main() {
  using namespace phasekit;
  struct Criterion {
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"example matrix classification and decomposition", 1, example_matrix},
      {"K2 and L2(a) block identities", 1, block_identities},
      {"zero location of the canonical blocks", 10, zero_locations},
      {"real congruence round trip (200 matrices)", 60, real_congruence_round_trip},
      {"Takagi factorization (500 matrices)", 30, takagi_suite},
      {"matrix small phase check vs sampling (100 instances)", 120, matrix_small_phase},
      {"destabilizer synthesis for symmetric plants", 60, symmetric_synthesis},
      {"small phase and small gain sufficiency (500 + 500)", 180, sufficiency},
      {"scalar phase, sector and H-infinity oracles", 10, siso_oracle},
      {"static destabilizer at the gain bound", 1, static_gain},
  };
  int failures = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > all[i].budget) {
      o.pass = false;
      o.detail = "over the " + num(all[i].budget) + " s budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s [%.2f s]%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, secs,
                o.detail.empty() ? "" : " - ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
