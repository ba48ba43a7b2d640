// Acceptance checks AC1..AC11. Usage: acceptance <ACn|all> [path-to-fluidex]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "experiments.hpp"
#include "fluidex/bas_dynamics.hpp"
#include "fluidex/exponent_estimator.hpp"
#include "fluidex/le_oracle.hpp"
#include "fluidex/spectral_toolbox.hpp"

using namespace fluidex;
namespace fs = std::filesystem;

namespace {

std::string g_fluidex;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Vec v2(double a, double b) { return make_vec({a, b}); }

void ac1(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  BasState e = integrate_bas(make_flow("cellular"), {v2(0, 0), v2(1, 0), v2(0, 1), SampleClass::Star2}, 10.0, 1e-3);
  const double rel = std::abs(e.beta - 10.0) / 10.0;
  const double dt = seconds_since(t0);
  o.check(rel <= 1e-6, "log|b(10)| = " + num(e.beta, 12) + ", rel err " + num(rel));
  o.check(dt < 1.0, "runtime " + num(dt, 3) + " s");
}

void ac2(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto f = make_flow("cellular");
  const std::vector<double> H{5, 10, 20, 30};
  auto star = estimate_exponent(f, SampleClass::Star2, H, 500, 1);
  auto al = estimate_exponent(f, SampleClass::F2Aligned, H, 500, 1);
  const double dt = seconds_since(t0);
  o.check(star.mu_hat >= 0.95 && star.mu_hat <= 1.10, "mu_2* = " + num(star.mu_hat));
  o.check(al.mu_hat >= 0.8, "mu_2F(aligned) = " + num(al.mu_hat));
  o.check(dt < 120.0, "runtime " + num(dt, 3) + " s");
}

void ac3(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  ReportConfig rc;
  rc.classes = {SampleClass::Full, SampleClass::Star2, SampleClass::F2Complement, SampleClass::F2Aligned,
                SampleClass::F2};
  rc.horizons = {5, 10, 20, 30};
  rc.n = 500;
  auto k = composite_report(make_flow("constant", {{"c1", 1.0}, {"c2", 0.5}}), rc);
  double worst = 0.0;
  for (const auto& e : k.estimates) worst = std::max(worst, std::abs(e.mu_hat));
  o.check(!k.estimates.empty() && worst <= 1e-9,
          "constant: " + std::to_string(k.estimates.size()) + " classes, max |mu| = " + num(worst));

  rc.horizons = {10, 20, 30, 40};
  auto s = composite_report(make_flow("shear"), rc);
  double top = -1e300;
  std::string each;
  for (const auto& e : s.estimates) {
    top = std::max(top, e.mu_hat);
    each += " " + to_string(e.class_tag) + "=" + num(e.mu_hat, 3);
  }
  o.check(!s.estimates.empty() && top <= 0.05, "shear:" + each);
  const double dt = seconds_since(t0);
  o.check(dt < 120.0, "runtime " + num(dt, 3) + " s");
}

void ac4(Outcome& o) {
  for (const std::string name : {"cellular", "abc"}) {
    auto f = make_flow(name);
    auto samples = sample_admissible(f, SampleClass::Full, 500, 7);
    samples.resize(std::min<std::size_t>(samples.size(), 500));
    double worst = 0.0;
    for (const auto& s : samples) {
      BasState st = initial_state(s);
      for (int j = 0; j < 200; ++j) {
        st = advance(f, st, 0.1, 1e-3);
        worst = std::max(worst, std::abs(st.c.dot(st.eta)));
      }
    }
    o.check(samples.size() == 500 && worst <= 1e-7,
            name + ": " + std::to_string(samples.size()) + " samples, max|<c,eta>| = " + num(worst));
  }
}

void ac5(Outcome& o) {
  auto f = make_flow("cellular");
  auto samples = sample_admissible(f, SampleClass::Full, 50, 11);
  samples.resize(50);
  double worst = 0.0;
  for (const auto& s : samples) {
    TransportMatrix A = transport_matrix(f, s.x0, s.xi0, 1.0);
    TransportMatrix B = transport_matrix(f, A.x_t, A.xi_t, 1.0);
    TransportMatrix C = transport_matrix(f, s.x0, s.xi0, 2.0);
    worst = std::max(worst, (C.A0 - B.A0 * A.A0).norm());
  }
  o.check(worst <= 1e-6, "max composition gap " + num(worst));
}

void ac6(Outcome& o) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> G;
  for (auto [name, K] : {std::pair<std::string, int>{"cellular", 8}, {"abc", 6}}) {
    auto f = make_flow(name);
    OperatorMatrix op = build_B_matrix(f, K);
    const double skew = (op.M + op.M.adjoint()).norm();
    o.check(skew <= 1e-10, name + " K=" + std::to_string(K) + ": ||M+M^H||_F = " + num(skew));
    double worst = 0.0;
    for (int r = 0; r < 5; ++r) {
      Eigen::VectorXcd c(op.size());
      for (auto& x : c) x = cplx(G(rng), G(rng));
      Eigen::VectorXcd Bc = op.M * c;
      FourierField field = op.field(Bc, f.dim() == 2 ? 64 : 32);
      worst = std::max(worst, factor_norm(field, op) / Bc.norm());
    }
    o.check(worst <= 1e-8, name + ": factor_norm(B c)/||B c|| = " + num(worst));
  }
}

void ac7(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& s : app::solproj_sweeps(1))
    o.check(std::abs(s.fit.slope - 1.0) <= 0.15, s.label + " slope " + num(s.fit.slope, 4));
  auto in3 = app::inimage3d_sweep();
  o.check(std::abs(in3.fit.slope - 2.5) <= 0.3, in3.label + " slope " + num(in3.fit.slope, 4));
  auto im2 = app::image2d_sweep(256);
  o.check(std::abs(im2.fit.slope - 1.0) <= 0.15, im2.label + " slope " + num(im2.fit.slope, 4));
  for (const auto& s : app::kernel2d_sweeps(256, 24))
    o.check(s.fit.slope >= 0.8, s.label + " slope " + num(s.fit.slope, 4));
  const double dt = seconds_since(t0);
  o.check(dt < 300.0, "runtime " + num(dt, 4) + " s");
}

void ac8(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto f = make_flow("cellular");
  const int N = 256;
  const double dt = 0.4 * (kTwoPi / N) / max_speed(f, N);
  const std::vector<double> ts{0, 0.5, 1, 1.5, 2, 2.5, 3};
  auto fine = compare_growth(f, app::stable_line_packet(1.0 / 64), ts, N, dt, 5e-3);
  auto coarse = compare_growth(f, app::stable_line_packet(1.0 / 16), ts, N, dt, 5e-3);
  o.check(fine.max_gap <= 0.15, "delta=1/64 gap " + num(fine.max_gap, 4));
  o.check(fine.max_gap < coarse.max_gap, "delta=1/16 gap " + num(coarse.max_gap, 4));
  o.check(fine.oracle_norm.back() > 2.0 * fine.oracle_norm.front(),
          "growth x" + num(fine.oracle_norm.back() / fine.oracle_norm.front(), 4));
  const double sec = seconds_since(t0);
  o.check(sec < 600.0, "runtime " + num(sec, 4) + " s");
}

void ac9(Outcome& o) {
  auto f = make_flow("cellular");
  const int N = 128;
  FourierField v = app::random_smooth_field(2, N, 6, 3, true);
  FourierField w0 = apply_B(f, v);
  OperatorMatrix op = build_B_matrix(f, 16);
  const double dt = 0.4 * (kTwoPi / N) / max_speed(f, N);
  FourierField w1 = evolve_linearized(f, w0, 1.0, N, dt).velocity();
  const double r0 = factor_norm(w0, op) / w0.l2_norm();
  const double r1 = factor_norm(w1, op) / w1.l2_norm();
  o.check(r0 <= 1e-8, "t=0 ratio " + num(r0));
  o.check(r1 <= 1e-4, "t=1 ratio " + num(r1));
}

void ac10(Outcome& o) {
  ReportConfig rc;
  rc.horizons = {5, 10, 20, 30};
  rc.n = 500;
  rc.classes = {SampleClass::Full, SampleClass::Star2, SampleClass::F2};
  auto c = composite_report(make_flow("cellular"), rc);
  o.check(c.relation.available && c.relation.gap <= 0.1,
          "cellular |mu_full - max parts| = " + num(c.relation.gap));
  rc.classes = {SampleClass::Full, SampleClass::Star3, SampleClass::F3};
  rc.step = 5e-3;
  auto b = composite_report(make_flow("bump-shear"), rc);
  o.check(b.relation.available && b.relation.gap <= 0.1,
          "bump-shear |mu_full - max parts| = " + num(b.relation.gap));
  const auto* f3 = b.find(SampleClass::F3);
  o.check(f3 && std::abs(f3->mu_hat) <= 1e-6, "bump-shear mu_3F = " + num(f3 ? f3->mu_hat : NAN));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void ac11(Outcome& o) {
  if (g_fluidex.empty()) {
    o.check(false, "path to the fluidex binary not given");
    return;
  }
  const fs::path base = fs::temp_directory_path() / "fluidex-ac11";
  fs::remove_all(base);
  std::string reports[2], manifests[2];
  for (int r = 0; r < 2; ++r) {
    const fs::path out = base / ("run" + std::to_string(r));
    const std::string cmd = "\"" + g_fluidex +
                            "\" exponents --flow cellular --classes full,star2,f2 --horizons 5,10,20,30 "
                            "--n 500 --seed 1 --out \"" + out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    o.check(rc == 0, "run " + std::to_string(r) + " exit " + std::to_string(rc));
    reports[r] = slurp(out / "exponents.json");
    manifests[r] = slurp(out / "manifest.json");
  }
  o.check(!reports[0].empty() && reports[0] == reports[1], "exponents.json identical (" +
                                                               std::to_string(reports[0].size()) + " bytes)");
  o.check(manifests[0].size() > 0 && manifests[0].substr(manifests[0].find("\"outputs\"")) ==
                                         manifests[1].substr(manifests[1].find("\"outputs\"")),
          "manifest checksums identical");
}

const std::map<std::string, std::pair<std::string, std::function<void(Outcome&)>>> kChecks{
    {"AC1", {"stagnation-point exactness", ac1}},
    {"AC2", {"exponent reproduction", ac2}},
    {"AC3", {"trivial exponents", ac3}},
    {"AC4", {"orthogonality conservation", ac4}},
    {"AC5", {"cocycle property", ac5}},
    {"AC6", {"skew-adjointness", ac6}},
    {"AC7", {"lemma scaling suite", ac7}},
    {"AC8", {"oracle agreement", ac8}},
    {"AC9", {"image of B invariant under evolution", ac9}},
    {"AC10", {"max relation", ac10}},
    {"AC11", {"determinism", ac11}},
};

bool run_one(const std::string& id) {
  const auto& [title, fn] = kChecks.at(id);
  Outcome o;
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << ": " << o.detail.str() << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <AC1..AC11|all> [path-to-fluidex]\n";
    return 2;
  }
  const std::string which = argv[1];
  if (argc >= 3) g_fluidex = argv[2];
  if (which == "all") {
    bool ok = true;
    for (int i = 1; i <= 11; ++i) ok = run_one("AC" + std::to_string(i)) && ok;
    return ok ? 0 : 1;
  }
  if (!kChecks.count(which)) {
    std::cerr << "unknown criterion " << which << "\n";
    return 2;
  }
  return run_one(which) ? 0 : 1;
}
