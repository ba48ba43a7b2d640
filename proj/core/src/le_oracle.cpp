#include "fluidex/le_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluidex/errors.hpp"
#include "fluidex/parallel.hpp"

namespace fluidex {

FourierField curl2d(const FourierField& w) {
  if (w.dim != 2 || w.ncomp() != 2) throw ContractViolation("curl2d: expected a 2D vector field");
  FourierField q(2, w.N, 1);
  for (std::size_t i = 0; i < w.points(); ++i) {
    Wavevector k = w.wavevector(i);
    q.comp[0][i] = cplx(0.0, k[0]) * w.comp[1][i] - cplx(0.0, k[1]) * w.comp[0][i];
  }
  return q;
}

FourierField biot_savart(const FourierField& q, cplx mean0, cplx mean1) {
  if (q.dim != 2 || q.ncomp() != 1) throw ContractViolation("biot_savart: expected a 2D scalar field");
  FourierField w(2, q.N, 2);
  for (std::size_t i = 0; i < q.points(); ++i) {
    Wavevector k = q.wavevector(i);
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
    if (k2 == 0.0) {
      w.comp[0][i] = mean0;
      w.comp[1][i] = mean1;
      continue;
    }
    w.comp[0][i] = cplx(0.0, k[1]) * q.comp[0][i] / k2;
    w.comp[1][i] = cplx(0.0, -k[0]) * q.comp[0][i] / k2;
  }
  return w;
}

FourierField PerturbationState::velocity() const { return biot_savart(q, mean_w[0], mean_w[1]); }

double max_speed(const SteadyFlow& flow, int N) {
  double m = 0.0;
  const std::size_t n = static_cast<std::size_t>(N) * N;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, flow.model().velocity(grid_point(i, 2, N)).norm());
  return m;
}

namespace {

class VorticitySolver {
 public:
  VorticitySolver(const SteadyFlow& flow, int N) : N_(N), n_(static_cast<std::size_t>(N) * N) {
    u1_.resize(n_);
    u2_.resize(n_);
    g1_.resize(n_);
    g2_.resize(n_);
    J_.resize(n_);
    const FlowModel& m = flow.model();
    for (std::size_t i = 0; i < n_; ++i) {
      Vec x = grid_point(i, 2, N);
      Vec u;
      Mat J;
      m.velocity_jacobian(x, u, J);
      Vec g = *m.vorticity_gradient(x);
      u1_[i] = u[0];
      u2_[i] = u[1];
      g1_[i] = g[0];
      g2_[i] = g[1];
      J_[i] = Eigen::Matrix2d(J);
    }
    mask_.resize(n_);
    kx_.resize(n_);
    ky_.resize(n_);
    FourierField probe(2, N, 1);
    for (std::size_t i = 0; i < n_; ++i) {
      Wavevector k = probe.wavevector(i);
      kx_[i] = k[0];
      ky_[i] = k[1];
      mask_[i] = std::abs(k[0]) <= N / 3 && std::abs(k[1]) <= N / 3;
    }
  }

  struct Y {
    std::vector<cplx> q;
    cplx m0 = 0.0, m1 = 0.0;
  };

  Y rhs(const Y& y) const {
    std::vector<cplx> w1(n_), w2(n_), dq1(n_), dq2(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double k2 = kx_[i] * kx_[i] + ky_[i] * ky_[i];
      if (k2 == 0.0) {
        w1[i] = y.m0;
        w2[i] = y.m1;
        dq1[i] = dq2[i] = 0.0;
        continue;
      }
      w1[i] = cplx(0.0, ky_[i]) * y.q[i] / k2;
      w2[i] = cplx(0.0, -kx_[i]) * y.q[i] / k2;
      dq1[i] = cplx(0.0, kx_[i]) * y.q[i];
      dq2[i] = cplx(0.0, ky_[i]) * y.q[i];
    }
    w1 = fft_backward(w1, 2, N_);
    w2 = fft_backward(w2, 2, N_);
    dq1 = fft_backward(dq1, 2, N_);
    dq2 = fft_backward(dq2, 2, N_);
    std::vector<cplx> r(n_);
    cplx a0 = 0.0, a1 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      r[i] = -(u1_[i] * dq1[i] + u2_[i] * dq2[i]) - (w1[i] * g1_[i] + w2[i] * g2_[i]);
      a0 += J_[i](0, 0) * w1[i] + J_[i](0, 1) * w2[i];
      a1 += J_[i](1, 0) * w1[i] + J_[i](1, 1) * w2[i];
    }
    Y out;
    out.q = fft_forward(r, 2, N_);
    for (std::size_t i = 0; i < n_; ++i)
      if (!mask_[i]) out.q[i] = 0.0;
    out.m0 = -a0 / double(n_);
    out.m1 = -a1 / double(n_);
    return out;
  }

  void axpy(Y& out, const Y& y, double h, const Y& k) const {
    out.q.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) out.q[i] = y.q[i] + h * k.q[i];
    out.m0 = y.m0 + h * k.m0;
    out.m1 = y.m1 + h * k.m1;
  }

  void step(Y& y, double h) const {
    Y tmp;
    Y k1 = rhs(y);
    axpy(tmp, y, 0.5 * h, k1);
    Y k2 = rhs(tmp);
    axpy(tmp, y, 0.5 * h, k2);
    Y k3 = rhs(tmp);
    axpy(tmp, y, h, k3);
    Y k4 = rhs(tmp);
    for (std::size_t i = 0; i < n_; ++i) y.q[i] += (h / 6.0) * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
    y.m0 += (h / 6.0) * (k1.m0 + 2.0 * k2.m0 + 2.0 * k3.m0 + k4.m0);
    y.m1 += (h / 6.0) * (k1.m1 + 2.0 * k2.m1 + 2.0 * k3.m1 + k4.m1);
  }

  void apply_mask(std::vector<cplx>& q) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (!mask_[i]) q[i] = 0.0;
  }

 private:
  int N_;
  std::size_t n_;
  std::vector<double> u1_, u2_, g1_, g2_;
  std::vector<Eigen::Matrix2d> J_;
  std::vector<char> mask_;
  std::vector<double> kx_, ky_;
};

void check_dt(const SteadyFlow& flow, int N, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolve_linearized: dt must be positive");
  const double umax = max_speed(flow, N);
  const double bound = umax > 0.0 ? 0.5 * (kTwoPi / N) / umax : INFINITY;
  if (dt > bound) {
    std::ostringstream os;
    os << "evolve_linearized: dt = " << dt << " exceeds the advective bound 0.5 (2pi/N)/max|u| = " << bound;
    throw ConfigError(os.str());
  }
}

}  // namespace

PerturbationState continue_linearized(const SteadyFlow& flow, const PerturbationState& s, double duration,
                                      double dt) {
  if (flow.dim() != 2) throw UnsupportedOperation("evolve_linearized: 2D flows only");
  const int N = s.q.N;
  if (!is_power_of_two(N) || N < 8) throw ConfigError("evolve_linearized: N must be a power of two >= 8");
  if (!(duration >= 0.0)) throw ConfigError("evolve_linearized: duration must be >= 0");
  check_dt(flow, N, dt);
  PerturbationState out = s;
  const long n = duration > 0.0 ? std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9))) : 0;
  if (n == 0) return out;
  const double h = duration / static_cast<double>(n);
  VorticitySolver solver(flow, N);
  VorticitySolver::Y y;
  y.q = s.q.comp[0];
  y.m0 = s.mean_w[0];
  y.m1 = s.mean_w[1];
  solver.apply_mask(y.q);
  for (long i = 0; i < n; ++i) {
    solver.step(y, h);
    double acc = std::norm(y.m0) + std::norm(y.m1);
    for (const auto& v : y.q) acc += std::norm(v);
    if (!std::isfinite(acc))
      throw NumericalBlowup("evolve_linearized: non-finite coefficients", s.t + (i + 1) * h);
  }
  out.q.comp[0] = std::move(y.q);
  out.mean_w[0] = y.m0;
  out.mean_w[1] = y.m1;
  out.t = s.t + duration;
  return out;
}

PerturbationState evolve_linearized(const SteadyFlow& flow, const FourierField& w0, double t_final, int N,
                                    double dt) {
  if (flow.dim() != 2) throw UnsupportedOperation("evolve_linearized: 2D flows only");
  if (w0.dim != 2 || w0.ncomp() != 2) throw ContractViolation("evolve_linearized: w0 must be a 2D vector field");
  if (w0.N != N) throw ContractViolation("evolve_linearized: w0 resolution does not match N");
  const double div = divergence_ratio(w0);
  if (div > 1e-8) {
    std::ostringstream os;
    os << "evolve_linearized: w0 is not solenoidal (relative divergence " << div << ")";
    throw ContractViolation(os.str());
  }
  PerturbationState s;
  s.q = curl2d(w0);
  s.mean_w[0] = w0.comp[0][0];
  s.mean_w[1] = w0.comp[1][0];
  s.t = 0.0;
  return continue_linearized(flow, s, t_final, dt);
}

FourierField initial_packet(const PacketSpec& spec, int N) {
  WavepacketParams wp;
  wp.kind = PacketKind::Phi2d;
  wp.h0 = spec.h0;
  wp.x0 = spec.x0;
  wp.zeta = spec.zeta;
  wp.delta = spec.delta;
  wp.xi0 = spec.xi0;
  wp.N = N;
  return make_wavepacket(wp);
}

std::vector<FourierField> predicted_wavepackets(const SteadyFlow& flow, const PacketSpec& spec,
                                                const std::vector<double>& t_grid, int N, double step) {
  if (flow.dim() != 2) throw UnsupportedOperation("predicted_wavepacket: 2D flows only");
  // resolution check shared with make_wavepacket
  (void)initial_packet(spec, N);
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    if (!(t_grid[j] >= 0.0) || (j > 0 && t_grid[j] < t_grid[j - 1]))
      throw ConfigError("predicted_wavepacket: times must be non-negative and increasing");
  const std::size_t n = static_cast<std::size_t>(N) * N;
  std::vector<Vec> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = grid_point(i, 2, N);
  const Vec b0 = perp(spec.xi0);
  std::vector<FourierField> out;
  double tprev = 0.0;
  for (double t : t_grid) {
    if (t > tprev) parallel_for(n, [&](std::size_t i) { y[i] = flow_map(flow, y[i], -(t - tprev), step); });
    tprev = t;
    std::vector<std::vector<cplx>> g(2, std::vector<cplx>(n, 0.0));
    parallel_for(n, [&](std::size_t i) {
      const double h = envelope_at(spec.h0, spec.x0, spec.zeta, y[i]);
      if (h == 0.0) return;
      AdmissibleSample s{y[i], spec.xi0, b0, SampleClass::Full};
      BasState e = integrate_bas(flow, s, t, step);
      const cplx car = h * std::exp(e.beta) *
                       std::polar(1.0, spec.h0.kind == Envelope::Kind::Constant
                                           ? y[i].dot(spec.xi0) / spec.delta
                                           : carrier_phase(y[i], spec.x0, spec.xi0, spec.delta));
      g[0][i] = car * e.c[0];
      g[1][i] = car * e.c[1];
    });
    out.push_back(FourierField::from_grid(2, N, g));
  }
  return out;
}

FourierField predicted_wavepacket(const SteadyFlow& flow, const PacketSpec& spec, double t, int N, double step) {
  return predicted_wavepackets(flow, spec, {t}, N, step).front();
}

GrowthComparison compare_growth(const SteadyFlow& flow, const PacketSpec& spec, const std::vector<double>& t_grid,
                                int N, double dt, double step) {
  if (t_grid.empty()) throw ConfigError("compare_growth: empty time grid");
  FourierField w0 = initial_packet(spec, N);
  check_dt(flow, N, dt);
  // growth factors are taken relative to t = 0 on both sides
  std::vector<double> tp = t_grid;
  const bool has_zero = t_grid.front() == 0.0;
  if (!has_zero) tp.insert(tp.begin(), 0.0);
  auto pred = predicted_wavepackets(flow, spec, tp, N, step);
  const double on0 = w0.l2_norm();
  const double pn0 = pred.front().l2_norm();
  if (!has_zero) pred.erase(pred.begin());
  GrowthComparison c;
  c.delta = spec.delta;
  c.N = N;
  c.dt = dt;
  PerturbationState s = evolve_linearized(flow, w0, 0.0, N, dt);
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    s = continue_linearized(flow, s, std::max(0.0, t_grid[j] - s.t), dt);
    s.t = t_grid[j];
    const double on = s.velocity().l2_norm();
    const double pn = pred[j].l2_norm();
    c.t.push_back(t_grid[j]);
    c.oracle_norm.push_back(on);
    c.predicted_norm.push_back(pn);
    const double go = on / on0, gp = pn / pn0;
    const double gap = std::abs(go - gp) / gp;
    c.relative_gap.push_back(gap);
    c.max_gap = std::max(c.max_gap, gap);
  }
  return c;
}

}  // namespace fluidex
