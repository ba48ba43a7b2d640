#include "fluidex/bas_dynamics.hpp"

#include <cmath>

#include "fluidex/errors.hpp"

namespace fluidex {

std::string to_string(SampleClass c) {
  switch (c) {
    case SampleClass::Full:
      return "full";
    case SampleClass::Star3:
      return "star3";
    case SampleClass::F3:
      return "f3";
    case SampleClass::Star2:
      return "star2";
    case SampleClass::F2Complement:
      return "f2_complement";
    case SampleClass::F2Aligned:
      return "f2_aligned";
    case SampleClass::F2:
      return "f2";
  }
  return "?";
}

SampleClass parse_sample_class(const std::string& s) {
  for (SampleClass c : {SampleClass::Full, SampleClass::Star3, SampleClass::F3, SampleClass::Star2,
                        SampleClass::F2Complement, SampleClass::F2Aligned, SampleClass::F2})
    if (to_string(c) == s) return c;
  throw ConfigError("unknown class '" + s + "'");
}

namespace {

// Packed state [x, eta, rho, c, beta] for the RK4 stages.
using Packed = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 11, 1>;

Packed pack(const BasState& s) {
  const int d = static_cast<int>(s.x.size());
  Packed p(3 * d + 2);
  p.segment(0, d) = s.x;
  p.segment(d, d) = s.eta;
  p[2 * d] = s.rho;
  p.segment(2 * d + 1, d) = s.c;
  p[3 * d + 1] = s.beta;
  return p;
}

Packed rhs_packed(const FlowModel& m, const Packed& p, int d) {
  Vec x = p.segment(0, d);
  Vec eta = p.segment(d, d);
  Vec c = p.segment(2 * d + 1, d);
  Vec u;
  Mat J;
  m.velocity_jacobian(x, u, J);
  Vec jte = J.transpose() * eta;
  const double a = jte.dot(eta);
  Vec jc = J * c;
  const double g = jc.dot(eta);
  Vec bdot = -jc + 2.0 * g * eta;  // (d/dt b) / |b| before splitting
  const double betadot = bdot.dot(c);
  Packed r(3 * d + 2);
  r.segment(0, d) = u;
  r.segment(d, d) = -jte + a * eta;
  r[2 * d] = -a;
  r.segment(2 * d + 1, d) = bdot - betadot * c;
  r[3 * d + 1] = betadot;
  return r;
}

void check_state(const SteadyFlow& flow, const BasState& s) {
  const int d = flow.dim();
  if (s.x.size() != d || s.eta.size() != d || s.c.size() != d)
    throw ContractViolation("BAS state dimension does not match the flow");
}

}  // namespace

BasDerivative bas_rhs(const SteadyFlow& flow, const BasState& s) {
  check_state(flow, s);
  const int d = flow.dim();
  Packed r = rhs_packed(flow.model(), pack(s), d);
  BasDerivative out;
  out.x = r.segment(0, d);
  out.eta = r.segment(d, d);
  out.rho = r[2 * d];
  out.c = r.segment(2 * d + 1, d);
  out.beta = r[3 * d + 1];
  return out;
}

BasState initial_state(const AdmissibleSample& sample) {
  const double nx = sample.xi0.norm();
  const double nb = sample.b0.norm();
  if (!(nx > 0.0) || !(nb > 0.0)) throw ContractViolation("BAS initial data needs nonzero xi0 and b0");
  BasState s;
  s.x = sample.x0;
  s.eta = sample.xi0 / nx;
  s.rho = std::log(nx);
  s.c = sample.b0 / nb;
  s.beta = std::log(nb);
  s.t = 0.0;
  return s;
}

BasState advance(const SteadyFlow& flow, const BasState& s, double duration, double step) {
  check_state(flow, s);
  if (duration < 0.0) throw ContractViolation("BAS integration requires a non-negative duration");
  const long n = substeps(duration, step);
  if (n == 0) return s;
  const int d = flow.dim();
  const double h = duration / static_cast<double>(n);
  const FlowModel& m = flow.model();
  Packed y = pack(s);
  for (long i = 0; i < n; ++i) {
    Packed k1 = rhs_packed(m, y, d);
    Packed k2 = rhs_packed(m, y + 0.5 * h * k1, d);
    Packed k3 = rhs_packed(m, y + 0.5 * h * k2, d);
    Packed k4 = rhs_packed(m, y + h * k3, d);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double ne = y.segment(d, d).norm();
    const double nc = y.segment(2 * d + 1, d).norm();
    if (!y.allFinite() || !(ne > 0.0) || !(nc > 0.0) || !std::isfinite(ne) || !std::isfinite(nc))
      throw NumericalBlowup("BAS integration produced a non-finite state",
                            s.t + static_cast<double>(i + 1) * h);
    y.segment(d, d) /= ne;
    y[2 * d] += std::log(ne);
    y.segment(2 * d + 1, d) /= nc;
    y[3 * d + 1] += std::log(nc);
  }
  BasState out;
  out.x = wrap_point(y.segment(0, d));
  out.eta = y.segment(d, d);
  out.rho = y[2 * d];
  out.c = y.segment(2 * d + 1, d);
  out.beta = y[3 * d + 1];
  out.t = s.t + duration;
  return out;
}

BasState integrate_bas(const SteadyFlow& flow, const AdmissibleSample& sample, double t_final, double step) {
  if (!(t_final >= 0.0)) throw ContractViolation("integrate_bas: t_final must be >= 0");
  return advance(flow, initial_state(sample), t_final, step);
}

std::vector<BasState> integrate_bas_trajectory(const SteadyFlow& flow, const AdmissibleSample& sample,
                                               double t_final, double step, double every) {
  if (!(t_final >= 0.0)) throw ContractViolation("integrate_bas: t_final must be >= 0");
  if (!(every > 0.0)) throw ContractViolation("integrate_bas: output interval must be positive");
  std::vector<BasState> out;
  BasState s = initial_state(sample);
  out.push_back(s);
  const long m = static_cast<long>(std::floor(t_final / every + 1e-9));
  for (long j = 1; j <= m; ++j) {
    const double tj = std::min(t_final, every * static_cast<double>(j));
    s = advance(flow, s, tj - s.t, step);
    s.t = tj;
    out.push_back(s);
  }
  if (t_final - s.t > 1e-12) {
    s = advance(flow, s, t_final - s.t, step);
    s.t = t_final;
    out.push_back(s);
  }
  return out;
}

Mat orthonormal_complement(const Vec& v) {
  const int d = static_cast<int>(v.size());
  const double n = v.norm();
  if (!(n > 0.0)) throw ContractViolation("orthonormal_complement: zero vector");
  Vec e = v / n;
  if (d == 2) {
    Mat B(2, 1);
    B.col(0) = perp(e);
    return B;
  }
  // axis least aligned with e
  int ax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(e[i]) < std::abs(e[ax])) ax = i;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  a[ax] = 1.0;
  Eigen::Vector3d e3(e[0], e[1], e[2]);
  Eigen::Vector3d p1 = e3.cross(a).normalized();
  Eigen::Vector3d p2 = e3.cross(p1);
  Mat B(3, 2);
  B.col(0) = p1;
  B.col(1) = p2;
  return B;
}

TransportMatrix transport_matrix(const SteadyFlow& flow, const Vec& x0, const Vec& xi0, double t, double step) {
  if (!(t >= 0.0)) throw ContractViolation("transport_matrix: t must be >= 0");
  const int d = flow.dim();
  if (x0.size() != d || xi0.size() != d) throw ContractViolation("transport_matrix: dimension mismatch");
  Mat basis = orthonormal_complement(xi0);
  TransportMatrix T;
  T.A0 = Mat::Zero(d, d);
  T.x0 = x0;
  T.xi0 = xi0;
  T.t = t;
  // A0 = sum_j b(t; p_j) p_j^T, which annihilates xi0
  for (int j = 0; j < basis.cols(); ++j) {
    AdmissibleSample s{x0, xi0, basis.col(j), SampleClass::Full};
    BasState e = integrate_bas(flow, s, t, step);
    T.A0 += (std::exp(e.beta) * e.c) * basis.col(j).transpose();
    T.x_t = e.x;
    T.xi_t = e.eta;
  }
  return T;
}

}  // namespace fluidex
