#include "fluidex/spectral_toolbox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "fluidex/bas_dynamics.hpp"
#include "fluidex/errors.hpp"
#include "fluidex/parallel.hpp"

namespace fluidex {

namespace {

double k2_of(const Wavevector& k, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += double(k[a]) * k[a];
  return s;
}

void check_vector_field(const FourierField& v, int d, const char* who) {
  if (v.dim != d || v.ncomp() != d)
    throw ContractViolation(std::string(who) + ": expected a " + std::to_string(d) + "D vector field");
}

}  // namespace

FourierField helmholtz_project(const FourierField& v) {
  check_vector_field(v, v.dim, "helmholtz_project");
  FourierField out = v;
  const int d = v.dim;
  for (std::size_t i = 0; i < v.points(); ++i) {
    Wavevector k = v.wavevector(i);
    const double k2 = k2_of(k, d);
    if (k2 == 0.0) continue;
    cplx kv = 0.0;
    for (int a = 0; a < d; ++a) kv += double(k[a]) * v.comp[a][i];
    for (int a = 0; a < d; ++a) out.comp[a][i] -= double(k[a]) * kv / k2;
  }
  return out;
}

double divergence_ratio(const FourierField& v) {
  check_vector_field(v, v.dim, "divergence_ratio");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.points(); ++i) {
    Wavevector k = v.wavevector(i);
    cplx kv = 0.0;
    double mag = 0.0;
    for (int a = 0; a < v.dim; ++a) {
      kv += double(k[a]) * v.comp[a][i];
      mag += std::norm(v.comp[a][i]);
    }
    num += std::norm(kv);
    den += k2_of(k, v.dim) * mag;
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

FourierField apply_B(const SteadyFlow& flow, const FourierField& v) {
  const int d = flow.dim();
  check_vector_field(v, d, "apply_B");
  const double div = divergence_ratio(v);
  if (div > 1e-8) {
    std::ostringstream os;
    os << "apply_B: input is not solenoidal (relative divergence " << div << " > 1e-8)";
    throw ContractViolation(os.str());
  }
  FourierField vt = v;
  dealias_two_thirds(vt);
  auto vg = vt.to_grid();
  const FlowModel& m = flow.model();
  const int N = v.N;
  std::vector<std::vector<cplx>> prod(d, std::vector<cplx>(v.points()));
  for (std::size_t i = 0; i < v.points(); ++i) {
    Vec x = grid_point(i, d, N);
    Vec w = m.vorticity(x);
    if (d == 2) {
      prod[0][i] = -w[0] * vg[1][i];
      prod[1][i] = w[0] * vg[0][i];
    } else {
      prod[0][i] = w[1] * vg[2][i] - w[2] * vg[1][i];
      prod[1][i] = w[2] * vg[0][i] - w[0] * vg[2][i];
      prod[2][i] = w[0] * vg[1][i] - w[1] * vg[0][i];
    }
  }
  FourierField out = FourierField::from_grid(d, N, prod);
  dealias_two_thirds(out);
  return helmholtz_project(out);
}

Eigen::VectorXcd OperatorMatrix::coefficients(const FourierField& v, double* discarded_sq) const {
  check_vector_field(v, dim, "OperatorMatrix::coefficients");
  const double scale = std::pow(kTwoPi, 0.5 * dim);
  Eigen::VectorXcd c(size());
  double kept = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) {
    auto idx = v.index_of(basis[i].k);
    cplx s = 0.0;
    if (idx)
      for (int a = 0; a < dim; ++a) s += basis[i].p[a] * v.comp[a][*idx];
    c[i] = scale * s;
    kept += std::norm(c[i]);
  }
  if (discarded_sq) {
    const double total = v.l2_norm();
    *discarded_sq = std::max(0.0, total * total - kept);
  }
  return c;
}

FourierField OperatorMatrix::field(const Eigen::VectorXcd& c, int N) const {
  if (c.size() != size()) throw ContractViolation("OperatorMatrix::field: coefficient size mismatch");
  FourierField f(dim, N, dim);
  const double scale = std::pow(kTwoPi, -0.5 * dim);
  for (Eigen::Index i = 0; i < size(); ++i) {
    auto idx = f.index_of(basis[i].k);
    if (!idx) throw ResolutionError("OperatorMatrix::field: N too small for the truncation");
    for (int a = 0; a < dim; ++a) f.comp[a][*idx] += scale * basis[i].p[a] * c[i];
  }
  return f;
}

OperatorMatrix build_B_matrix(const SteadyFlow& flow, int K, double cutoff) {
  if (K < 1) throw ConfigError("build_B_matrix: truncation K must be >= 1");
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw ConfigError("build_B_matrix: cutoff must lie in [0, 1)");
  const int d = flow.dim();
  OperatorMatrix op;
  op.dim = d;
  op.K = K;
  op.cutoff = cutoff;

  const int lo3 = d == 3 ? -K : 0, hi3 = d == 3 ? K : 0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b)
      for (int c = lo3; c <= hi3; ++c) {
        Wavevector k{a, b, c};
        const double k2 = k2_of(k, d);
        if (k2 == 0.0 || k2 > double(K) * K) continue;
        Vec kv(d);
        for (int e = 0; e < d; ++e) kv[e] = k[e];
        if (d == 2) {
          op.basis.push_back({k, perp(kv) / kv.norm()});
        } else {
          Mat B = orthonormal_complement(kv);
          op.basis.push_back({k, B.col(0)});
          op.basis.push_back({k, B.col(1)});
        }
      }

  // vorticity coefficients on a grid wide enough for all differences k_i - k_j
  int Nw = 16;
  while (Nw < 4 * K + 4) Nw *= 2;
  const FlowModel& m = flow.model();
  const int nw = d == 2 ? 1 : 3;
  auto wg = sample_grid(d, Nw, nw, [&](const Vec& x, cplx* out) {
    Vec w = m.vorticity(x);
    for (int a = 0; a < nw; ++a) out[a] = w[a];
  });
  FourierField what = FourierField::from_grid(d, Nw, wg);

  const Eigen::Index n = op.size();
  op.M.resize(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    const BasisMode& bj = op.basis[j];
    Vec rp(d);  // rot90(p_j) in 2D; unused in 3D
    if (d == 2) rp << -bj.p[1], bj.p[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      const BasisMode& bi = op.basis[i];
      Wavevector dk{bi.k[0] - bj.k[0], bi.k[1] - bj.k[1], bi.k[2] - bj.k[2]};
      const std::size_t idx = *what.index_of(dk);
      if (d == 2) {
        op.M(i, j) = what.comp[0][idx] * bi.p.dot(rp);
      } else {
        const cplx w0 = what.comp[0][idx], w1 = what.comp[1][idx], w2 = what.comp[2][idx];
        const Vec& p = bj.p;
        const cplx c0 = w1 * p[2] - w2 * p[1];
        const cplx c1 = w2 * p[0] - w0 * p[2];
        const cplx c2 = w0 * p[1] - w1 * p[0];
        op.M(i, j) = bi.p[0] * c0 + bi.p[1] * c1 + bi.p[2] * c2;
      }
    }
  });

  // i (M - M^H)/2 is Hermitian; for skew-Hermitian M its eigenvectors are
  // the singular vectors of M and |eigenvalues| its singular values.
  // zheevr rather than zheevd: the OpenBLAS zheevd loses orthogonality on the
  // large degenerate null cluster here.
  Eigen::MatrixXcd H = cplx(0.0, 0.5) * (op.M - op.M.adjoint());
  Eigen::MatrixXcd V(n, n);
  op.eigenvalues.resize(n);
  if (n > 0) {
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * n));
    lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', static_cast<lapack_int>(n), H.data(),
                                     static_cast<lapack_int>(n), 0.0, 0.0, 0, 0, 0.0, &found,
                                     op.eigenvalues.data(), V.data(), static_cast<lapack_int>(n), isuppz.data());
    if (info != 0 || found != n)
      throw NumericalBlowup("build_B_matrix: eigendecomposition failed (info " + std::to_string(info) + ")", 0.0);
  }
  op.sigma_max = n > 0 ? op.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(op.eigenvalues[i]) <= cutoff * op.sigma_max) keep.push_back(i);
  op.kernel.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) op.kernel.col(static_cast<Eigen::Index>(c)) = V.col(keep[c]);
  return op;
}

FactorNorm factor_norm_report(const FourierField& v, const OperatorMatrix& op) {
  FactorNorm r;
  double discarded = 0.0;
  Eigen::VectorXcd c = op.coefficients(v, &discarded);
  r.value = (op.kernel.adjoint() * c).norm();
  r.field_norm = v.l2_norm();
  r.out_of_band_fraction = r.field_norm > 0.0 ? discarded / (r.field_norm * r.field_norm) : 0.0;
  if (r.out_of_band_fraction > 1e-6) {
    std::ostringstream os;
    os << "truncation: fraction " << r.out_of_band_fraction << " of the energy lies outside the K = " << op.K
       << " basis";
    r.warning = os.str();
  }
  return r;
}

double factor_norm(const FourierField& v, const OperatorMatrix& op) { return factor_norm_report(v, op).value; }

double Envelope::operator()(const Vec& y) const {
  if (kind == Kind::Constant) return 1.0;
  const double r2 = y.squaredNorm();
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

Vec wrapped_displacement(const Vec& x, const Vec& x0) {
  Vec d(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) d[a] = wrap_signed(x[a] - x0[a]);
  return d;
}

double envelope_at(const Envelope& h0, const Vec& x0, double zeta, const Vec& x) {
  if (h0.kind == Envelope::Kind::Constant) return 1.0;
  return h0(wrapped_displacement(x, x0) / zeta);
}

double carrier_phase(const Vec& x, const Vec& x0, const Vec& xi0, double delta) {
  return (x0 + wrapped_displacement(x, x0)).dot(xi0) / delta;
}

namespace {

void check_packet(const WavepacketParams& p) {
  const int d = p.kind == PacketKind::Phi2d ? 2 : 3;
  if (p.x0.size() != d || p.xi0.size() != d)
    throw ContractViolation("make_wavepacket: x0 / xi0 dimension does not match the packet kind");
  if (!is_power_of_two(p.N) || p.N < 8) throw ConfigError("make_wavepacket: N must be a power of two >= 8");
  if (!(p.delta > 0.0)) throw ConfigError("make_wavepacket: delta must be positive");
  if (p.h0.kind == Envelope::Kind::Bump && !(p.zeta > 0.0 && p.zeta <= 1.0))
    throw ConfigError("make_wavepacket: zeta must lie in (0, 1]");
  if (!(p.xi0.norm() > 0.0)) throw ConfigError("make_wavepacket: xi0 must be nonzero");
  if (p.xi0.norm() / p.delta >= p.N / 3.0) {
    std::ostringstream os;
    os << "make_wavepacket: carrier frequency |xi0|/delta = " << p.xi0.norm() / p.delta
       << " is not below N/3 = " << p.N / 3.0;
    throw ResolutionError(os.str());
  }
  if (p.kind == PacketKind::Psi3d) {
    if (p.P.size() != 3) throw ContractViolation("make_wavepacket: psi3d needs a 3-vector P");
    if (std::abs(p.P.dot(p.xi0)) > 1e-12 * std::max(1.0, p.P.norm() * p.xi0.norm()))
      throw ContractViolation("make_wavepacket: P must be orthogonal to xi0");
  }
}

// h_zeta e^{i phase} on the grid, transformed
std::vector<cplx> scalar_packet(const Envelope& h0, const Vec& x0, double zeta, const Vec& xi0, double delta,
                                int d, int N) {
  auto g = sample_grid(d, N, 1, [&](const Vec& x, cplx* out) {
    const double h = envelope_at(h0, x0, zeta, x);
    if (h == 0.0) {
      out[0] = 0.0;
      return;
    }
    const double ph = h0.kind == Envelope::Kind::Constant ? x.dot(xi0) / delta : carrier_phase(x, x0, xi0, delta);
    out[0] = h * std::polar(1.0, ph);
  });
  return fft_forward(g[0], d, N);
}

}  // namespace

FourierField make_wavepacket(const WavepacketParams& p) {
  check_packet(p);
  const int d = p.kind == PacketKind::Phi2d ? 2 : 3;
  std::vector<cplx> s = scalar_packet(p.h0, p.x0, p.zeta, p.xi0, p.delta, d, p.N);
  FourierField f(d, p.N, d);
  if (d == 2) {
    for (std::size_t i = 0; i < f.points(); ++i) {
      Wavevector k = f.wavevector(i);
      f.comp[0][i] = p.delta * double(k[1]) * s[i];
      f.comp[1][i] = -p.delta * double(k[0]) * s[i];
    }
    return f;
  }
  // delta (ik) x (i r s) = -delta (k x r) s with r = xi0 x P / |xi0|^2
  Eigen::Vector3d xi(p.xi0[0], p.xi0[1], p.xi0[2]);
  Eigen::Vector3d P(p.P[0], p.P[1], p.P[2]);
  Eigen::Vector3d r = xi.cross(P) / xi.squaredNorm();
  for (std::size_t i = 0; i < f.points(); ++i) {
    Wavevector k = f.wavevector(i);
    Eigen::Vector3d kv(k[0], k[1], k[2]);
    Eigen::Vector3d kr = kv.cross(r);
    for (int a = 0; a < 3; ++a) f.comp[a][i] = -p.delta * kr[a] * s[i];
  }
  return f;
}

std::string to_string(LemmaKind k) {
  switch (k) {
    case LemmaKind::SolProj:
      return "solproj";
    case LemmaKind::InImage3d:
      return "inimage3d";
    case LemmaKind::Image2d:
      return "image2d";
    case LemmaKind::Kernel2d:
      return "kernel2d";
  }
  return "?";
}

LemmaKind parse_lemma_kind(const std::string& s) {
  for (LemmaKind k : {LemmaKind::SolProj, LemmaKind::InImage3d, LemmaKind::Image2d, LemmaKind::Kernel2d})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown lemma kind '" + s + "'");
}

namespace {

ResidualRecord solproj_residual(const LemmaParams& p) {
  if (!p.v) throw ConfigError("solproj: a field v is required");
  const FourierField& v = *p.v;
  const int d = v.dim;
  check_vector_field(v, d, "solproj");
  if (p.xi0.size() != d) throw ConfigError("solproj: xi0 dimension does not match v");
  if (!(p.delta > 0.0)) throw ConfigError("solproj: delta must be positive");
  Wavevector m{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double ma = p.xi0[a] / p.delta;
    if (std::abs(ma - std::round(ma)) > 1e-9)
      throw ConfigError("solproj: xi0/delta must be an integer vector");
    m[a] = static_cast<int>(std::lround(ma));
  }
  const Vec xh = p.xi0 / p.xi0.norm();
  // shifting by m maps distinct modes to distinct modes, so the residual
  // is a mode-by-mode sum with no grid involved
  double res = 0.0, h1 = 0.0;
  for (std::size_t i = 0; i < v.points(); ++i) {
    Wavevector k = v.wavevector(i);
    Eigen::VectorXcd vk(d);
    for (int a = 0; a < d; ++a) vk[a] = v.comp[a][i];
    const double vn = vk.squaredNorm();
    if (vn == 0.0) continue;
    h1 += (1.0 + k2_of(k, d)) * vn;
    Eigen::VectorXd q(d);
    for (int a = 0; a < d; ++a) q[a] = k[a] + m[a];
    Eigen::VectorXcd a1 = vk;
    const double q2 = q.squaredNorm();
    if (q2 > 0.0) a1 -= q * (q.cast<cplx>().dot(vk)) / q2;
    Eigen::VectorXcd a2 = vk - xh * (xh.cast<cplx>().dot(vk));
    res += (a1 - a2).squaredNorm();
  }
  const double vol = std::pow(kTwoPi, d);
  ResidualRecord r;
  r.kind = LemmaKind::SolProj;
  r.params["delta"] = p.delta;
  r.params["xi0_norm"] = p.xi0.norm();
  r.norms["residual"] = std::sqrt(vol * res);
  r.norms["v_h1"] = std::sqrt(vol * h1);
  return r;
}

ResidualRecord inimage3d_residual(const SteadyFlow& flow, const LemmaParams& p) {
  if (flow.dim() != 3) throw ConfigError("inimage3d: requires a 3D flow");
  if (p.x0.size() != 3 || p.xi0.size() != 3 || p.P.size() != 3)
    throw ConfigError("inimage3d: x0, xi0, P must be 3-vectors");
  if (!(p.zeta > 0.0 && p.zeta <= 1.0)) throw ConfigError("inimage3d: zeta must lie in (0, 1]");
  if (p.quadrature < 4) throw ConfigError("inimage3d: quadrature must be >= 4");
  const Vec w0 = vorticity(flow, p.x0);
  const double xn = p.xi0.norm();
  if (!(xn > 0.0)) throw ConfigError("inimage3d: xi0 must be nonzero");
  if (std::abs(w0.dot(p.xi0)) <= 1e-12 * std::max(1.0, w0.norm() * xn))
    throw HypothesisError("inimage3d: <omega(x0), xi0> = 0");
  if (std::abs(p.P.dot(p.xi0)) > 1e-12 * std::max(1.0, p.P.norm() * xn))
    throw ContractViolation("inimage3d: P must be orthogonal to xi0");

  // T v = Pi(omega(x0) x v) on xi0^perp in the basis E
  Mat E = orthonormal_complement(p.xi0);
  const Eigen::Vector3d w(w0[0], w0[1], w0[2]);
  Eigen::Matrix2d T;
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector3d ej(E(0, j), E(1, j), E(2, j));
    Eigen::Vector3d c = w.cross(ej);
    for (int i = 0; i < 2; ++i) T(i, j) = E.col(i).dot(Vec(c));
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(T);
  const double smin = svd.singularValues()[1];
  const double cond = smin > 0.0 ? svd.singularValues()[0] / smin : INFINITY;
  if (!(cond <= 1e8)) {
    std::ostringstream os;
    os << "inimage3d: the map Q -> Pi(omega(x0) x Q) is singular (condition number " << cond << " > 1e8)";
    throw HypothesisError(os.str());
  }
  Eigen::Vector2d rhs(E.col(0).dot(p.P), E.col(1).dot(p.P));
  Eigen::Vector2d q = T.partialPivLu().solve(rhs);
  Vec Q = E.col(0) * q[0] + E.col(1) * q[1];

  const Vec xh = p.xi0 / xn;
  auto defect = [&](const Vec& x) {
    Vec wx = vorticity(flow, x);
    Eigen::Vector3d c = Eigen::Vector3d(wx[0], wx[1], wx[2]).cross(Eigen::Vector3d(Q[0], Q[1], Q[2]));
    Vec cv = c;
    Vec pc = cv - xh * xh.dot(cv);
    return Vec(p.P - pc);
  };

  // r_zeta = h_zeta (P - Pi(omega x Q)) e^{i...}; |e^{i...}| = 1, local cube quadrature
  const int M = p.quadrature;
  const double hq = 2.0 * p.zeta / M;
  double acc = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int c = 0; c < M; ++c) {
        Vec y = make_vec({-p.zeta + (a + 0.5) * hq, -p.zeta + (b + 0.5) * hq, -p.zeta + (c + 0.5) * hq});
        const double h = p.h0(y / p.zeta);
        if (h == 0.0) continue;
        acc += h * h * defect(p.x0 + y).squaredNorm();
      }
  ResidualRecord r;
  r.kind = LemmaKind::InImage3d;
  r.params["zeta"] = p.zeta;
  r.params["delta"] = p.delta;
  r.params["N"] = p.N;
  r.norms["r_zeta"] = std::sqrt(acc * hq * hq * hq);
  r.norms["Q_norm"] = Q.norm();
  r.norms["cond"] = cond;

  if (xn / p.delta >= p.N / 3.0) {
    std::ostringstream os;
    os << "inimage3d: r_delta not computed, carrier |xi0|/delta = " << xn / p.delta << " is unresolved at N = "
       << p.N;
    r.warnings.push_back(os.str());
    return r;
  }
  if (p.N > 128) throw ConfigError("inimage3d: 3D grids above N = 128 are not supported");
  WavepacketParams wp;
  wp.kind = PacketKind::Psi3d;
  wp.h0 = p.h0;
  wp.x0 = p.x0;
  wp.zeta = p.zeta;
  wp.delta = p.delta;
  wp.xi0 = p.xi0;
  wp.N = p.N;
  wp.P = p.P;
  FourierField psiP = make_wavepacket(wp);
  wp.P = Q;
  FourierField psiQ = make_wavepacket(wp);
  FourierField rest = psiP - apply_B(flow, psiQ);
  auto rz = sample_grid(3, p.N, 3, [&](const Vec& x, cplx* out) {
    const double h = envelope_at(p.h0, p.x0, p.zeta, x);
    if (h == 0.0) {
      out[0] = out[1] = out[2] = 0.0;
      return;
    }
    const cplx e = h * std::polar(1.0, carrier_phase(x, p.x0, p.xi0, p.delta));
    Vec dv = defect(x);
    for (int a = 0; a < 3; ++a) out[a] = dv[a] * e;
  });
  rest -= FourierField::from_grid(3, p.N, rz);
  r.norms["r_delta"] = rest.l2_norm();
  r.norms["psi_norm"] = psiP.l2_norm();
  return r;
}

ResidualRecord image2d_residual(const SteadyFlow& flow, const LemmaParams& p) {
  if (flow.dim() != 2) throw ConfigError("image2d: requires a 2D flow");
  if (p.x0.size() != 2 || p.xi0.size() != 2) throw ConfigError("image2d: x0 and xi0 must be 2-vectors");
  WavepacketParams wp;
  wp.kind = PacketKind::Phi2d;
  wp.h0 = p.h0;
  wp.x0 = p.x0;
  wp.zeta = p.zeta;
  wp.delta = p.delta;
  wp.xi0 = p.xi0;
  wp.N = p.N;
  FourierField phi = make_wavepacket(wp);

  const Vec xp = perp(p.xi0);
  const double x2 = p.xi0.squaredNorm();
  double cmin = INFINITY;
  // g0 = -|xi0|^2 h / <xi0^perp, grad omega>; the sign matches B's rot90 orientation
  auto g = sample_grid(2, p.N, 1, [&](const Vec& x, cplx* out) {
    const double h = envelope_at(p.h0, p.x0, p.zeta, x);
    if (h == 0.0) {
      out[0] = 0.0;
      return;
    }
    const double den = xp.dot(vorticity_gradient(flow, x));
    cmin = std::min(cmin, std::abs(den));
    if (den == 0.0) {
      out[0] = 0.0;
      return;
    }
    const double ph = p.h0.kind == Envelope::Kind::Constant ? x.dot(p.xi0) / p.delta
                                                             : carrier_phase(x, p.x0, p.xi0, p.delta);
    out[0] = (-x2 * h / den) * std::polar(1.0, ph);
  });
  if (!(cmin > 1e-8)) {
    std::ostringstream os;
    os << "image2d: |<xi0^perp, grad omega>| on supp h is not bounded away from 0 (min " << cmin << ")";
    throw HypothesisError(os.str());
  }
  std::vector<cplx> G = fft_forward(g[0], 2, p.N);
  FourierField v(2, p.N, 2);
  for (std::size_t i = 0; i < v.points(); ++i) {
    Wavevector k = v.wavevector(i);
    v.comp[0][i] = cplx(0.0, k[1]) * G[i];
    v.comp[1][i] = cplx(0.0, -k[0]) * G[i];
  }
  FourierField res = phi - apply_B(flow, v);
  ResidualRecord r;
  r.kind = LemmaKind::Image2d;
  r.params["zeta"] = p.zeta;
  r.params["delta"] = p.delta;
  r.params["N"] = p.N;
  r.norms["residual"] = res.l2_norm();
  r.norms["phi_norm"] = phi.l2_norm();
  r.norms["min_abs_xiperp_grad_omega"] = cmin;
  return r;
}

ResidualRecord kernel2d_residual(const SteadyFlow& flow, const LemmaParams& p) {
  if (flow.dim() != 2) throw ConfigError("kernel2d: requires a 2D flow");
  if (p.x0.size() != 2 || p.xi0.size() != 2) throw ConfigError("kernel2d: x0 and xi0 must be 2-vectors");
  const Vec gw = vorticity_gradient(flow, p.x0);
  if (!(gw.norm() > kSupportTol)) throw HypothesisError("kernel2d: grad omega(x0) = 0");
  if (std::abs(perp(p.xi0).dot(gw)) > 1e-10 * p.xi0.norm() * gw.norm())
    throw HypothesisError("kernel2d: <xi0^perp, grad omega(x0)> != 0");
  OperatorMatrix built;
  const OperatorMatrix* op = p.op;
  if (!op) {
    built = build_B_matrix(flow, p.K);
    op = &built;
  }
  if (op->dim != 2) throw ContractViolation("kernel2d: operator matrix is not 2D");
  WavepacketParams wp;
  wp.kind = PacketKind::Phi2d;
  wp.h0 = p.h0;
  wp.x0 = p.x0;
  wp.zeta = p.zeta;
  wp.delta = p.delta;
  wp.xi0 = p.xi0;
  wp.N = p.N;
  FourierField phi = make_wavepacket(wp);
  FactorNorm fn = factor_norm_report(phi, *op);
  ResidualRecord r;
  r.kind = LemmaKind::Kernel2d;
  r.params["zeta"] = p.zeta;
  r.params["delta"] = p.delta;
  r.params["N"] = p.N;
  r.params["K"] = op->K;
  r.norms["factor_norm"] = fn.value;
  r.norms["l2_norm"] = fn.field_norm;
  r.norms["discrepancy"] = std::abs(fn.value - fn.field_norm);
  r.norms["out_of_band_fraction"] = fn.out_of_band_fraction;
  if (fn.warning) r.warnings.push_back(*fn.warning);
  return r;
}

}  // namespace

ResidualRecord lemma_residual(LemmaKind kind, const SteadyFlow& flow, const LemmaParams& params) {
  switch (kind) {
    case LemmaKind::SolProj:
      return solproj_residual(params);
    case LemmaKind::InImage3d:
      return inimage3d_residual(flow, params);
    case LemmaKind::Image2d:
      return image2d_residual(flow, params);
    case LemmaKind::Kernel2d:
      return kernel2d_residual(flow, params);
  }
  throw ConfigError("lemma_residual: unknown kind");
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("slope_fit: need at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("slope_fit: parameters and values must be positive and finite");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const std::size_t m = lx.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("slope_fit: parameters are all equal");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = std::exp(f.intercept + f.slope * lx[i]);
    f.max_rel_dev = std::max(f.max_rel_dev, std::abs(points[i].second / pred - 1.0));
  }
  return f;
}

}  // namespace fluidex
