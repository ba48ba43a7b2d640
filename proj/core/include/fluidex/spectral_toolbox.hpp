#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluidex/flow_catalog.hpp"
#include "fluidex/fourier_field.hpp"

namespace fluidex {

// Per-mode (I - k k^T / |k|^2); the k = 0 mode is kept.
FourierField helmholtz_project(const FourierField& v);

// ||k . v_hat|| / || |k| v_hat ||; zero for a mean-only field.
double divergence_ratio(const FourierField& v);

// P_sol(omega x v) in 3D, P_sol(omega rot90(v)) with rot90(v) = (-v2, v1)
// in 2D (the planar reduction of omega x v). Requires divergence_ratio <= 1e-8.
FourierField apply_B(const SteadyFlow& flow, const FourierField& v);

struct BasisMode {
  Wavevector k;
  Vec p;  // real unit polarization orthogonal to k
};

// Matrix of B in the orthonormal basis p exp(i k.x) / (2pi)^(d/2),
// 0 < |k|^2 <= K^2. Kernel columns are an orthonormal basis of the
// eigenspace of the Hermitian matrix i M with |lambda| <= cutoff * max|lambda|.
struct OperatorMatrix {
  int dim = 2;
  int K = 0;
  double cutoff = 1e-8;
  std::vector<BasisMode> basis;
  Eigen::MatrixXcd M;
  Eigen::VectorXd eigenvalues;  // of i M, ascending
  Eigen::MatrixXcd kernel;      // n x r
  double sigma_max = 0.0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(basis.size()); }
  Eigen::Index kernel_rank() const { return kernel.cols(); }
  Eigen::MatrixXcd kernel_projector() const { return kernel * kernel.adjoint(); }

  // Basis coordinates of v; energy of v outside the basis span goes to *discarded_sq.
  Eigen::VectorXcd coefficients(const FourierField& v, double* discarded_sq = nullptr) const;
  FourierField field(const Eigen::VectorXcd& c, int N) const;
};

OperatorMatrix build_B_matrix(const SteadyFlow& flow, int K, double cutoff = 1e-8);

struct FactorNorm {
  double value = 0.0;            // || P_Ker v ||
  double field_norm = 0.0;       // || v ||
  double out_of_band_fraction = 0.0;
  std::optional<std::string> warning;
};

FactorNorm factor_norm_report(const FourierField& v, const OperatorMatrix& op);
double factor_norm(const FourierField& v, const OperatorMatrix& op);

enum class PacketKind { Psi3d, Phi2d };

struct Envelope {
  enum class Kind { Bump, Constant };
  Kind kind = Kind::Bump;

  // h0(y): exp(1 - 1/(1 - |y|^2)) on |y| < 1, or 1.
  double operator()(const Vec& y) const;
};

struct WavepacketParams {
  PacketKind kind = PacketKind::Phi2d;
  Envelope h0;
  Vec x0;
  double zeta = 1.0;
  double delta = 0.25;
  Vec xi0;
  Vec P;  // psi3d only
  int N = 64;
};

// Displacement x - x0 wrapped to [-pi, pi)^d.
Vec wrapped_displacement(const Vec& x, const Vec& x0);
// h_zeta(x) = h0((x - x0)/zeta)
double envelope_at(const Envelope& h0, const Vec& x0, double zeta, const Vec& x);
// carrier phase (x0 + d) . xi0 / delta, continuous on the ball around x0
double carrier_phase(const Vec& x, const Vec& x0, const Vec& xi0, double delta);

// phi2d: -i delta perp-grad(h_zeta e^{i x.xi0/delta});
// psi3d: delta curl(i xi0 x P / |xi0|^2 h_zeta e^{i x.xi0/delta}).
// Raises ResolutionError when |xi0|/delta >= N/3.
FourierField make_wavepacket(const WavepacketParams& p);

enum class LemmaKind { SolProj, InImage3d, Image2d, Kernel2d };

std::string to_string(LemmaKind k);
LemmaKind parse_lemma_kind(const std::string& s);

struct LemmaParams {
  // solproj
  std::optional<FourierField> v;
  // packets
  Envelope h0;
  Vec x0;
  Vec xi0;
  Vec P;
  double zeta = 1.0;
  double delta = 0.125;
  int N = 256;
  // inimage3d: midpoint points per axis for the local r_zeta quadrature
  int quadrature = 48;
  // kernel2d: prebuilt operator, or truncation for building one
  const OperatorMatrix* op = nullptr;
  int K = 24;
};

struct ResidualRecord {
  LemmaKind kind = LemmaKind::SolProj;
  std::map<std::string, double> params;
  std::map<std::string, double> norms;
  std::vector<std::string> warnings;
};

ResidualRecord lemma_residual(LemmaKind kind, const SteadyFlow& flow, const LemmaParams& params);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_rel_dev = 0.0;
};

// Least squares in log-log coordinates; needs >= 3 points with positive values.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace fluidex
