#pragma once

#include <vector>

#include "fluidex/bas_dynamics.hpp"
#include "fluidex/spectral_toolbox.hpp"

namespace fluidex {

// Scalar perturbation vorticity q = curl w; w is recovered per mode by
// w_hat = i k^perp q_hat / |k|^2 plus the separately carried mean of w.
struct PerturbationState {
  FourierField q;  // 2D, one component
  cplx mean_w[2] = {0.0, 0.0};
  double t = 0.0;

  FourierField velocity() const;
};

FourierField curl2d(const FourierField& w);
FourierField biot_savart(const FourierField& q, cplx mean0 = 0.0, cplx mean1 = 0.0);

// Largest |u| over the N x N grid.
double max_speed(const SteadyFlow& flow, int N);

// RK4 on q_t = -u.grad q - w.grad omega with 2/3 dealiasing; the mean of w
// follows d/dt mean(w) = -mean(w.grad u). Requires w0 solenoidal within 1e-8
// and dt <= 0.5 (2pi/N) / max|u|.
PerturbationState evolve_linearized(const SteadyFlow& flow, const FourierField& w0, double t_final, int N,
                                    double dt);
PerturbationState continue_linearized(const SteadyFlow& flow, const PerturbationState& s, double duration,
                                      double dt);

struct PacketSpec {
  Envelope h0;
  Vec x0;
  double zeta = 1.0;
  Vec xi0;
  double delta = 1.0 / 64;
};

FourierField initial_packet(const PacketSpec& spec, int N);

// h_zeta(y) b(y, xi0, xi0^perp; t) e^{i phase(y)} with y = g^{-t} x per grid point.
FourierField predicted_wavepacket(const SteadyFlow& flow, const PacketSpec& spec, double t, int N,
                                  double step = kDefaultStep);
// Same for an increasing list of times; the backward map is applied incrementally.
std::vector<FourierField> predicted_wavepackets(const SteadyFlow& flow, const PacketSpec& spec,
                                                const std::vector<double>& t_grid, int N,
                                                double step = kDefaultStep);

struct GrowthComparison {
  std::vector<double> t;
  std::vector<double> oracle_norm;
  std::vector<double> predicted_norm;
  // |g_o - g_p| / g_p with growth factors g = norm(t) / norm(0)
  std::vector<double> relative_gap;
  double max_gap = 0.0;
  double delta = 0.0;
  int N = 0;
  double dt = 0.0;
};

GrowthComparison compare_growth(const SteadyFlow& flow, const PacketSpec& spec, const std::vector<double>& t_grid,
                                int N, double dt, double step = kDefaultStep);

}  // namespace fluidex
