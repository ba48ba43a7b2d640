#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluidex/le_oracle.hpp"
#include "fluidex/spectral_toolbox.hpp"

namespace fluidex::app {

// One log-log sweep of a lemma residual against zeta or delta.
struct Sweep {
  std::string kind;      // lemma kind
  std::string flow;
  std::string variable;  // "zeta" or "delta"
  std::string label;
  std::vector<double> param;
  std::vector<double> value;
  SlopeFit fit;
  std::vector<ResidualRecord> records;
};

// Three random smooth fields on each of two flows; residual against delta.
std::vector<Sweep> solproj_sweeps(std::uint64_t seed);
// ABC(1,1,1), x0 = 0, xi0 = e3, P = e1, delta = 1/128; ||r_zeta|| against zeta.
Sweep inimage3d_sweep(int quadrature = 48);
// cellular, x0 = (pi/2, 0), xi0 = e1, zeta = 1; residual against delta.
Sweep image2d_sweep(int N);
// cellular, x0 = (pi/2, pi/4), xi0 = e2: discrepancy against zeta at
// delta = 1/8 and against delta at zeta = 0.4, on a K-ball operator.
std::vector<Sweep> kernel2d_sweeps(int N, int K);

// Random real smooth vector field with modes |k| <= kmax, coefficients ~ (1 + |k|^2)^-2.
FourierField random_smooth_field(int dim, int N, int kmax, std::uint64_t seed, bool solenoidal);

// Packet on the stable line of the (0,0) cell corner used for oracle runs.
PacketSpec stable_line_packet(double delta, double x2 = 1.0, double zeta = 0.9);

}  // namespace fluidex::app
