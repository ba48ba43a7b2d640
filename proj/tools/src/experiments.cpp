#include "experiments.hpp"

#include <cmath>
#include <random>

namespace fluidex::app {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Sweep finish_sweep(Sweep s) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < s.param.size(); ++i) pts.emplace_back(s.param[i], s.value[i]);
  s.fit = slope_fit(pts);
  s.label = s.kind + " " + s.flow + " " + s.label;
  return s;
}

}  // namespace

FourierField random_smooth_field(int dim, int N, int kmax, std::uint64_t seed, bool solenoidal) {
  std::mt19937_64 rng(seed);
  FourierField f(dim, N, dim);
  // fill one half-space and mirror so the field is real-valued
  for (std::size_t i = 0; i < f.points(); ++i) {
    Wavevector k = f.wavevector(i);
    double k2 = 0.0;
    bool in = true;
    for (int a = 0; a < dim; ++a) {
      k2 += double(k[a]) * k[a];
      if (std::abs(k[a]) > kmax) in = false;
    }
    if (!in || k2 > double(kmax) * kmax) continue;
    Wavevector neg{-k[0], -k[1], -k[2]};
    auto j = *f.index_of(neg);
    if (j < i) continue;
    const double amp = 1.0 / ((1.0 + k2) * (1.0 + k2));
    for (int a = 0; a < dim; ++a) {
      cplx c(amp * (2.0 * unit(rng) - 1.0), amp * (2.0 * unit(rng) - 1.0));
      if (j == i) c = c.real();
      f.comp[a][i] = c;
      f.comp[a][j] = std::conj(c);
    }
  }
  return solenoidal ? helmholtz_project(f) : f;
}

std::vector<Sweep> solproj_sweeps(std::uint64_t seed) {
  std::vector<Sweep> out;
  const std::vector<std::pair<std::string, Vec>> setups = {{"cellular", make_vec({1.0, 0.0})},
                                                          {"shear", make_vec({1.0, 1.0})}};
  for (const auto& [flow_name, xi0] : setups) {
    SteadyFlow flow = make_flow(flow_name);
    for (int f = 0; f < 3; ++f) {
      Sweep s;
      s.kind = "solproj";
      s.flow = flow_name;
      s.variable = "delta";
      s.label = "field " + std::to_string(f);
      LemmaParams p;
      p.v = random_smooth_field(2, 32, 6, seed + 7919 * f + (flow_name == "shear" ? 104729 : 0), false);
      p.xi0 = xi0;
      for (int inv : {8, 16, 32, 64, 128}) {
        p.delta = 1.0 / inv;
        ResidualRecord r = lemma_residual(LemmaKind::SolProj, flow, p);
        s.param.push_back(p.delta);
        s.value.push_back(r.norms.at("residual"));
        s.records.push_back(r);
      }
      out.push_back(finish_sweep(std::move(s)));
    }
  }
  return out;
}

Sweep inimage3d_sweep(int quadrature) {
  SteadyFlow flow = make_flow("abc");
  Sweep s;
  s.kind = "inimage3d";
  s.flow = "abc";
  s.variable = "zeta";
  s.label = "r_zeta at delta = 1/128";
  LemmaParams p;
  p.x0 = make_vec({0.0, 0.0, 0.0});
  p.xi0 = make_vec({0.0, 0.0, 1.0});
  p.P = make_vec({1.0, 0.0, 0.0});
  p.delta = 1.0 / 128;
  p.N = 64;
  p.quadrature = quadrature;
  for (double z : {0.4, 0.2, 0.1, 0.05}) {
    p.zeta = z;
    ResidualRecord r = lemma_residual(LemmaKind::InImage3d, flow, p);
    s.param.push_back(z);
    s.value.push_back(r.norms.at("r_zeta"));
    s.records.push_back(r);
  }
  return finish_sweep(std::move(s));
}

Sweep image2d_sweep(int N) {
  SteadyFlow flow = make_flow("cellular");
  Sweep s;
  s.kind = "image2d";
  s.flow = "cellular";
  s.variable = "delta";
  s.label = "zeta = 1";
  LemmaParams p;
  p.x0 = make_vec({kPi / 2, 0.0});
  p.xi0 = make_vec({1.0, 0.0});
  p.zeta = 1.0;
  p.N = N;
  for (int inv : {4, 8, 16, 32}) {
    p.delta = 1.0 / inv;
    ResidualRecord r = lemma_residual(LemmaKind::Image2d, flow, p);
    s.param.push_back(p.delta);
    s.value.push_back(r.norms.at("residual"));
    s.records.push_back(r);
  }
  return finish_sweep(std::move(s));
}

std::vector<Sweep> kernel2d_sweeps(int N, int K) {
  SteadyFlow flow = make_flow("cellular");
  OperatorMatrix op = build_B_matrix(flow, K);
  LemmaParams p;
  p.x0 = make_vec({kPi / 2, kPi / 4});
  p.xi0 = make_vec({0.0, 1.0});
  p.N = N;
  p.op = &op;

  Sweep zs;
  zs.kind = "kernel2d";
  zs.flow = "cellular";
  zs.variable = "zeta";
  zs.label = "delta = 1/8";
  p.delta = 1.0 / 8;
  for (double z : {0.8, 0.6, 0.4, 0.3}) {
    p.zeta = z;
    ResidualRecord r = lemma_residual(LemmaKind::Kernel2d, flow, p);
    zs.param.push_back(z);
    zs.value.push_back(r.norms.at("discrepancy"));
    zs.records.push_back(r);
  }

  Sweep ds;
  ds.kind = "kernel2d";
  ds.flow = "cellular";
  ds.variable = "delta";
  ds.label = "zeta = 0.4";
  p.zeta = 0.4;
  for (int inv : {2, 4, 8, 16}) {
    p.delta = 1.0 / inv;
    ResidualRecord r = lemma_residual(LemmaKind::Kernel2d, flow, p);
    ds.param.push_back(p.delta);
    ds.value.push_back(r.norms.at("discrepancy"));
    ds.records.push_back(r);
  }
  return {finish_sweep(std::move(zs)), finish_sweep(std::move(ds))};
}

PacketSpec stable_line_packet(double delta, double x2, double zeta) {
  PacketSpec s;
  s.x0 = make_vec({0.0, x2});
  s.xi0 = make_vec({1.0, 0.0});
  s.zeta = zeta;
  s.delta = delta;
  return s;
}

}  // namespace fluidex::app
