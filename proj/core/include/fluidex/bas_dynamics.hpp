#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fluidex/flow_catalog.hpp"

namespace fluidex {

enum class SampleClass { Full, Star3, F3, Star2, F2Complement, F2Aligned, F2 };

std::string to_string(SampleClass c);
SampleClass parse_sample_class(const std::string& s);

struct AdmissibleSample {
  Vec x0;
  Vec xi0;
  Vec b0;
  SampleClass class_tag = SampleClass::Full;
};

// xi = exp(rho) eta, b = exp(beta) c with |eta| = |c| = 1.
struct BasState {
  Vec x;
  Vec eta;
  double rho = 0.0;
  Vec c;
  double beta = 0.0;
  double t = 0.0;
};

struct BasDerivative {
  Vec x;
  Vec eta;
  double rho = 0.0;
  Vec c;
  double beta = 0.0;
};

BasDerivative bas_rhs(const SteadyFlow& flow, const BasState& s);

// Non-unit xi0 / b0 are allowed; their magnitudes go into rho / beta.
BasState initial_state(const AdmissibleSample& sample);

// Advances s by duration using ceil(duration/step) equal RK4 substeps,
// re-unitizing eta and c after each one. Throws NumericalBlowup.
BasState advance(const SteadyFlow& flow, const BasState& s, double duration, double step);

constexpr double kDefaultStep = 1e-3;

BasState integrate_bas(const SteadyFlow& flow, const AdmissibleSample& sample, double t_final,
                       double step = kDefaultStep);

// States at t = 0, every, 2*every, ..., t_final (the last one always included).
std::vector<BasState> integrate_bas_trajectory(const SteadyFlow& flow, const AdmissibleSample& sample,
                                               double t_final, double step, double every);

struct TransportMatrix {
  Mat A0;
  Vec x0;
  Vec xi0;
  double t = 0.0;
  // base point and unit covector direction at time t
  Vec x_t;
  Vec xi_t;
};

TransportMatrix transport_matrix(const SteadyFlow& flow, const Vec& x0, const Vec& xi0, double t,
                                 double step = kDefaultStep);

// Orthonormal basis of the complement of a nonzero vector (columns).
Mat orthonormal_complement(const Vec& v);

}  // namespace fluidex
