#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluidex/bas_dynamics.hpp"

namespace fluidex {

// Deterministic sample of the class's admissible set: shifted Halton
// points filtered by the support predicate, plus stagnation eigen-pairs
// (and, for f2_aligned, seeds on their stable lines). Composite classes
// (full, f2) are the union of their parts. Warnings are appended when
// a class comes out empty.
std::vector<AdmissibleSample> sample_admissible(const SteadyFlow& flow, SampleClass cls, int n,
                                                std::uint64_t seed,
                                                std::vector<std::string>* warnings = nullptr);

// max over samples of log|b(t)|
double theta_sup(const SteadyFlow& flow, double t, const std::vector<AdmissibleSample>& samples,
                 double step = kDefaultStep);

struct ExponentEstimate {
  SampleClass class_tag = SampleClass::Full;
  std::vector<double> horizons;
  std::vector<double> theta_log;          // max_samples beta at each horizon
  std::vector<std::size_t> argmax;        // sample index realizing each max
  std::vector<double> rates;              // theta_log / t
  bool rates_monotone_decreasing = true;  // false flags a pre-asymptotic sweep
  double mu_hat = 0.0;                    // LS slope over horizons[fit_start..]
  std::size_t fit_start = 0;
  double slope_residual = 0.0;            // RMS residual of that fit
  std::size_t n_samples = 0;
  int n_requested = 0;
  std::uint64_t seed = 0;
  double step = kDefaultStep;
  std::vector<std::string> warnings;
};

ExponentEstimate estimate_exponent(const SteadyFlow& flow, SampleClass cls, const std::vector<double>& horizons,
                                   int n, std::uint64_t seed, double step = kDefaultStep);

ExponentEstimate estimate_from_samples(const SteadyFlow& flow, SampleClass cls,
                                       const std::vector<AdmissibleSample>& samples,
                                       const std::vector<double>& horizons, double step);

// Estimate over the union of the parts' sample sets: theta is the elementwise max.
ExponentEstimate combine_estimates(SampleClass cls, const std::vector<const ExponentEstimate*>& parts);

double ress_lower_bound(const ExponentEstimate& est, double t);

struct ReportConfig {
  std::vector<SampleClass> classes;
  std::vector<double> horizons;
  int n = 500;
  std::uint64_t seed = 1;
  double step = kDefaultStep;
  std::vector<double> bound_times{1.0};
  double max_relation_tol = 0.1;
};

struct MaxRelation {
  bool available = false;
  double mu_full = 0.0;
  double mu_parts_max = 0.0;
  double gap = 0.0;
  double theta_gap = 0.0;  // max over horizons of |theta_full - max_parts theta|
  bool holds = false;
  std::vector<std::string> parts;
};

struct ClassReport {
  std::string flow;
  int dim = 2;
  std::vector<ExponentEstimate> estimates;
  std::vector<double> bound_times;
  std::vector<std::vector<double>> bounds;  // bounds[i][j] = exp(mu_i * t_j)
  MaxRelation relation;
  std::vector<std::string> warnings;

  const ExponentEstimate* find(SampleClass c) const;
};

ClassReport composite_report(const SteadyFlow& flow, const ReportConfig& config);

// Least-squares slope and RMS residual of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fluidex
