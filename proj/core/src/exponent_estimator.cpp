#include "fluidex/exponent_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "fluidex/errors.hpp"
#include "fluidex/parallel.hpp"

namespace fluidex {

namespace {

constexpr int kHaltonBases[6] = {2, 3, 5, 7, 11, 13};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool is_planar2d(const SteadyFlow& f) { return f.dim() == 2; }

void require_dim(const SteadyFlow& flow, SampleClass cls) {
  const bool needs3 = cls == SampleClass::Star3 || cls == SampleClass::F3;
  const bool needs2 = cls == SampleClass::Star2 || cls == SampleClass::F2Complement ||
                      cls == SampleClass::F2Aligned || cls == SampleClass::F2;
  if (needs3 && flow.dim() != 3)
    throw UnsupportedClass("class " + to_string(cls) + " requires a 3D flow; '" + flow.name() + "' is 2D");
  if (needs2 && !is_planar2d(flow))
    throw UnsupportedClass("class " + to_string(cls) + " requires a 2D flow; '" + flow.name() + "' is 3D");
}

std::vector<SampleClass> base_classes(const SteadyFlow& flow) {
  if (flow.dim() == 2) return {SampleClass::Star2, SampleClass::F2Complement, SampleClass::F2Aligned};
  return {SampleClass::Star3, SampleClass::F3};
}

bool whole_omega_support(const SteadyFlow& flow) {
  return flow.model().omega_support().kind == SupportKind::Whole;
}

std::string f3_whole_message() {
  return "supp(omega) is the whole domain; f3 undefined (requires supp(omega) to be a proper subset of the torus)";
}

bool accepts(const SteadyFlow& flow, SampleClass cls, const Vec& x) {
  switch (cls) {
    case SampleClass::Star3:
      return in_support(flow, x, SupportField::Omega);
    case SampleClass::F3:
      return !in_support(flow, x, SupportField::Omega);
    case SampleClass::Star2:
      return in_support(flow, x, SupportField::GradOmega);
    case SampleClass::F2Complement:
      return !in_support(flow, x, SupportField::GradOmega);
    case SampleClass::F2Aligned:
      return in_support(flow, x, SupportField::GradOmega) && vorticity_gradient(flow, x).norm() > kSupportTol;
    default:
      return true;
  }
}

// Declared supports settle some classes without sampling.
bool trivially_empty(const SteadyFlow& flow, SampleClass cls) {
  const auto& m = flow.model();
  switch (cls) {
    case SampleClass::Star3:
      return m.omega_support().kind == SupportKind::Empty;
    case SampleClass::Star2:
    case SampleClass::F2Aligned:
      return m.grad_omega_support().kind == SupportKind::Empty;
    case SampleClass::F2Complement:
      return m.grad_omega_support().kind == SupportKind::Whole;
    default:
      return false;
  }
}

AdmissibleSample aligned_sample(const SteadyFlow& flow, const Vec& x) {
  Vec g = vorticity_gradient(flow, x);
  Vec xi = g / g.norm();
  return {wrap_point(x), xi, perp(xi), SampleClass::F2Aligned};
}

std::vector<AdmissibleSample> sample_base(const SteadyFlow& flow, SampleClass cls, int n, std::uint64_t seed,
                                          std::vector<std::string>* warnings) {
  std::vector<AdmissibleSample> out;
  const int d = flow.dim();
  if (trivially_empty(flow, cls)) {
    if (warnings) warnings->push_back("class " + to_string(cls) + " is empty on flow '" + flow.name() + "'");
    return out;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cls)};
  std::mt19937_64 rng(seq);
  const int ndim = d == 2 ? 4 : 6;
  double shift[6];
  for (int j = 0; j < ndim; ++j) shift[j] = unit_double(rng);

  const std::uint64_t max_tries = 200ull * static_cast<std::uint64_t>(n) + 1000ull;
  for (std::uint64_t i = 1; i <= max_tries && static_cast<int>(out.size()) < n; ++i) {
    double q[6];
    for (int j = 0; j < ndim; ++j) {
      double v = radical_inverse(i, kHaltonBases[j]) + shift[j];
      q[j] = v - std::floor(v);
    }
    Vec x(d);
    for (int a = 0; a < d; ++a) x[a] = kTwoPi * q[a];
    if (!accepts(flow, cls, x)) continue;
    if (cls == SampleClass::F2Aligned) {
      out.push_back(aligned_sample(flow, x));
      continue;
    }
    AdmissibleSample s;
    s.x0 = x;
    s.class_tag = cls;
    if (d == 2) {
      const double th = kTwoPi * q[2];
      s.xi0 = make_vec({std::cos(th), std::sin(th)});
      s.b0 = (q[3] < 0.5 ? 1.0 : -1.0) * perp(s.xi0);
    } else {
      const double z = 2.0 * q[3] - 1.0;
      const double ph = kTwoPi * q[4];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      s.xi0 = make_vec({r * std::cos(ph), r * std::sin(ph), z});
      Mat B = orthonormal_complement(s.xi0);
      const double al = kTwoPi * q[5];
      s.b0 = std::cos(al) * B.col(0) + std::sin(al) * B.col(1);
    }
    out.push_back(s);
  }
  if (static_cast<int>(out.size()) < n && warnings) {
    std::ostringstream os;
    os << "class " << to_string(cls) << ": only " << out.size() << " of " << n
       << " sample points satisfied the support predicate";
    warnings->push_back(os.str());
  }

  for (const auto& sp : flow.model().stagnation_points()) {
    if (cls == SampleClass::F2Complement || cls == SampleClass::F3) {
      if (!accepts(flow, cls, sp.x)) continue;
    } else if (cls == SampleClass::F2Aligned) {
      // grad omega vanishes at the point itself; the pair is the limit of
      // aligned pairs along the stable line, so it lies in the closure.
      if (!in_support(flow, sp.x, SupportField::GradOmega)) continue;
    } else if (!accepts(flow, cls, sp.x)) {
      continue;
    }
    out.push_back({sp.x, sp.xi, sp.b, cls});
    if (cls == SampleClass::F2Aligned) {
      for (double s : {0.05, 0.1, 0.2, 0.4, 0.8, 1.2})
        for (double sign : {1.0, -1.0}) {
          Vec x = sp.x + sign * s * sp.b;
          if (accepts(flow, cls, x)) out.push_back(aligned_sample(flow, x));
        }
    }
  }
  if (out.empty() && warnings)
    warnings->push_back("class " + to_string(cls) + " is empty on flow '" + flow.name() + "'");
  return out;
}

}  // namespace

std::vector<AdmissibleSample> sample_admissible(const SteadyFlow& flow, SampleClass cls, int n, std::uint64_t seed,
                                                std::vector<std::string>* warnings) {
  if (n < 1) throw ConfigError("sample_admissible: n must be >= 1");
  require_dim(flow, cls);
  if (cls == SampleClass::F3 && whole_omega_support(flow)) throw UnsupportedClass(f3_whole_message());

  std::vector<SampleClass> parts;
  if (cls == SampleClass::Full) {
    for (SampleClass c : base_classes(flow))
      if (!(c == SampleClass::F3 && whole_omega_support(flow))) parts.push_back(c);
  } else if (cls == SampleClass::F2) {
    parts = {SampleClass::F2Complement, SampleClass::F2Aligned};
  } else {
    return sample_base(flow, cls, n, seed, warnings);
  }
  std::vector<AdmissibleSample> out;
  std::vector<std::string> local;
  for (SampleClass c : parts) {
    auto s = sample_base(flow, c, n, seed, &local);
    out.insert(out.end(), s.begin(), s.end());
  }
  if (out.empty() && warnings)
    warnings->push_back("class " + to_string(cls) + " is empty on flow '" + flow.name() + "'");
  return out;
}

namespace {

[[noreturn]] void rethrow_with_sample(const NumericalBlowup& e, std::size_t i, const AdmissibleSample& s) {
  std::ostringstream os;
  os << e.what() << " (sample " << i << ", x0 = [";
  for (Eigen::Index a = 0; a < s.x0.size(); ++a) os << (a ? ", " : "") << s.x0[a];
  os << "], t = " << e.time() << ")";
  throw NumericalBlowup(os.str(), e.time());
}

}  // namespace

double theta_sup(const SteadyFlow& flow, double t, const std::vector<AdmissibleSample>& samples, double step) {
  if (samples.empty()) throw UnsupportedClass("theta_sup: empty sample set");
  std::vector<double> beta(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      beta[i] = integrate_bas(flow, samples[i], t, step).beta;
    } catch (const NumericalBlowup& e) {
      rethrow_with_sample(e, i, samples[i]);
    }
  });
  return *std::max_element(beta.begin(), beta.end());
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw DomainError("linear_fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: abscissae are all equal");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss += r * r;
  }
  return {slope, std::sqrt(ss / m)};
}

namespace {

void check_horizons(const std::vector<double>& h) {
  if (h.size() < 2) throw ConfigError("horizons: need at least two entries");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) throw ConfigError("horizons: entries must be positive");
    if (i > 0 && !(h[i] > h[i - 1])) throw ConfigError("horizons: entries must be increasing");
  }
}

void finish(ExponentEstimate& e) {
  const std::size_t m = e.horizons.size();
  e.rates.resize(m);
  e.rates_monotone_decreasing = true;
  for (std::size_t j = 0; j < m; ++j) {
    e.rates[j] = e.theta_log[j] / e.horizons[j];
    if (j > 0 && e.rates[j] > e.rates[j - 1]) e.rates_monotone_decreasing = false;
  }
  e.fit_start = std::min(m / 2, m - 2);
  std::vector<double> x(e.horizons.begin() + e.fit_start, e.horizons.end());
  std::vector<double> y(e.theta_log.begin() + e.fit_start, e.theta_log.end());
  auto [slope, res] = linear_fit(x, y);
  e.mu_hat = slope;
  e.slope_residual = res;
}

}  // namespace

ExponentEstimate estimate_from_samples(const SteadyFlow& flow, SampleClass cls,
                                       const std::vector<AdmissibleSample>& samples,
                                       const std::vector<double>& horizons, double step) {
  check_horizons(horizons);
  if (samples.empty()) throw UnsupportedClass("class " + to_string(cls) + ": empty sample set");
  const std::size_t m = horizons.size();
  std::vector<double> beta(samples.size() * m);
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      BasState s = initial_state(samples[i]);
      double t = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        s = advance(flow, s, horizons[j] - t, step);
        t = horizons[j];
        beta[i * m + j] = s.beta;
      }
    } catch (const NumericalBlowup& e) {
      rethrow_with_sample(e, i, samples[i]);
    }
  });
  ExponentEstimate e;
  e.class_tag = cls;
  e.horizons = horizons;
  e.theta_log.assign(m, -std::numeric_limits<double>::infinity());
  e.argmax.assign(m, 0);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (beta[i * m + j] > e.theta_log[j]) {
        e.theta_log[j] = beta[i * m + j];
        e.argmax[j] = i;
      }
  e.n_samples = samples.size();
  e.step = step;
  finish(e);
  return e;
}

ExponentEstimate estimate_exponent(const SteadyFlow& flow, SampleClass cls, const std::vector<double>& horizons,
                                   int n, std::uint64_t seed, double step) {
  check_horizons(horizons);
  std::vector<std::string> warnings;
  auto samples = sample_admissible(flow, cls, n, seed, &warnings);
  if (samples.empty())
    throw UnsupportedClass("class " + to_string(cls) + " has no admissible samples on flow '" + flow.name() + "'");
  ExponentEstimate e = estimate_from_samples(flow, cls, samples, horizons, step);
  e.n_requested = n;
  e.seed = seed;
  e.warnings = std::move(warnings);
  return e;
}

ExponentEstimate combine_estimates(SampleClass cls, const std::vector<const ExponentEstimate*>& parts) {
  if (parts.empty()) throw UnsupportedClass("class " + to_string(cls) + ": nothing to combine");
  ExponentEstimate e;
  e.class_tag = cls;
  e.horizons = parts.front()->horizons;
  const std::size_t m = e.horizons.size();
  e.theta_log.assign(m, -std::numeric_limits<double>::infinity());
  e.argmax.assign(m, 0);
  e.step = parts.front()->step;
  e.seed = parts.front()->seed;
  e.n_requested = parts.front()->n_requested;
  std::size_t offset = 0;
  for (const ExponentEstimate* p : parts) {
    if (p->horizons != e.horizons) throw ContractViolation("combine_estimates: horizon mismatch");
    for (std::size_t j = 0; j < m; ++j)
      if (p->theta_log[j] > e.theta_log[j]) {
        e.theta_log[j] = p->theta_log[j];
        e.argmax[j] = offset + p->argmax[j];
      }
    offset += p->n_samples;
    e.warnings.insert(e.warnings.end(), p->warnings.begin(), p->warnings.end());
  }
  e.n_samples = offset;
  finish(e);
  return e;
}

double ress_lower_bound(const ExponentEstimate& est, double t) {
  if (!(t > 0.0)) throw ConfigError("ress_lower_bound: t must be positive");
  return std::exp(est.mu_hat * t);
}

const ExponentEstimate* ClassReport::find(SampleClass c) const {
  for (const auto& e : estimates)
    if (e.class_tag == c) return &e;
  return nullptr;
}

ClassReport composite_report(const SteadyFlow& flow, const ReportConfig& cfg) {
  check_horizons(cfg.horizons);
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  for (SampleClass c : cfg.classes) {
    require_dim(flow, c);
    if (c == SampleClass::F3 && whole_omega_support(flow)) throw UnsupportedClass(f3_whole_message());
  }
  for (double t : cfg.bound_times)
    if (!(t > 0.0)) throw ConfigError("bound times must be positive");

  ClassReport rep;
  rep.flow = flow.name();
  rep.dim = flow.dim();
  rep.bound_times = cfg.bound_times;

  // every base class is integrated once; composites are elementwise maxima
  std::vector<std::pair<SampleClass, ExponentEstimate>> base;
  for (SampleClass c : base_classes(flow)) {
    if (c == SampleClass::F3 && whole_omega_support(flow)) continue;
    std::vector<std::string> w;
    auto samples = sample_admissible(flow, c, cfg.n, cfg.seed, &w);
    rep.warnings.insert(rep.warnings.end(), w.begin(), w.end());
    if (samples.empty()) continue;
    ExponentEstimate e = estimate_from_samples(flow, c, samples, cfg.horizons, cfg.step);
    e.n_requested = cfg.n;
    e.seed = cfg.seed;
    e.warnings = w;
    base.emplace_back(c, std::move(e));
  }
  auto get = [&](SampleClass c) -> const ExponentEstimate* {
    for (const auto& [k, e] : base)
      if (k == c) return &e;
    return nullptr;
  };
  auto composite = [&](SampleClass c) -> std::optional<ExponentEstimate> {
    std::vector<const ExponentEstimate*> parts;
    std::vector<SampleClass> names = c == SampleClass::F2
                                         ? std::vector<SampleClass>{SampleClass::F2Complement, SampleClass::F2Aligned}
                                         : base_classes(flow);
    for (SampleClass p : names)
      if (const auto* e = get(p)) parts.push_back(e);
    if (parts.empty()) return std::nullopt;
    return combine_estimates(c, parts);
  };

  std::optional<ExponentEstimate> full = composite(SampleClass::Full);
  std::optional<ExponentEstimate> f2;
  if (flow.dim() == 2) f2 = composite(SampleClass::F2);

  for (SampleClass c : cfg.classes) {
    std::optional<ExponentEstimate> e;
    if (c == SampleClass::Full)
      e = full;
    else if (c == SampleClass::F2)
      e = f2;
    else if (const auto* b = get(c))
      e = *b;
    if (!e) {
      rep.warnings.push_back("class " + to_string(c) + " has no admissible samples; omitted");
      continue;
    }
    rep.estimates.push_back(*e);
    std::vector<double> row;
    for (double t : cfg.bound_times) row.push_back(ress_lower_bound(*e, t));
    rep.bounds.push_back(row);
  }

  // max relation between the full exponent and the top-level classes
  std::vector<const ExponentEstimate*> top;
  if (flow.dim() == 2) {
    if (const auto* s = get(SampleClass::Star2)) top.push_back(s);
    if (f2) top.push_back(&*f2);
  } else {
    if (const auto* s = get(SampleClass::Star3)) top.push_back(s);
    if (const auto* f = get(SampleClass::F3)) top.push_back(f);
  }
  if (full && !top.empty()) {
    MaxRelation& r = rep.relation;
    r.available = true;
    r.mu_full = full->mu_hat;
    r.mu_parts_max = -std::numeric_limits<double>::infinity();
    for (const auto* p : top) {
      r.mu_parts_max = std::max(r.mu_parts_max, p->mu_hat);
      r.parts.push_back(to_string(p->class_tag));
    }
    r.gap = std::abs(r.mu_full - r.mu_parts_max);
    for (std::size_t j = 0; j < full->horizons.size(); ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (const auto* p : top) mx = std::max(mx, p->theta_log[j]);
      r.theta_gap = std::max(r.theta_gap, std::abs(full->theta_log[j] - mx));
    }
    r.holds = r.gap <= cfg.max_relation_tol;
  }
  return rep;
}

}  // namespace fluidex
