#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluidex/types.hpp"

namespace fluidex {

using ParamMap = std::map<std::string, double>;

enum class SupportKind { Empty, Whole, Band, Threshold };

// Analytically declared support of a field. Band means
// {x : x[axis] in [lo, hi] mod 2pi}.
struct SupportDecl {
  SupportKind kind = SupportKind::Threshold;
  int axis = 0;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(const Vec& x) const;
  std::string describe() const;
};

// Hyperbolic stagnation point with the eigen-pair that realizes the
// rate lambda: xi along the +lambda eigenvector of J, b along the -lambda one.
struct StagnationPoint {
  Vec x;
  Vec xi;
  Vec b;
  double lambda = 0.0;
};

class FlowModel {
 public:
  virtual ~FlowModel() = default;

  virtual int dim() const = 0;
  virtual Vec velocity(const Vec& x) const = 0;
  virtual Mat jacobian(const Vec& x) const = 0;
  // Size 1 in 2D (scalar vorticity), size 3 in 3D.
  virtual Vec vorticity(const Vec& x) const = 0;
  // 2D flows and planar lifts; nullopt for genuinely 3D flows.
  virtual std::optional<Vec> vorticity_gradient(const Vec& x) const = 0;

  virtual void velocity_jacobian(const Vec& x, Vec& u, Mat& J) const {
    u = velocity(x);
    J = jacobian(x);
  }

  virtual SupportDecl omega_support() const { return {}; }
  virtual SupportDecl grad_omega_support() const { return {}; }
  virtual std::vector<StagnationPoint> stagnation_points() const { return {}; }
  virtual bool planar() const { return dim() == 2; }
};

class SteadyFlow {
 public:
  SteadyFlow(std::string name, ParamMap params, std::shared_ptr<const FlowModel> model);

  const std::string& name() const { return name_; }
  const ParamMap& params() const { return params_; }
  int dim() const { return model_->dim(); }
  const FlowModel& model() const { return *model_; }

 private:
  std::string name_;
  ParamMap params_;
  std::shared_ptr<const FlowModel> model_;
};

struct CatalogEntry {
  std::string name;
  int dim;
  ParamMap defaults;
  std::string formula;
  std::string support;
};

const std::vector<CatalogEntry>& catalog();

// Known names: constant, shear, cellular, abc, bump-shear,
// planar-constant, planar-shear, planar-cellular. Unknown names or
// parameters raise ConfigError.
SteadyFlow make_flow(const std::string& name, const ParamMap& params = {});

// "name" or "name:key=val,key=val".
SteadyFlow parse_flow_spec(const std::string& spec);

Vec velocity(const SteadyFlow& flow, const Vec& x);
Mat jacobian(const SteadyFlow& flow, const Vec& x);
Vec vorticity(const SteadyFlow& flow, const Vec& x);
Vec vorticity_gradient(const SteadyFlow& flow, const Vec& x);

Vec flow_map(const SteadyFlow& flow, const Vec& x0, double t, double step);

struct SteadyEulerResidual {
  double div_residual = 0.0;
  double euler_residual = 0.0;
};

SteadyEulerResidual verify_steady_euler(const SteadyFlow& flow, int grid_resolution);

enum class SupportField { Omega, GradOmega };

inline constexpr double kSupportTol = 1e-10;

bool in_support(const SteadyFlow& flow, const Vec& x, SupportField which,
                double tol = kSupportTol);

// Number of RK4 substeps used to cover |duration| with steps no larger than step.
long substeps(double duration, double step);

}  // namespace fluidex
