#include "fluidex/flow_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluidex/errors.hpp"
#include "fluidex/fourier_field.hpp"

namespace fluidex {

bool SupportDecl::contains(const Vec& x) const {
  switch (kind) {
    case SupportKind::Whole:
      return true;
    case SupportKind::Band: {
      if (hi - lo >= kTwoPi) return true;
      return wrap_angle(x[axis] - lo) <= hi - lo;
    }
    default:
      return false;
  }
}

std::string SupportDecl::describe() const {
  switch (kind) {
    case SupportKind::Empty:
      return "empty";
    case SupportKind::Whole:
      return "whole";
    case SupportKind::Band: {
      std::ostringstream os;
      os << "band(x" << axis + 1 << " in [" << lo << ", " << hi << "])";
      return os.str();
    }
    default:
      return "threshold";
  }
}

SteadyFlow::SteadyFlow(std::string name, ParamMap params, std::shared_ptr<const FlowModel> model)
    : name_(std::move(name)), params_(std::move(params)), model_(std::move(model)) {
  if (!model_) throw ConfigError("SteadyFlow: null model");
}

namespace {

class ConstantFlow final : public FlowModel {
 public:
  explicit ConstantFlow(Vec c) : c_(std::move(c)) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  Vec velocity(const Vec&) const override { return c_; }
  Mat jacobian(const Vec&) const override { return Mat::Zero(dim(), dim()); }
  Vec vorticity(const Vec&) const override { return Vec::Zero(dim() == 2 ? 1 : 3); }
  std::optional<Vec> vorticity_gradient(const Vec&) const override {
    if (dim() != 2) return std::nullopt;
    return Vec::Zero(2);
  }
  SupportDecl omega_support() const override { return {SupportKind::Empty}; }
  SupportDecl grad_omega_support() const override { return {SupportKind::Empty}; }

 private:
  Vec c_;
};

// u = (A sin x2, 0)
class ShearFlow final : public FlowModel {
 public:
  explicit ShearFlow(double a) : a_(a) {}
  int dim() const override { return 2; }
  Vec velocity(const Vec& x) const override { return make_vec({a_ * std::sin(x[1]), 0.0}); }
  Mat jacobian(const Vec& x) const override {
    Mat J = Mat::Zero(2, 2);
    J(0, 1) = a_ * std::cos(x[1]);
    return J;
  }
  Vec vorticity(const Vec& x) const override { return make_vec({-a_ * std::cos(x[1])}); }
  std::optional<Vec> vorticity_gradient(const Vec& x) const override {
    return make_vec({0.0, a_ * std::sin(x[1])});
  }
  SupportDecl omega_support() const override {
    return {a_ == 0.0 ? SupportKind::Empty : SupportKind::Whole};
  }
  SupportDecl grad_omega_support() const override { return omega_support(); }

 private:
  double a_;
};

// u = A (sin x1 cos x2, -cos x1 sin x2), omega = 2A sin x1 sin x2
class CellularFlow final : public FlowModel {
 public:
  explicit CellularFlow(double a) : a_(a) {}
  int dim() const override { return 2; }
  Vec velocity(const Vec& x) const override {
    return make_vec({a_ * std::sin(x[0]) * std::cos(x[1]), -a_ * std::cos(x[0]) * std::sin(x[1])});
  }
  Mat jacobian(const Vec& x) const override {
    Vec u;
    Mat J;
    velocity_jacobian(x, u, J);
    return J;
  }
  void velocity_jacobian(const Vec& x, Vec& u, Mat& J) const override {
    const double s1 = std::sin(x[0]), c1 = std::cos(x[0]);
    const double s2 = std::sin(x[1]), c2 = std::cos(x[1]);
    u.resize(2);
    u << a_ * s1 * c2, -a_ * c1 * s2;
    J.resize(2, 2);
    J << a_ * c1 * c2, -a_ * s1 * s2, a_ * s1 * s2, -a_ * c1 * c2;
  }
  Vec vorticity(const Vec& x) const override {
    return make_vec({2.0 * a_ * std::sin(x[0]) * std::sin(x[1])});
  }
  std::optional<Vec> vorticity_gradient(const Vec& x) const override {
    return make_vec({2.0 * a_ * std::cos(x[0]) * std::sin(x[1]),
                     2.0 * a_ * std::sin(x[0]) * std::cos(x[1])});
  }
  SupportDecl omega_support() const override {
    return {a_ == 0.0 ? SupportKind::Empty : SupportKind::Whole};
  }
  SupportDecl grad_omega_support() const override { return omega_support(); }
  std::vector<StagnationPoint> stagnation_points() const override {
    std::vector<StagnationPoint> out;
    if (a_ == 0.0) return out;
    for (double x1 : {0.0, kPi})
      for (double x2 : {0.0, kPi}) {
        StagnationPoint s;
        s.x = make_vec({x1, x2});
        const double d = a_ * std::cos(x1) * std::cos(x2);  // J = diag(d, -d)
        s.xi = d > 0 ? make_vec({1.0, 0.0}) : make_vec({0.0, 1.0});
        s.b = d > 0 ? make_vec({0.0, 1.0}) : make_vec({1.0, 0.0});
        s.lambda = std::abs(a_);
        out.push_back(s);
      }
    return out;
  }

 private:
  double a_;
};

class AbcFlow final : public FlowModel {
 public:
  AbcFlow(double a, double b, double c) : a_(a), b_(b), c_(c) {}
  int dim() const override { return 3; }
  Vec velocity(const Vec& x) const override {
    return make_vec({a_ * std::sin(x[2]) + c_ * std::cos(x[1]),
                     b_ * std::sin(x[0]) + a_ * std::cos(x[2]),
                     c_ * std::sin(x[1]) + b_ * std::cos(x[0])});
  }
  Mat jacobian(const Vec& x) const override {
    Vec u;
    Mat J;
    velocity_jacobian(x, u, J);
    return J;
  }
  void velocity_jacobian(const Vec& x, Vec& u, Mat& J) const override {
    const double s1 = std::sin(x[0]), c1 = std::cos(x[0]);
    const double s2 = std::sin(x[1]), c2 = std::cos(x[1]);
    const double s3 = std::sin(x[2]), c3 = std::cos(x[2]);
    u.resize(3);
    u << a_ * s3 + c_ * c2, b_ * s1 + a_ * c3, c_ * s2 + b_ * c1;
    J.resize(3, 3);
    J << 0.0, -c_ * s2, a_ * c3,
         b_ * c1, 0.0, -a_ * s3,
         -b_ * s1, c_ * c2, 0.0;
  }
  Vec vorticity(const Vec& x) const override { return velocity(x); }
  std::optional<Vec> vorticity_gradient(const Vec&) const override { return std::nullopt; }
  SupportDecl omega_support() const override {
    if (a_ == 0.0 && b_ == 0.0 && c_ == 0.0) return {SupportKind::Empty};
    return {SupportKind::Whole};
  }

 private:
  double a_, b_, c_;
};

// u = (f(x2), 0, 0), f = A (1 - s^2)^3 for |s| < 1, s = (x2 - center)/width.
class BumpShearFlow final : public FlowModel {
 public:
  BumpShearFlow(double amp, double center, double width) : amp_(amp), center_(center), width_(width) {}
  int dim() const override { return 3; }

  double s_of(double x2) const { return wrap_signed(x2 - center_) / width_; }
  double f(double x2) const {
    const double s = s_of(x2);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return amp_ * q * q * q;
  }
  double fprime(double x2) const {
    const double s = s_of(x2);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return amp_ * (-6.0 * s * q * q) / width_;
  }

  Vec velocity(const Vec& x) const override { return make_vec({f(x[1]), 0.0, 0.0}); }
  Mat jacobian(const Vec& x) const override {
    Mat J = Mat::Zero(3, 3);
    J(0, 1) = fprime(x[1]);
    return J;
  }
  Vec vorticity(const Vec& x) const override { return make_vec({0.0, 0.0, -fprime(x[1])}); }
  std::optional<Vec> vorticity_gradient(const Vec&) const override { return std::nullopt; }
  SupportDecl omega_support() const override {
    if (amp_ == 0.0) return {SupportKind::Empty};
    return {SupportKind::Band, 1, center_ - width_, center_ + width_};
  }

 private:
  double amp_, center_, width_;
};

class PlanarLift final : public FlowModel {
 public:
  explicit PlanarLift(std::shared_ptr<const FlowModel> base) : base_(std::move(base)) {}
  int dim() const override { return 3; }
  bool planar() const override { return true; }
  Vec velocity(const Vec& x) const override {
    Vec u = base_->velocity(x.head(2));
    return make_vec({u[0], u[1], 0.0});
  }
  Mat jacobian(const Vec& x) const override {
    Mat J = Mat::Zero(3, 3);
    J.topLeftCorner(2, 2) = base_->jacobian(x.head(2));
    return J;
  }
  void velocity_jacobian(const Vec& x, Vec& u, Mat& J) const override {
    Vec u2;
    Mat J2;
    base_->velocity_jacobian(x.head(2), u2, J2);
    u = make_vec({u2[0], u2[1], 0.0});
    J = Mat::Zero(3, 3);
    J.topLeftCorner(2, 2) = J2;
  }
  Vec vorticity(const Vec& x) const override {
    return make_vec({0.0, 0.0, base_->vorticity(x.head(2))[0]});
  }
  std::optional<Vec> vorticity_gradient(const Vec& x) const override {
    auto g = base_->vorticity_gradient(x.head(2));
    if (!g) return std::nullopt;
    return make_vec({(*g)[0], (*g)[1], 0.0});
  }
  SupportDecl omega_support() const override { return base_->omega_support(); }
  SupportDecl grad_omega_support() const override { return base_->grad_omega_support(); }
  std::vector<StagnationPoint> stagnation_points() const override {
    std::vector<StagnationPoint> out;
    for (const auto& s : base_->stagnation_points()) {
      StagnationPoint l;
      l.x = make_vec({s.x[0], s.x[1], 0.0});
      l.xi = make_vec({s.xi[0], s.xi[1], 0.0});
      l.b = make_vec({s.b[0], s.b[1], 0.0});
      l.lambda = s.lambda;
      out.push_back(l);
    }
    return out;
  }

 private:
  std::shared_ptr<const FlowModel> base_;
};

ParamMap merge_params(const std::string& name, const ParamMap& defaults, const ParamMap& given,
                      const std::vector<std::string>& optional_keys = {}) {
  ParamMap out = defaults;
  for (const auto& [k, v] : given) {
    bool known = defaults.count(k) > 0 ||
                 std::find(optional_keys.begin(), optional_keys.end(), k) != optional_keys.end();
    if (!known) throw ConfigError("flow '" + name + "': unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("flow '" + name + "': parameter '" + k + "' is not finite");
    out[k] = v;
  }
  return out;
}

std::shared_ptr<const FlowModel> make_planar_base(const std::string& base, const ParamMap& p) {
  if (base == "constant") return std::make_shared<ConstantFlow>(make_vec({p.at("c1"), p.at("c2")}));
  if (base == "shear") return std::make_shared<ShearFlow>(p.at("amp"));
  return std::make_shared<CellularFlow>(p.at("amp"));
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"constant", 2, {{"c1", 1.0}, {"c2", 0.0}}, "u = (c1, c2[, c3]); 3D when c3 is given", "omega: empty"},
      {"shear", 2, {{"amp", 1.0}}, "u = (amp sin x2, 0)", "omega: whole, grad_omega: whole"},
      {"cellular", 2, {{"amp", 1.0}}, "u = amp (sin x1 cos x2, -cos x1 sin x2)",
       "omega: whole, grad_omega: whole"},
      {"abc", 3, {{"A", 1.0}, {"B", 1.0}, {"C", 1.0}},
       "u = (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1)", "omega: whole"},
      {"bump-shear", 3, {{"amp", 1.0}, {"center", kPi}, {"width", 1.0}},
       "u = (amp (1 - s^2)^3 on |s| < 1, 0, 0), s = (x2 - center)/width",
       "omega: band(x2 in [center - width, center + width])"},
      {"planar-constant", 3, {{"c1", 1.0}, {"c2", 0.0}}, "u = (c1, c2, 0)", "omega: empty"},
      {"planar-shear", 3, {{"amp", 1.0}}, "u = (amp sin x2, 0, 0)", "omega: whole"},
      {"planar-cellular", 3, {{"amp", 1.0}}, "u = amp (sin x1 cos x2, -cos x1 sin x2, 0)",
       "omega: whole"},
  };
  return entries;
}

SteadyFlow make_flow(const std::string& name, const ParamMap& params) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : catalog())
    if (e.name == name) entry = &e;
  if (!entry) throw ConfigError("unknown flow '" + name + "'");

  if (name == "constant") {
    ParamMap p = merge_params(name, entry->defaults, params, {"c3"});
    Vec c = p.count("c3") ? make_vec({p["c1"], p["c2"], p["c3"]}) : make_vec({p["c1"], p["c2"]});
    return SteadyFlow(name, p, std::make_shared<ConstantFlow>(c));
  }
  ParamMap p = merge_params(name, entry->defaults, params);
  if (name == "shear") return SteadyFlow(name, p, std::make_shared<ShearFlow>(p["amp"]));
  if (name == "cellular") return SteadyFlow(name, p, std::make_shared<CellularFlow>(p["amp"]));
  if (name == "abc") return SteadyFlow(name, p, std::make_shared<AbcFlow>(p["A"], p["B"], p["C"]));
  if (name == "bump-shear") {
    if (!(p["width"] > 0.0 && p["width"] < kPi))
      throw ConfigError("flow 'bump-shear': width must lie in (0, pi)");
    return SteadyFlow(name, p, std::make_shared<BumpShearFlow>(p["amp"], p["center"], p["width"]));
  }
  const std::string base = name.substr(std::string("planar-").size());
  return SteadyFlow(name, p, std::make_shared<PlanarLift>(make_planar_base(base, p)));
}

SteadyFlow parse_flow_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  ParamMap params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("flow spec: expected key=value, got '" + item + "'");
      std::string key = item.substr(0, eq);
      std::string val = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != val.size())
        throw ConfigError("flow spec: parameter '" + key + "' is not a number: '" + val + "'");
      params[key] = v;
    }
  }
  return make_flow(name, params);
}

namespace {

void check_point(const SteadyFlow& flow, const Vec& x) {
  if (x.size() != flow.dim())
    throw ContractViolation("point dimension " + std::to_string(x.size()) + " does not match flow dimension " +
                            std::to_string(flow.dim()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) throw ContractViolation("point has a non-finite component");
}

}  // namespace

Vec velocity(const SteadyFlow& flow, const Vec& x) {
  check_point(flow, x);
  return flow.model().velocity(wrap_point(x));
}

Mat jacobian(const SteadyFlow& flow, const Vec& x) {
  check_point(flow, x);
  return flow.model().jacobian(wrap_point(x));
}

Vec vorticity(const SteadyFlow& flow, const Vec& x) {
  check_point(flow, x);
  return flow.model().vorticity(wrap_point(x));
}

Vec vorticity_gradient(const SteadyFlow& flow, const Vec& x) {
  check_point(flow, x);
  auto g = flow.model().vorticity_gradient(wrap_point(x));
  if (!g) throw UnsupportedOperation("vorticity_gradient: flow '" + flow.name() + "' is not planar");
  return *g;
}

long substeps(double duration, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ContractViolation("step must be positive and finite");
  const double d = std::abs(duration);
  if (d == 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(d / step - 1e-9)));
}

Vec flow_map(const SteadyFlow& flow, const Vec& x0, double t, double step) {
  check_point(flow, x0);
  const long n = substeps(t, step);
  if (n == 0) return wrap_point(x0);
  const double h = t / static_cast<double>(n);
  const FlowModel& m = flow.model();
  Vec x = x0;
  for (long i = 0; i < n; ++i) {
    Vec k1 = m.velocity(x);
    Vec k2 = m.velocity(x + 0.5 * h * k1);
    Vec k3 = m.velocity(x + 0.5 * h * k2);
    Vec k4 = m.velocity(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw NumericalBlowup("flow_map: non-finite position", static_cast<double>(i + 1) * h);
  }
  return wrap_point(x);
}

SteadyEulerResidual verify_steady_euler(const SteadyFlow& flow, int N) {
  if (!is_power_of_two(N) || N < 32)
    throw ConfigError("verify_steady_euler: resolution must be a power of two >= 32");
  const int d = flow.dim();
  const FlowModel& m = flow.model();
  auto grid = sample_grid(d, N, d, [&](const Vec& x, cplx* out) {
    Vec u = m.velocity(x);
    for (int a = 0; a < d; ++a) out[a] = u[a];
  });
  FourierField u = FourierField::from_grid(d, N, grid);

  // spectral derivatives du_a/dx_b, Nyquist dropped
  auto deriv = [&](int a, int b) {
    std::vector<cplx> c(u.points());
    for (std::size_t i = 0; i < c.size(); ++i) {
      Wavevector k = u.wavevector(i);
      bool nyq = false;
      for (int e = 0; e < d; ++e)
        if (k[e] == -N / 2) nyq = true;
      c[i] = nyq ? cplx(0.0) : cplx(0.0, k[b]) * u.comp[a][i];
    }
    return fft_backward(c, d, N);
  };

  SteadyEulerResidual r;
  {
    std::vector<cplx> div(u.points(), 0.0);
    for (int a = 0; a < d; ++a) {
      auto g = deriv(a, a);
      for (std::size_t i = 0; i < div.size(); ++i) div[i] += g[i];
    }
    for (const auto& v : div) r.div_residual = std::max(r.div_residual, std::abs(v));
  }

  FourierField adv(d, N, d);
  for (int a = 0; a < d; ++a) {
    std::vector<cplx> acc(u.points(), 0.0);
    for (int b = 0; b < d; ++b) {
      auto g = deriv(a, b);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += grid[b][i] * g[i];
    }
    adv.comp[a] = fft_forward(acc, d, N);
  }
  // Helmholtz projection of u.grad u
  for (std::size_t i = 0; i < adv.points(); ++i) {
    Wavevector k = adv.wavevector(i);
    double k2 = 0.0;
    cplx kv = 0.0;
    for (int a = 0; a < d; ++a) {
      k2 += double(k[a]) * k[a];
      kv += double(k[a]) * adv.comp[a][i];
    }
    if (k2 == 0.0) continue;
    for (int a = 0; a < d; ++a) adv.comp[a][i] -= double(k[a]) * kv / k2;
  }
  for (const auto& g : adv.to_grid())
    for (const auto& v : g) r.euler_residual = std::max(r.euler_residual, std::abs(v));
  return r;
}

bool in_support(const SteadyFlow& flow, const Vec& x, SupportField which, double tol) {
  check_point(flow, x);
  const Vec y = wrap_point(x);
  const FlowModel& m = flow.model();
  if (which == SupportField::Omega) {
    if (m.vorticity(y).norm() > tol) return true;
    return m.omega_support().contains(y);
  }
  auto g = m.vorticity_gradient(y);
  if (!g) throw UnsupportedOperation("in_support(grad_omega): flow '" + flow.name() + "' is not planar");
  if (g->norm() > tol) return true;
  return m.grad_omega_support().contains(y);
}

}  // namespace fluidex
