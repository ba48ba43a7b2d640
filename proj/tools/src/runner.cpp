#include "runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "experiments.hpp"
#include "fluidex/errors.hpp"
#include "fluidex/exponent_estimator.hpp"
#include "fluidex/flow_catalog.hpp"
#include "fluidex/le_oracle.hpp"
#include "fluidex/spectral_toolbox.hpp"
#include "fluidex/version.hpp"

namespace fluidex::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256: OpenSSL digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

OutputSet::OutputSet(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError("out: cannot create directory '" + dir_ + "': " + ec.message());
}

void OutputSet::write(const std::string& name, const std::string& content) {
  const fs::path target = fs::path(dir_) / name;
  const fs::path tmp = fs::path(dir_) / ("." + name + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
  auto it = std::find_if(files_.begin(), files_.end(), [&](const OutputFile& o) { return o.name == name; });
  OutputFile rec{name, sha256_hex(content), content.size()};
  if (it != files_.end()) *it = rec;
  else files_.push_back(rec);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

json flow_json(const SteadyFlow& f) {
  return {{"name", f.name()}, {"dim", f.dim()}, {"params", f.params()}};
}

std::string gnuplot_header(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           bool logscale) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n";
  if (logscale) gp << "set logscale xy\n";
  return gp.str();
}

void cmd_catalog(OutputSet& outs, std::ostream& out) {
  json arr = json::array();
  for (const auto& e : catalog()) {
    arr.push_back({{"name", e.name}, {"dim", e.dim}, {"params", e.defaults}, {"formula", e.formula},
                   {"support", e.support}});
    out << std::left << std::setw(18) << e.name << " dim=" << e.dim << "  " << e.support << "\n";
  }
  outs.write("catalog.json", dump({{"flows", arr}}));
}

std::vector<SampleClass> default_classes(const SteadyFlow& f) {
  if (f.dim() == 2) return {SampleClass::Full, SampleClass::Star2, SampleClass::F2};
  std::vector<SampleClass> c{SampleClass::Full, SampleClass::Star3};
  if (f.model().omega_support().kind != SupportKind::Whole) c.push_back(SampleClass::F3);
  return c;
}

json estimate_json(const ExponentEstimate& e) {
  return {{"class", to_string(e.class_tag)},
          {"mu_hat", e.mu_hat},
          {"horizons", e.horizons},
          {"theta_log", e.theta_log},
          {"rates", e.rates},
          {"argmax", e.argmax},
          {"rates_monotone_decreasing", e.rates_monotone_decreasing},
          {"fit_start", e.fit_start},
          {"slope_residual", e.slope_residual},
          {"n_samples", e.n_samples},
          {"n_requested", e.n_requested},
          {"seed", e.seed},
          {"step", e.step},
          {"warnings", e.warnings}};
}

void cmd_exponents(const RunConfig& cfg, const SteadyFlow& flow, OutputSet& outs, std::ostream& out) {
  ReportConfig rc;
  if (cfg.classes.empty()) {
    rc.classes = default_classes(flow);
  } else {
    for (const auto& c : cfg.classes) rc.classes.push_back(parse_sample_class(c));
  }
  rc.horizons = cfg.horizons;
  rc.n = cfg.n;
  rc.seed = cfg.seed;
  rc.step = cfg.step;
  rc.bound_times = cfg.bound_times;
  ClassReport rep = composite_report(flow, rc);

  json ests = json::array();
  std::ostringstream csv;
  csv << "class,t,theta_log,rate\n";
  for (const auto& e : rep.estimates) {
    ests.push_back(estimate_json(e));
    for (std::size_t j = 0; j < e.horizons.size(); ++j)
      csv << to_string(e.class_tag) << "," << fmt(e.horizons[j]) << "," << fmt(e.theta_log[j]) << ","
          << fmt(e.rates[j]) << "\n";
    out << std::left << std::setw(14) << to_string(e.class_tag) << " mu_hat = " << fmt(e.mu_hat) << "  (n = "
        << e.n_samples << ")\n";
  }
  json bounds = json::array();
  for (std::size_t i = 0; i < rep.estimates.size(); ++i)
    bounds.push_back({{"class", to_string(rep.estimates[i].class_tag)}, {"values", rep.bounds[i]}});
  json rel = {{"available", rep.relation.available}};
  if (rep.relation.available) {
    rel["mu_full"] = rep.relation.mu_full;
    rel["mu_parts_max"] = rep.relation.mu_parts_max;
    rel["gap"] = rep.relation.gap;
    rel["theta_gap"] = rep.relation.theta_gap;
    rel["holds"] = rep.relation.holds;
    rel["parts"] = rep.relation.parts;
  }
  json report = {{"flow", flow_json(flow)},
                 {"estimates", ests},
                 {"bound_times", rep.bound_times},
                 {"ress_lower_bounds", bounds},
                 {"max_relation", rel},
                 {"warnings", rep.warnings}};
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";

  outs.write("exponents.json", dump(report));
  outs.write("exponents.csv", csv.str());
  std::ostringstream gp;
  gp << gnuplot_header("sup log|b| over admissible samples: " + flow.name(), "t", "theta(t)", false);
  gp << "plot ";
  for (std::size_t i = 0; i < rep.estimates.size(); ++i) {
    const std::string tag = to_string(rep.estimates[i].class_tag);
    gp << (i ? ", \\\n     " : "") << "'exponents.csv' using ($1 eq '" << tag
       << "' ? $2 : 1/0):3 with linespoints title '" << tag << "'";
  }
  gp << "\n";
  outs.write("exponents.gp", gp.str());
}

void cmd_trajectory(const RunConfig& cfg, const SteadyFlow& flow, OutputSet& outs, std::ostream& out) {
  AdmissibleSample s;
  s.x0 = to_vec(cfg.trajectory.x0);
  s.xi0 = to_vec(cfg.trajectory.xi0);
  s.b0 = to_vec(cfg.trajectory.b0);
  if (s.xi0.norm() == 0.0) throw ConfigError("trajectory.xi0: must be nonzero");
  if (std::abs(s.xi0.dot(s.b0)) > 1e-12 * s.xi0.norm() * s.b0.norm())
    throw ConfigError("trajectory.b0: must be orthogonal to trajectory.xi0");
  auto states = integrate_bas_trajectory(flow, s, cfg.trajectory.t_final, cfg.step, cfg.trajectory.every);

  const int d = flow.dim();
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < d; ++i) csv << ",x" << i;
  for (int i = 0; i < d; ++i) csv << ",eta" << i;
  csv << ",rho";
  for (int i = 0; i < d; ++i) csv << ",c" << i;
  csv << ",beta,c_dot_eta\n";
  double max_dot = 0.0;
  for (const auto& st : states) {
    csv << fmt(st.t);
    for (int i = 0; i < d; ++i) csv << "," << fmt(st.x[i]);
    for (int i = 0; i < d; ++i) csv << "," << fmt(st.eta[i]);
    csv << "," << fmt(st.rho);
    for (int i = 0; i < d; ++i) csv << "," << fmt(st.c[i]);
    const double dot = st.c.dot(st.eta);
    max_dot = std::max(max_dot, std::abs(dot));
    csv << "," << fmt(st.beta) << "," << fmt(dot) << "\n";
  }
  const BasState& last = states.back();
  json rep = {{"flow", flow_json(flow)},
              {"x0", cfg.trajectory.x0},
              {"xi0", cfg.trajectory.xi0},
              {"b0", cfg.trajectory.b0},
              {"t_final", last.t},
              {"step", cfg.step},
              {"x_final", vec_json(last.x)},
              {"log_xi_final", last.rho},
              {"log_b_final", last.beta},
              {"max_abs_c_dot_eta", max_dot},
              {"points", states.size()}};
  out << "log|b(" << fmt(last.t) << ")| = " << fmt(last.beta) << "\n";
  outs.write("trajectory.json", dump(rep));
  outs.write("trajectory.csv", csv.str());
  const int beta_col = 3 * d + 3;
  outs.write("trajectory.gp", gnuplot_header("log|b| and log|xi| along the trajectory", "t", "log", false) +
                                  "plot 'trajectory.csv' using 1:" + std::to_string(beta_col) +
                                  " with lines title 'log|b|', '' using 1:" + std::to_string(2 * d + 2) +
                                  " with lines title 'log|xi|'\n");
}

json sweep_json(const Sweep& s) {
  json recs = json::array();
  for (const auto& r : s.records)
    recs.push_back({{"params", r.params}, {"norms", r.norms}, {"warnings", r.warnings}});
  return {{"kind", s.kind},   {"flow", s.flow},   {"label", s.label},
          {"variable", s.variable}, {"param", s.param}, {"value", s.value},
          {"slope", s.fit.slope}, {"intercept", s.fit.intercept}, {"max_rel_dev", s.fit.max_rel_dev},
          {"records", recs}};
}

void cmd_lemmas(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
  const int N = cfg.resolution.value_or(256);
  std::vector<Sweep> sweeps;
  for (const auto& k : cfg.lemmas.kinds) {
    switch (parse_lemma_kind(k)) {
      case LemmaKind::SolProj: {
        auto v = solproj_sweeps(cfg.seed);
        sweeps.insert(sweeps.end(), v.begin(), v.end());
        break;
      }
      case LemmaKind::InImage3d:
        sweeps.push_back(inimage3d_sweep());
        break;
      case LemmaKind::Image2d:
        sweeps.push_back(image2d_sweep(N));
        break;
      case LemmaKind::Kernel2d: {
        auto v = kernel2d_sweeps(N, cfg.lemmas.K);
        sweeps.insert(sweeps.end(), v.begin(), v.end());
        break;
      }
    }
  }
  json arr = json::array();
  std::ostringstream csv;
  csv << "sweep,variable,param,value\n";
  for (const auto& s : sweeps) {
    arr.push_back(sweep_json(s));
    for (std::size_t i = 0; i < s.param.size(); ++i)
      csv << s.label << "," << s.variable << "," << fmt(s.param[i]) << "," << fmt(s.value[i]) << "\n";
    out << std::left << std::setw(30) << s.label << " slope in " << s.variable << " = " << fmt(s.fit.slope)
        << "\n";
  }
  outs.write("lemmas.json", dump({{"resolution", N}, {"K", cfg.lemmas.K}, {"sweeps", arr}}));
  outs.write("lemmas.csv", csv.str());
  std::ostringstream gp;
  gp << gnuplot_header("residual scaling", "parameter", "residual", true) << "plot ";
  for (std::size_t i = 0; i < sweeps.size(); ++i)
    gp << (i ? ", \\\n     " : "") << "'lemmas.csv' using ($1 eq '" << sweeps[i].label
       << "' ? $3 : 1/0):4 with linespoints title '" << sweeps[i].label << "'";
  gp << "\n";
  outs.write("lemmas.gp", gp.str());
}

void cmd_oracle(const RunConfig& cfg, const SteadyFlow& flow, OutputSet& outs, std::ostream& out) {
  const int N = cfg.resolution.value_or(256);
  const double dt = cfg.dt.value_or(0.4 * (kTwoPi / N) / std::max(max_speed(flow, N), 1e-12));
  json runs = json::array();
  std::ostringstream csv;
  csv << "delta,t,oracle_norm,predicted_norm,relative_gap\n";
  for (double delta : cfg.oracle.deltas) {
    PacketSpec spec;
    spec.h0 = Envelope{};
    spec.x0 = to_vec(cfg.oracle.x0);
    spec.xi0 = to_vec(cfg.oracle.xi0);
    spec.zeta = cfg.oracle.zeta;
    spec.delta = delta;
    GrowthComparison g = compare_growth(flow, spec, cfg.oracle.t_grid, N, dt, cfg.step);
    for (std::size_t j = 0; j < g.t.size(); ++j)
      csv << fmt(delta) << "," << fmt(g.t[j]) << "," << fmt(g.oracle_norm[j]) << "," << fmt(g.predicted_norm[j])
          << "," << fmt(g.relative_gap[j]) << "\n";
    runs.push_back({{"delta", delta},
                    {"t", g.t},
                    {"oracle_norm", g.oracle_norm},
                    {"predicted_norm", g.predicted_norm},
                    {"relative_gap", g.relative_gap},
                    {"max_gap", g.max_gap}});
    out << "delta = " << fmt(delta) << "  max relative gap = " << fmt(g.max_gap) << "\n";
  }
  outs.write("oracle.json", dump({{"flow", flow_json(flow)},
                                  {"resolution", N},
                                  {"dt", dt},
                                  {"x0", cfg.oracle.x0},
                                  {"xi0", cfg.oracle.xi0},
                                  {"zeta", cfg.oracle.zeta},
                                  {"runs", runs}}));
  outs.write("oracle.csv", csv.str());
  std::ostringstream gp;
  gp << gnuplot_header("linearized evolution vs predicted wavepacket", "t", "L2 norm", false)
     << "set logscale y\nplot ";
  for (std::size_t i = 0; i < cfg.oracle.deltas.size(); ++i) {
    const std::string d = fmt(cfg.oracle.deltas[i]);
    gp << (i ? ", \\\n     " : "") << "'oracle.csv' using ($1 == " << d << " ? $2 : 1/0):3 with lines title 'oracle "
       << d << "', '' using ($1 == " << d << " ? $2 : 1/0):4 with points title 'predicted " << d << "'";
  }
  gp << "\n";
  outs.write("oracle.gp", gp.str());
}

void cmd_verify_flow(const RunConfig& cfg, const SteadyFlow& flow, OutputSet& outs, std::ostream& out) {
  const int N = cfg.resolution.value_or(64);
  SteadyEulerResidual r = verify_steady_euler(flow, N);
  json stag = json::array();
  for (const auto& p : flow.model().stagnation_points())
    stag.push_back({{"x", vec_json(p.x)}, {"xi", vec_json(p.xi)}, {"b", vec_json(p.b)}, {"lambda", p.lambda}});
  out << "div residual = " << fmt(r.div_residual) << "  euler residual = " << fmt(r.euler_residual) << "\n";
  outs.write("verify_flow.json", dump({{"flow", flow_json(flow)},
                                       {"resolution", N},
                                       {"div_residual", r.div_residual},
                                       {"euler_residual", r.euler_residual},
                                       {"omega_support", flow.model().omega_support().describe()},
                                       {"grad_omega_support", flow.model().grad_omega_support().describe()},
                                       {"stagnation_points", stag}}));
}

}  // namespace

void run(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const SteadyFlow flow = parse_flow_spec(cfg.flow);
  OutputSet outs(cfg.out);

  if (cfg.command == "catalog") cmd_catalog(outs, out);
  else if (cfg.command == "exponents") cmd_exponents(cfg, flow, outs, out);
  else if (cfg.command == "trajectory") cmd_trajectory(cfg, flow, outs, out);
  else if (cfg.command == "verify-lemmas") cmd_lemmas(cfg, outs, out);
  else if (cfg.command == "oracle-compare") cmd_oracle(cfg, flow, outs, out);
  else if (cfg.command == "verify-flow") cmd_verify_flow(cfg, flow, outs, out);

  const json canon = cfg.to_json();
  json files = json::array();
  for (const auto& f : outs.files()) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  json manifest = {{"config", canon},
                   {"config_sha256", sha256_hex(canon.dump())},
                   {"versions", library_versions()},
                   {"outputs", files}};
  // Written last and not listed in itself.
  OutputSet(cfg.out).write("manifest.json", dump(manifest));
}

int run_guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    run(cfg, out);
    return kExitOk;
  } catch (const NumericalBlowup& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace fluidex::app
