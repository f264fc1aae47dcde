// Copyright 2026 the arep authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// arep command line: simulation, estimation, mixing / inequality /
// robustness experiments for the conditional-heteroscedasticity toolkit.
// Every run resolves its configuration (flags over config file over
// defaults), embeds the resolved config and its content hash in the outputs,
// and derives all randomness from the explicit --seed.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arep/arep.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace arep;

namespace {

// ------------------------------------------------------------ small parsers

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_lag_list(const std::string& s) {
  std::vector<int> out;
  auto dash = s.find('-');
  if (dash != std::string::npos && s.find(',') == std::string::npos) {
    int lo = std::stoi(s.substr(0, dash)), hi = std::stoi(s.substr(dash + 1));
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::pair<std::string, double> parse_tagged(const std::string& s, double fallback) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return {s, fallback};
  return {s.substr(0, colon), std::stod(s.substr(colon + 1))};
}

InnovationSpec make_innovation(const std::string& name, double nu, double half_width,
                               double beta0) {
  if (name == "standard-normal") return standard_normal(beta0);
  if (name == "student-t") return student_t(nu, beta0);
  if (name == "uniform-symmetric") return uniform_symmetric(half_width, beta0);
  throw ConfigError("unknown innovation law: " + name);
}

WeightFn make_phi(const std::string& s) {
  auto [name, value] = parse_tagged(s, kNaN);
  if (name == "constant") return constant_phi(std::isnan(value) ? 1.0 : value);
  if (name == "clipped-e") return clipped_e_phi(std::isnan(value) ? 10.0 : value);
  if (name == "e-ratio") return e_ratio_phi();
  throw ConfigError("unknown weight function: " + s);
}

PsiFn make_psi(const std::string& s) {
  auto [name, value] = parse_tagged(s, kNaN);
  if (name == "identity") return PsiFn::identity();
  if (name == "sign") return PsiFn::sign();
  if (name == "huber") return PsiFn::huber(std::isnan(value) ? 1.345 : value);
  if (name == "clipped-square") return PsiFn::clipped_square(std::isnan(value) ? 2.0 : value);
  throw ConfigError("unknown score function: " + s);
}

OutlierLaw make_law(const std::string& s) {
  auto [name, value] = parse_tagged(s, 100.0);
  if (name == "two-point") return OutlierLaw::two_point(value);
  if (name == "point-mass") return OutlierLaw::point_mass(value);
  throw ConfigError("unknown outlier law: " + s);
}

// ------------------------------------------------------------ config overlay

struct Overlay {
  json cfg;

  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    try {
      cfg = json::parse(is);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
  }

  template <typename T>
  void maybe(const CLI::Option* opt, T& var, const char* key) const {
    if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
    if (cfg.contains(key)) {
      try {
        var = cfg.at(key).get<T>();
      } catch (const std::exception&) {
        throw ConfigError(std::string("config field has wrong type: ") + key);
      }
    }
  }
};

// -------------------------------------------------------------- output layer

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write: " + path);
  os << content;
}

std::string hash_of(const json& resolved) { return hex64(fnv1a64(resolved.dump())); }

void emit_json(const std::string& path, const std::string& sub, const json& resolved,
               json summary) {
  if (path.empty()) return;
  json doc;
  doc["subcommand"] = sub;
  doc["config"] = resolved;
  doc["config_hash"] = hash_of(resolved);
  doc["summary"] = std::move(summary);
  write_text(path, doc.dump(2) + "\n");
}

// Shared model/innovation option block.
struct ModelOpts {
  int p = 1;
  std::string a_str = "0.5";
  double beta_a = 1.0;
  std::string innovation = "standard-normal";
  double nu = 4.0;
  double half_width = 1.0;
  double beta0 = 0.5;

  CLI::Option *o_p = nullptr, *o_a = nullptr, *o_beta_a = nullptr, *o_innov = nullptr,
              *o_nu = nullptr, *o_hw = nullptr, *o_beta0 = nullptr;

  void attach(CLI::App* app) {
    o_p = app->add_option("--p", p, "model order");
    o_a = app->add_option("--a", a_str, "coefficients, comma separated");
    o_beta_a = app->add_option("--beta-a", beta_a, "second-moment floor beta_a (l1 cap 1/beta_a)");
    o_innov = app->add_option("--innovation", innovation,
                              "standard-normal | student-t | uniform-symmetric");
    o_nu = app->add_option("--nu", nu, "student-t degrees of freedom");
    o_hw = app->add_option("--half-width", half_width, "uniform half width");
    o_beta0 = app->add_option("--beta0", beta0, "moment slack beta0");
  }

  void overlay(const Overlay& ov) {
    ov.maybe(o_p, p, "p");
    ov.maybe(o_a, a_str, "a");
    ov.maybe(o_beta_a, beta_a, "beta_a");
    ov.maybe(o_innov, innovation, "innovation");
    ov.maybe(o_nu, nu, "nu");
    ov.maybe(o_hw, half_width, "half_width");
    ov.maybe(o_beta0, beta0, "beta0");
  }

  ArchParams params() const {
    auto coeffs = parse_double_list(a_str);
    if (static_cast<int>(coeffs.size()) != p)
      throw ConfigError("--a must supply exactly p coefficients");
    return ArchParams(coeffs);
  }
  ParamDomain domain() const {
    ParamDomain d;
    d.beta_a = beta_a;
    return d;
  }
  InnovationSpec spec() const { return make_innovation(innovation, nu, half_width, beta0); }

  json resolved() const {
    json j;
    j["p"] = p;
    j["a"] = a_str;
    j["beta_a"] = beta_a;
    j["innovation"] = innovation;
    if (innovation == "student-t") j["nu"] = nu;
    if (innovation == "uniform-symmetric") j["half_width"] = half_width;
    j["beta0"] = beta0;
    return j;
  }
};

// ----------------------------------------------------------------- simulate

int run_simulate(const ModelOpts& model, long n, long burn_in, std::uint64_t seed,
                 const std::string& out_csv, const std::string& out_json) {
  auto params = model.params();
  auto spec = model.spec();
  long bi = burn_in >= 0 ? burn_in : default_burn_in(params.p());
  Path path = simulate_path(params, spec, n, bi, seed);

  json resolved = model.resolved();
  resolved["n"] = n;
  resolved["burn_in"] = bi;
  resolved["seed"] = seed;

  std::ostringstream os;
  os << "# config_hash=" << hash_of(resolved) << "\n";
  write_path_csv(path, os);
  write_text(out_csv, os.str());

  double m2 = 0.0;
  for (long t = 1; t <= path.n(); ++t) m2 += path.y(t) * path.y(t);
  json summary;
  summary["rows"] = path.n() + path.p;
  summary["sample_second_moment"] = path.n() > 0 ? m2 / path.n() : 0.0;
  summary["csv"] = out_csv;
  emit_json(out_json, "simulate", resolved, summary);
  return 0;
}

// ----------------------------------------------------------------- estimate

int run_estimate(const ModelOpts& model, const std::string& input, long n,
                 std::uint64_t sim_seed, const std::string& method, const std::string& phi_s,
                 const std::string& psi_s, int grid_m, int norm_power,
                 const EstimateOptions& opts_in, const std::string& out_csv,
                 const std::string& out_json, const std::string& trace_path) {
  auto spec = model.spec();
  auto domain = model.domain();
  Path path;
  if (!input.empty()) {
    std::ifstream is(input);
    if (!is) throw ConfigError("cannot open input path CSV: " + input);
    path = read_path_csv(is);
  } else {
    path = simulate_path(model.params(), spec, n, sim_seed);
  }
  WeightFn phi = make_phi(phi_s);
  PsiFn psi = make_psi(psi_s);
  XGrid grid = quantile_grid(spec, grid_m);
  EstimateOptions opts = opts_in;
  opts.norm_power = norm_power;
  opts.keep_trace = !trace_path.empty();

  EstimateResult res = method == "md" ? estimate_md(path, phi, grid, domain, opts)
                                      : estimate_gm(path, phi, psi, domain, opts);

  json resolved = model.resolved();
  resolved["method"] = method;
  resolved["phi"] = phi_s;
  resolved["psi"] = psi_s;
  resolved["grid_m"] = grid_m;
  resolved["norm_power"] = norm_power;
  resolved["restarts"] = opts.restarts;
  resolved["max_evals"] = opts.max_evals_per_restart;
  resolved["seed"] = opts.seed;
  if (!input.empty())
    resolved["input"] = input;
  else {
    resolved["n"] = n;
    resolved["sim_seed"] = sim_seed;
  }

  std::ostringstream os;
  CsvWriter csv(os);
  csv.comment("config_hash=" + hash_of(resolved));
  std::vector<std::string> cols{"method", "phi", "psi"};
  for (int d = 0; d < path.p; ++d) cols.push_back("theta_" + std::to_string(d + 1));
  for (const char* c : {"objective", "n_evals", "restarts", "converged", "non_identified"})
    cols.push_back(c);
  csv.header(cols);
  std::vector<CsvField> row{method, phi_s, psi_s};
  for (int d = 0; d < path.p; ++d) row.push_back(res.theta_hat.a[d]);
  row.push_back(res.objective_value);
  row.push_back(res.n_evals);
  row.push_back(static_cast<long>(res.restarts_used));
  row.push_back(static_cast<long>(res.converged));
  row.push_back(static_cast<long>(res.non_identified));
  csv.row(row);
  write_text(out_csv, os.str());

  if (!trace_path.empty()) {
    std::ostringstream ts;
    CsvWriter tcsv(ts);
    std::vector<std::string> tcols;
    for (int d = 0; d < path.p; ++d) tcols.push_back("theta_" + std::to_string(d + 1));
    tcols.push_back("objective");
    tcsv.header(tcols);
    for (const auto& [x, v] : res.trace) {
      std::vector<CsvField> trow;
      for (double xd : x) trow.push_back(xd);
      trow.push_back(v);
      tcsv.row(trow);
    }
    write_text(trace_path, ts.str());
  }

  json summary;
  summary["theta_hat"] = res.theta_hat.a;
  summary["objective"] = res.objective_value;
  summary["n_evals"] = res.n_evals;
  summary["converged"] = res.converged;
  summary["non_identified"] = res.non_identified;
  summary["csv"] = out_csv;
  emit_json(out_json, "estimate", resolved, summary);
  return 0;
}

// ------------------------------------------------------------------- mixing

int run_mixing(const ModelOpts& model, const std::string& ks_s, long path_len, int reps,
               int bins, int past_m, std::uint64_t seed, const std::string& out_csv,
               const std::string& out_json) {
  auto params = model.params();
  auto spec = model.spec();
  auto ks = parse_lag_list(ks_s);
  MixingReport rep = mixing_decay_report(params, spec, ks, path_len, reps, bins, past_m, seed);

  json resolved = model.resolved();
  resolved["ks"] = ks_s;
  resolved["path_len"] = path_len;
  resolved["reps"] = reps;
  resolved["bins"] = bins;
  resolved["m"] = past_m;
  resolved["seed"] = seed;

  std::ostringstream os;
  CsvWriter csv(os);
  csv.comment("config_hash=" + hash_of(resolved));
  csv.comment("alpha_hat is a finite-family lower estimate; fit constants C,gamma describe");
  csv.comment("the decay form only (theoretical constants are out of scope)");
  csv.header({"k", "alpha_hat", "se", "noise_floor"});
  for (std::size_t i = 0; i < rep.ks.size(); ++i)
    csv.row({static_cast<long>(rep.ks[i]), rep.alpha_hat[i], rep.alpha_se[i],
             rep.noise_floor[i]});
  write_text(out_csv, os.str());

  json summary;
  summary["C"] = rep.C;
  summary["gamma"] = rep.all_below_floor ? json("inf") : json(rep.gamma);
  summary["r2"] = rep.r2;
  summary["all_below_noise_floor"] = rep.all_below_floor;
  summary["csv"] = out_csv;
  emit_json(out_json, "mixing", resolved, summary);
  return 0;
}

// ------------------------------------------------------------------ maxineq

int run_maxineq(const ModelOpts& model, const std::string& lemma, const std::string& law_s,
                long n, double alpha, long reps, std::uint64_t seed, bool exact,
                const std::string& u_s, const std::string& f_s, double x, int bins, double d,
                double n_ratio, long calib_len, const std::string& out_csv,
                const std::string& out_json) {
  json resolved = model.resolved();
  resolved["lemma"] = lemma;
  resolved["n"] = n;
  resolved["reps"] = reps;
  resolved["seed"] = seed;

  IneqReport rep;
  json extra;
  if (lemma == "m4" || lemma == "s4") {
    auto [lname, lscale] = parse_tagged(law_s, 1.0);
    IncrementLaw law = lname == "gaussian" ? IncrementLaw::gaussian(lscale)
                                           : IncrementLaw::rademacher(lscale);
    double u = u_s == "auto" ? calibrate_uniform_u(law, n, alpha) : std::stod(u_s);
    std::vector<double> us(static_cast<std::size_t>(n), u);
    resolved["law"] = law.name;
    resolved["alpha"] = alpha;
    resolved["u"] = u;
    resolved["exact"] = exact;
    rep = lemma == "m4" ? verify_m4_lemma(law, us, n, alpha, reps, seed, exact)
                        : verify_s4_corollary(law, us, n, alpha, reps, seed, exact);
  } else if (lemma == "rosenthal") {
    auto spec = model.spec();
    auto params = model.params();
    WeightFn wf = make_phi(f_s);
    ArchParams at = params;
    WindowFn f = [wf, at](std::span<const double> w) {
      std::vector<double> out(at.p());
      wf(w, at, out);
      return out[0];
    };
    resolved["f"] = f_s;
    resolved["x"] = x;
    rep = verify_rosenthal(params, spec, f, f_s, x, n, reps, seed);
  } else if (lemma == "partition") {
    auto spec = model.spec();
    auto params = model.params();
    WeightFn wf = make_phi(f_s);
    ArchParams at = params;
    WindowFn f = [wf, at](std::span<const double> w) {
      std::vector<double> out(at.p());
      wf(w, at, out);
      return out[0];
    };
    resolved["f"] = f_s;
    resolved["bins"] = bins;
    resolved["d"] = d;
    resolved["n_ratio"] = n_ratio;
    resolved["calib_len"] = calib_len;
    PartitionReport prep = verify_partition_sup_bound(params, spec, f, f_s, bins, n, d,
                                                      n_ratio, reps, seed, calib_len);
    rep = prep.ineq;
    extra["bins_used"] = prep.bins_used;
    extra["n_ratio_realized"] = prep.n_ratio_realized;
    extra["l_constant"] = prep.l_constant;
    extra["r_tau"] = prep.r_tau;
  } else {
    throw ConfigError("unknown lemma: " + lemma);
  }

  std::ostringstream os;
  CsvWriter csv(os);
  csv.comment("config_hash=" + hash_of(resolved));
  csv.header({"statistic", "estimate", "se", "bound", "margin", "reps", "exact", "passed"});
  csv.row({rep.statistic_name, rep.mc_estimate, rep.mc_se, rep.bound_value, rep.margin,
           rep.reps, static_cast<long>(rep.exact), static_cast<long>(rep.passed)});
  write_text(out_csv, os.str());

  json summary;
  summary["statistic"] = rep.statistic_name;
  summary["estimate"] = rep.mc_estimate;
  summary["se"] = rep.mc_se;
  summary["bound"] = rep.bound_value;
  summary["margin"] = rep.margin;
  summary["passed"] = rep.passed;
  if (!extra.is_null()) summary["partition"] = extra;
  summary["csv"] = out_csv;
  emit_json(out_json, "maxineq", resolved, summary);
  return rep.passed ? 0 : 2;
}

// --------------------------------------------------------------- robustness

int run_robustness(const ModelOpts& model, const std::string& gammas_s,
                   const std::string& laws_s, long n, long reps, const std::string& methods_s,
                   const std::string& phi_b_s, const std::string& phi_u_s,
                   const std::string& psi_s, int norm_power, int restarts,
                   std::uint64_t seed, const std::string& out_csv,
                   const std::string& out_json) {
  auto params = model.params();
  auto spec = model.spec();
  RobustnessPlan plan;
  plan.gammas = parse_double_list(gammas_s);
  plan.laws.clear();
  {
    std::stringstream ss(laws_s);
    std::string tok;
    while (std::getline(ss, tok, ';'))
      if (!tok.empty()) plan.laws.push_back(make_law(tok));
  }
  plan.n = n;
  plan.reps = reps;
  plan.run_md = methods_s.find("md") != std::string::npos;
  plan.run_gm = methods_s.find("gm") != std::string::npos;
  plan.psi = make_psi(psi_s);
  plan.opts.restarts = restarts;
  plan.opts.norm_power = norm_power;

  WeightFn phi_b = make_phi(phi_b_s);
  WeightFn phi_u = make_phi(phi_u_s);
  BiasTable table = robustness_experiment(params, spec, phi_b, phi_u, plan, seed);

  json resolved = model.resolved();
  resolved["gammas"] = gammas_s;
  resolved["laws"] = laws_s;
  resolved["n"] = n;
  resolved["reps"] = reps;
  resolved["methods"] = methods_s;
  resolved["phi_bounded"] = phi_b_s;
  resolved["phi_unbounded"] = phi_u_s;
  resolved["psi"] = psi_s;
  resolved["norm_power"] = norm_power;
  resolved["restarts"] = restarts;
  resolved["seed"] = seed;

  std::ostringstream os;
  CsvWriter csv(os);
  csv.comment("config_hash=" + hash_of(resolved));
  csv.header({"gamma", "method", "phi_kind", "law", "median_err", "p90_err", "reps",
              "failed"});
  for (const auto& c : table.cells)
    csv.row({c.gamma, c.method, c.phi_kind, c.law, c.median_err, c.p90_err, c.reps, c.failed});
  write_text(out_csv, os.str());

  json summary;
  summary["cells"] = table.cells.size();
  long positive = std::count_if(plan.gammas.begin(), plan.gammas.end(),
                                [](double g) { return g > 0; });
  bool has_zero =
      std::find(plan.gammas.begin(), plan.gammas.end(), 0.0) != plan.gammas.end();
  if (has_zero && positive >= 2) {
    std::vector<std::string> law_names;
    for (const auto& l : plan.laws) law_names.push_back(l.name);
    json inf;
    for (const char* method : {"md", "gm"}) {
      if ((method[0] == 'm' && !plan.run_md) || (method[0] == 'g' && !plan.run_gm)) continue;
      InfluenceSummary is = influence_summary(table, method, phi_b.name, law_names);
      json entries = json::array();
      for (const auto& e : is.entries) {
        json je;
        je["law"] = e.law;
        je["influence"] = e.influence;
        je["norm"] = e.norm;
        je["gamma_used"] = e.gamma_used;
        entries.push_back(je);
      }
      inf[method] = {{"entries", entries}, {"ges", is.ges}};
    }
    summary["influence"] = inf;
  }
  summary["csv"] = out_csv;
  emit_json(out_json, "robustness", resolved, summary);
  return 0;
}

// -------------------------------------------------------------------- check

int run_check(const ModelOpts& model, int grid_m, const std::string& out_json) {
  std::vector<std::string> diagnostics;
  ArchParams params;
  ParamDomain domain = model.domain();
  try {
    params = model.params();
    for (int i = 0; i < params.p(); ++i)
      if (params.a[i] < 0.0)
        diagnostics.push_back("theta violation: a_" + std::to_string(i + 1) + " < 0");
    if (params.l1() > domain.l1_cap())
      diagnostics.push_back("theta violation: ||a||_1 exceeds 1/beta_a");
  } catch (const ConfigError& e) {
    diagnostics.push_back(e.what());
  }
  json cond_json;
  try {
    auto spec = model.spec();
    ConditionReport rep = check_conditions(spec, domain);
    double e2 = spec.moments.second;
    if (params.p() > 0 && e2 * params.l1() >= 1.0)
      diagnostics.push_back("Condition 1 fails: E eps^2 * ||a||_1 >= 1");
    if (!rep.condition1())
      diagnostics.push_back("Condition 1 fails on the domain (product " +
                            format_double(rep.stationarity_product) + ")");
    if (!rep.condition3()) diagnostics.push_back("Condition 3 fails (density regularity)");
    if (!rep.condition5())
      diagnostics.push_back("Condition 5 fails: E|eps|^{8+beta0} is infinite");
    cond_json["zero_mean"] = rep.zero_mean;
    cond_json["stationarity_product"] = rep.stationarity_product;
    cond_json["condition1"] = rep.condition1();
    cond_json["condition3"] = rep.condition3();
    cond_json["condition5"] = rep.condition5();
    cond_json["high_moment"] =
        std::isfinite(rep.high_moment) ? json(rep.high_moment) : json("inf");
  } catch (const Error& e) {
    diagnostics.push_back(e.what());
  }
  if (grid_m < 1) diagnostics.push_back("empty x-grid (grid_m < 1)");

  json resolved = model.resolved();
  resolved["grid_m"] = grid_m;
  for (const auto& d : diagnostics) std::cout << "diagnostic: " << d << "\n";
  if (diagnostics.empty()) std::cout << "all checks passed\n";

  json summary;
  summary["diagnostics"] = diagnostics;
  summary["conditions"] = cond_json;
  emit_json(out_json, "check", resolved, summary);
  return diagnostics.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arep: ARCH(p) residual-process simulation, estimation and verification"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override its fields)")
      ->expected(1);

  // ---- simulate
  auto* sim = app.add_subcommand("simulate", "simulate a stationary path to CSV");
  ModelOpts sim_model;
  sim_model.attach(sim);
  long sim_n = 1000, sim_burn = -1;
  std::uint64_t sim_seed = 1;
  std::string sim_csv = "simulate.csv", sim_json;
  auto* o_sim_n = sim->add_option("--n", sim_n, "sample size");
  auto* o_sim_burn = sim->add_option("--burn-in", sim_burn, "burn-in (default 2000+50p)");
  auto* o_sim_seed = sim->add_option("--seed", sim_seed, "rng seed");
  auto* o_sim_csv = sim->add_option("--out-csv", sim_csv, "output CSV");
  auto* o_sim_json = sim->add_option("--out-json", sim_json, "output JSON summary");

  // ---- estimate
  auto* est = app.add_subcommand("estimate", "fit the MD or GM estimator");
  ModelOpts est_model;
  est_model.attach(est);
  std::string est_input, est_method = "md", est_phi = "clipped-e:10", est_psi = "identity";
  long est_n = 4000;
  std::uint64_t est_sim_seed = 1;
  int est_grid_m = 64, est_norm_power = 2;
  EstimateOptions est_opts;
  std::string est_csv = "estimate.csv", est_json, est_trace;
  auto* o_est_input = est->add_option("--input", est_input, "path CSV (else simulate)");
  auto* o_est_n = est->add_option("--n", est_n, "sample size when simulating");
  auto* o_est_sim_seed = est->add_option("--sim-seed", est_sim_seed, "simulation seed");
  auto* o_est_method = est->add_option("--method", est_method, "md | gm");
  auto* o_est_phi = est->add_option("--phi", est_phi, "constant:c | clipped-e:L | e-ratio");
  auto* o_est_psi =
      est->add_option("--psi", est_psi, "identity | sign | huber:c | clipped-square:c");
  auto* o_est_grid = est->add_option("--grid-m", est_grid_m, "x-grid size");
  auto* o_est_np = est->add_option("--norm-power", est_norm_power, "1 | 2");
  auto* o_est_restarts = est->add_option("--restarts", est_opts.restarts, "multistart count");
  auto* o_est_evals =
      est->add_option("--max-evals", est_opts.max_evals_per_restart, "eval budget per restart");
  auto* o_est_seed = est->add_option("--seed", est_opts.seed, "search seed");
  auto* o_est_csv = est->add_option("--out-csv", est_csv, "output CSV");
  auto* o_est_json = est->add_option("--out-json", est_json, "output JSON summary");
  auto* o_est_trace = est->add_option("--trace", est_trace, "per-restart trace CSV");

  // ---- mixing
  auto* mix = app.add_subcommand("mixing", "empirical strong-mixing decay report");
  ModelOpts mix_model;
  mix_model.attach(mix);
  std::string mix_ks = "1-12";
  long mix_len = 200000;
  int mix_reps = 20, mix_bins = 4, mix_m = 2;
  std::uint64_t mix_seed = 1;
  std::string mix_csv = "mixing.csv", mix_json;
  auto* o_mix_ks = mix->add_option("--ks", mix_ks, "lags, e.g. 1-12 or 1,2,4");
  auto* o_mix_len = mix->add_option("--path-len", mix_len, "path length");
  auto* o_mix_reps = mix->add_option("--reps", mix_reps, "replicate paths");
  auto* o_mix_bins = mix->add_option("--bins", mix_bins, "quantile bins per coordinate");
  auto* o_mix_m = mix->add_option("--m", mix_m, "past window size");
  auto* o_mix_seed = mix->add_option("--seed", mix_seed, "rng seed");
  auto* o_mix_csv = mix->add_option("--out-csv", mix_csv, "output CSV");
  auto* o_mix_json = mix->add_option("--out-json", mix_json, "output JSON summary");

  // ---- maxineq
  auto* ineq = app.add_subcommand("maxineq", "verify a maximal/moment inequality");
  ModelOpts ineq_model;
  ineq_model.attach(ineq);
  std::string ineq_lemma = "m4", ineq_law = "rademacher:1", ineq_u = "auto",
              ineq_f = "constant:1";
  long ineq_n = 1024, ineq_reps = 10000, ineq_calib = 100000;
  double ineq_alpha = 1.5, ineq_x = 0.0, ineq_d = 1.0, ineq_nratio = 16.0;
  int ineq_bins = 8;
  bool ineq_exact = false;
  std::uint64_t ineq_seed = 1;
  std::string ineq_csv = "maxineq.csv", ineq_json;
  auto* o_ineq_lemma =
      ineq->add_option("--lemma", ineq_lemma, "m4 | s4 | rosenthal | partition");
  auto* o_ineq_law = ineq->add_option("--law", ineq_law, "rademacher:c | gaussian:c");
  auto* o_ineq_n = ineq->add_option("--n", ineq_n, "partial-sum / sample length");
  auto* o_ineq_alpha = ineq->add_option("--alpha", ineq_alpha, "exponent alpha > 1");
  auto* o_ineq_reps = ineq->add_option("--reps", ineq_reps, "Monte-Carlo replicates");
  auto* o_ineq_exact = ineq->add_flag("--exact", ineq_exact, "exhaustive enumeration (n<=20)");
  auto* o_ineq_u = ineq->add_option("--u", ineq_u, "uniform weight or 'auto'");
  auto* o_ineq_f = ineq->add_option("--f", ineq_f, "weight for rosenthal/partition");
  auto* o_ineq_x = ineq->add_option("--x", ineq_x, "threshold x for rosenthal");
  auto* o_ineq_bins = ineq->add_option("--bins", ineq_bins, "partition magnitude bins");
  auto* o_ineq_d = ineq->add_option("--d", ineq_d, "partition exponent d in [1,2)");
  auto* o_ineq_nr = ineq->add_option("--n-ratio", ineq_nratio, "partition sup/inf cap N");
  auto* o_ineq_calib = ineq->add_option("--calib-len", ineq_calib, "calibration sample");
  auto* o_ineq_seed = ineq->add_option("--seed", ineq_seed, "rng seed");
  auto* o_ineq_csv = ineq->add_option("--out-csv", ineq_csv, "output CSV");
  auto* o_ineq_json = ineq->add_option("--out-json", ineq_json, "output JSON summary");

  // ---- robustness
  auto* rob = app.add_subcommand("robustness", "gross-outlier contamination experiment");
  ModelOpts rob_model;
  rob_model.attach(rob);
  std::string rob_gammas = "0,0.01,0.02,0.05", rob_laws = "two-point:100",
              rob_methods = "md", rob_phib = "clipped-e:0.25", rob_phiu = "e-ratio",
              rob_psi = "clipped-square:2";
  long rob_n = 4000, rob_reps = 50;
  int rob_np = 1, rob_restarts = 20;
  std::uint64_t rob_seed = 1;
  std::string rob_csv = "robustness.csv", rob_json;
  auto* o_rob_gammas = rob->add_option("--gammas", rob_gammas, "contamination levels");
  auto* o_rob_laws =
      rob->add_option("--laws", rob_laws, "outlier laws, ';'-separated two-point:c/point-mass:c");
  auto* o_rob_n = rob->add_option("--n", rob_n, "sample size");
  auto* o_rob_reps = rob->add_option("--reps", rob_reps, "replicates per cell");
  auto* o_rob_methods = rob->add_option("--methods", rob_methods, "md,gm");
  auto* o_rob_phib = rob->add_option("--phi-bounded", rob_phib, "bounded weight arm");
  auto* o_rob_phiu = rob->add_option("--phi-unbounded", rob_phiu, "unbounded weight arm");
  auto* o_rob_psi = rob->add_option("--psi", rob_psi, "GM score");
  auto* o_rob_np = rob->add_option("--norm-power", rob_np, "MD norm power");
  auto* o_rob_restarts = rob->add_option("--restarts", rob_restarts, "multistart count");
  auto* o_rob_seed = rob->add_option("--seed", rob_seed, "rng seed");
  auto* o_rob_csv = rob->add_option("--out-csv", rob_csv, "output CSV");
  auto* o_rob_json = rob->add_option("--out-json", rob_json, "output JSON summary");

  // ---- check
  auto* chk = app.add_subcommand("check", "validate model/innovation conditions");
  ModelOpts chk_model;
  chk_model.attach(chk);
  int chk_grid_m = 64;
  std::string chk_json;
  auto* o_chk_grid = chk->add_option("--grid-m", chk_grid_m, "x-grid size");
  auto* o_chk_json = chk->add_option("--out-json", chk_json, "output JSON summary");

  CLI11_PARSE(app, argc, argv);

  try {
    Overlay ov;
    ov.load(config_path);

    if (sim->parsed()) {
      sim_model.overlay(ov);
      ov.maybe(o_sim_n, sim_n, "n");
      ov.maybe(o_sim_burn, sim_burn, "burn_in");
      ov.maybe(o_sim_seed, sim_seed, "seed");
      ov.maybe(o_sim_csv, sim_csv, "out_csv");
      ov.maybe(o_sim_json, sim_json, "out_json");
      return run_simulate(sim_model, sim_n, sim_burn, sim_seed, sim_csv, sim_json);
    }
    if (est->parsed()) {
      est_model.overlay(ov);
      ov.maybe(o_est_input, est_input, "input");
      ov.maybe(o_est_n, est_n, "n");
      ov.maybe(o_est_sim_seed, est_sim_seed, "sim_seed");
      ov.maybe(o_est_method, est_method, "method");
      ov.maybe(o_est_phi, est_phi, "phi");
      ov.maybe(o_est_psi, est_psi, "psi");
      ov.maybe(o_est_grid, est_grid_m, "grid_m");
      ov.maybe(o_est_np, est_norm_power, "norm_power");
      ov.maybe(o_est_restarts, est_opts.restarts, "restarts");
      ov.maybe(o_est_evals, est_opts.max_evals_per_restart, "max_evals");
      ov.maybe(o_est_seed, est_opts.seed, "seed");
      ov.maybe(o_est_csv, est_csv, "out_csv");
      ov.maybe(o_est_json, est_json, "out_json");
      ov.maybe(o_est_trace, est_trace, "trace");
      return run_estimate(est_model, est_input, est_n, est_sim_seed, est_method, est_phi,
                          est_psi, est_grid_m, est_norm_power, est_opts, est_csv, est_json,
                          est_trace);
    }
    if (mix->parsed()) {
      mix_model.overlay(ov);
      ov.maybe(o_mix_ks, mix_ks, "ks");
      ov.maybe(o_mix_len, mix_len, "path_len");
      ov.maybe(o_mix_reps, mix_reps, "reps");
      ov.maybe(o_mix_bins, mix_bins, "bins");
      ov.maybe(o_mix_m, mix_m, "m");
      ov.maybe(o_mix_seed, mix_seed, "seed");
      ov.maybe(o_mix_csv, mix_csv, "out_csv");
      ov.maybe(o_mix_json, mix_json, "out_json");
      return run_mixing(mix_model, mix_ks, mix_len, mix_reps, mix_bins, mix_m, mix_seed,
                        mix_csv, mix_json);
    }
    if (ineq->parsed()) {
      ineq_model.overlay(ov);
      ov.maybe(o_ineq_lemma, ineq_lemma, "lemma");
      ov.maybe(o_ineq_law, ineq_law, "law");
      ov.maybe(o_ineq_n, ineq_n, "n");
      ov.maybe(o_ineq_alpha, ineq_alpha, "alpha");
      ov.maybe(o_ineq_reps, ineq_reps, "reps");
      ov.maybe(o_ineq_exact, ineq_exact, "exact");
      ov.maybe(o_ineq_u, ineq_u, "u");
      ov.maybe(o_ineq_f, ineq_f, "f");
      ov.maybe(o_ineq_x, ineq_x, "x");
      ov.maybe(o_ineq_bins, ineq_bins, "bins");
      ov.maybe(o_ineq_d, ineq_d, "d");
      ov.maybe(o_ineq_nr, ineq_nratio, "n_ratio");
      ov.maybe(o_ineq_calib, ineq_calib, "calib_len");
      ov.maybe(o_ineq_seed, ineq_seed, "seed");
      ov.maybe(o_ineq_csv, ineq_csv, "out_csv");
      ov.maybe(o_ineq_json, ineq_json, "out_json");
      return run_maxineq(ineq_model, ineq_lemma, ineq_law, ineq_n, ineq_alpha, ineq_reps,
                         ineq_seed, ineq_exact, ineq_u, ineq_f, ineq_x, ineq_bins, ineq_d,
                         ineq_nratio, ineq_calib, ineq_csv, ineq_json);
    }
    if (rob->parsed()) {
      rob_model.overlay(ov);
      ov.maybe(o_rob_gammas, rob_gammas, "gammas");
      ov.maybe(o_rob_laws, rob_laws, "laws");
      ov.maybe(o_rob_n, rob_n, "n");
      ov.maybe(o_rob_reps, rob_reps, "reps");
      ov.maybe(o_rob_methods, rob_methods, "methods");
      ov.maybe(o_rob_phib, rob_phib, "phi_bounded");
      ov.maybe(o_rob_phiu, rob_phiu, "phi_unbounded");
      ov.maybe(o_rob_psi, rob_psi, "psi");
      ov.maybe(o_rob_np, rob_np, "norm_power");
      ov.maybe(o_rob_restarts, rob_restarts, "restarts");
      ov.maybe(o_rob_seed, rob_seed, "seed");
      ov.maybe(o_rob_csv, rob_csv, "out_csv");
      ov.maybe(o_rob_json, rob_json, "out_json");
      return run_robustness(rob_model, rob_gammas, rob_laws, rob_n, rob_reps, rob_methods,
                            rob_phib, rob_phiu, rob_psi, rob_np, rob_restarts, rob_seed,
                            rob_csv, rob_json);
    }
    if (chk->parsed()) {
      chk_model.overlay(ov);
      ov.maybe(o_chk_grid, chk_grid_m, "grid_m");
      ov.maybe(o_chk_json, chk_json, "out_json");
      return run_check(chk_model, chk_grid_m, chk_json);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
