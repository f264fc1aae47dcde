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

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "arep/arch_model.hpp"
#include "arep/errors.hpp"
#include "arep/estimators.hpp"
#include "arep/rep_engine.hpp"
#include "arep/rng.hpp"
#include "arep/stats.hpp"

namespace arep {

/// Outlier magnitude law xi for the single gross-error contamination scheme.
struct OutlierLaw {
  enum class Kind { point_mass, two_point, user };
  Kind kind = Kind::two_point;
  double c = 100.0;
  std::string name = "two-point(100)";
  std::function<double(RngStream&)> sampler;

  static OutlierLaw point_mass(double c) {
    OutlierLaw l;
    l.kind = Kind::point_mass;
    l.c = c;
    l.name = "point-mass(" + std::to_string(c) + ")";
    l.sampler = [c](RngStream&) { return c; };
    return l;
  }
  static OutlierLaw two_point(double c) {
    OutlierLaw l;
    l.kind = Kind::two_point;
    l.c = c;
    l.name = "two-point(" + std::to_string(c) + ")";
    l.sampler = [c](RngStream& rng) { return rng.next_u64() & 1u ? c : -c; };
    return l;
  }
  static OutlierLaw user(std::string name, std::function<double(RngStream&)> fn) {
    OutlierLaw l;
    l.kind = Kind::user;
    l.name = std::move(name);
    l.sampler = std::move(fn);
    return l;
  }
};

struct ContaminationScheme {
  double gamma = 0.0;
  OutlierLaw law;
};

/// y_t + z_t xi_t with z_t iid Bernoulli(gamma) and xi_t iid from the
/// outlier law, applied to every stored index 1-p..n independently of the
/// path. The returned path keeps the provenance but drops the innovations
/// (they no longer invert the contaminated observations).
inline Path contaminate(const Path& path, const ContaminationScheme& scheme,
                        std::uint64_t seed) {
  Path out = path;
  out.innovations.clear();
  RngStream root(seed);
  RngStream z_rng = root.child(0);
  RngStream xi_rng = root.child(1);
  for (auto& v : out.values) {
    bool hit = z_rng.next_bernoulli(scheme.gamma);
    double xi = scheme.law.sampler(xi_rng);  // drawn unconditionally: the
    if (hit) v += xi;                        // draw count stays z-independent
  }
  return out;
}

// ------------------------------------------------------------ bias experiment

struct BiasCell {
  double gamma = 0.0;
  std::string method;    // "md" | "gm"
  std::string phi_kind;  // weight name
  std::string law;
  double median_err = kNaN;
  double p90_err = kNaN;
  std::vector<double> errors;               // per replicate, NaN if failed
  std::vector<std::vector<double>> thetas;  // per replicate estimates
  std::vector<double> median_theta;
  long reps = 0;
  long failed = 0;
};

struct BiasTable {
  std::vector<BiasCell> cells;

  const BiasCell* find(double gamma, const std::string& method, const std::string& phi_kind,
                       const std::string& law) const {
    for (const auto& c : cells)
      if (c.gamma == gamma && c.method == method && c.phi_kind == phi_kind && c.law == law)
        return &c;
    return nullptr;
  }
};

struct RobustnessPlan {
  std::vector<double> gammas{0.0, 0.01, 0.02, 0.05};
  std::vector<OutlierLaw> laws{OutlierLaw::two_point(100.0)};
  long n = 4000;
  long reps = 50;
  bool run_md = true;
  bool run_gm = false;
  PsiFn psi = PsiFn::clipped_square(2.0);
  EstimateOptions opts;
  int grid_m = 64;
};

/// Error table over the (gamma x law x method x weight) grid. Replicates are
/// paired: every arm of one (gamma, law, rep) cell sees the same contaminated
/// path. Estimator failures mark the cell entry NaN and the experiment
/// continues.
inline BiasTable robustness_experiment(const ArchParams& params, const InnovationSpec& spec,
                                       const WeightFn& phi_bounded,
                                       const WeightFn& phi_unbounded,
                                       const RobustnessPlan& plan, std::uint64_t seed) {
  const ParamDomain domain;  // default beta_a = 1
  XGrid grid = quantile_grid(spec, plan.grid_m);
  BiasTable table;
  RngStream root(seed);
  std::vector<const WeightFn*> phis{&phi_bounded, &phi_unbounded};
  for (std::size_t li = 0; li < plan.laws.size(); ++li) {
    for (std::size_t gi = 0; gi < plan.gammas.size(); ++gi) {
      double gamma = plan.gammas[gi];
      std::vector<BiasCell> cells;
      for (const WeightFn* phi : phis) {
        if (plan.run_md) {
          BiasCell c;
          c.gamma = gamma;
          c.method = "md";
          c.phi_kind = phi->name;
          c.law = plan.laws[li].name;
          cells.push_back(std::move(c));
        }
        if (plan.run_gm) {
          BiasCell c;
          c.gamma = gamma;
          c.method = "gm";
          c.phi_kind = phi->name;
          c.law = plan.laws[li].name;
          cells.push_back(std::move(c));
        }
      }
      for (long r = 0; r < plan.reps; ++r) {
        RngStream rep_rng = root.child(li * 1000003 + gi * 1009 + static_cast<std::uint64_t>(r));
        Path clean = simulate_path(params, spec, plan.n, rep_rng.child(0).next_u64());
        ContaminationScheme scheme{gamma, plan.laws[li]};
        Path dirty = contaminate(clean, scheme, rep_rng.child(1).next_u64());
        std::size_t cell_idx = 0;
        for (const WeightFn* phi : phis) {
          auto record = [&](BiasCell& cell, const char* method) {
            EstimateOptions opts = plan.opts;
            opts.seed = rep_rng.child(2 + cell_idx).next_u64();
            try {
              EstimateResult res = method[0] == 'm'
                                       ? estimate_md(dirty, *phi, grid, domain, opts)
                                       : estimate_gm(dirty, *phi, plan.psi, domain, opts);
              cell.errors.push_back(l2_dist(res.theta_hat, params));
              cell.thetas.push_back(res.theta_hat.a);
            } catch (const Error&) {
              cell.errors.push_back(kNaN);
              cell.thetas.push_back({});
              ++cell.failed;
            }
            ++cell_idx;
          };
          if (plan.run_md) record(cells[cell_idx], "md");
          if (plan.run_gm) record(cells[cell_idx], "gm");
        }
      }
      for (auto& cell : cells) {
        cell.reps = plan.reps;
        std::vector<double> ok;
        for (double e : cell.errors)
          if (!std::isnan(e)) ok.push_back(e);
        if (!ok.empty()) {
          cell.median_err = median_of(ok);
          cell.p90_err = percentile_of(ok, 0.9);
        }
        // componentwise median estimate
        cell.median_theta.assign(params.p(), kNaN);
        for (int d = 0; d < params.p(); ++d) {
          std::vector<double> comp;
          for (const auto& th : cell.thetas)
            if (!th.empty()) comp.push_back(th[d]);
          if (!comp.empty()) cell.median_theta[d] = median_of(comp);
        }
        table.cells.push_back(std::move(cell));
      }
    }
  }
  return table;
}

// ---------------------------------------------------------- influence summary

struct InfluenceEntry {
  std::string law;
  std::vector<double> influence;  // finite-difference IF vector
  double norm = kNaN;
  double gamma_used = kNaN;
};

struct InfluenceSummary {
  std::vector<InfluenceEntry> entries;
  double ges = kNaN;  // max ||IF|| over the law family
};

/// Finite-difference influence of contamination on the (median) estimate:
/// IF(law) = (median theta^gamma - median theta^0) / gamma at the smallest
/// positive gamma, per method/weight arm given by (method, phi_kind). The
/// table must contain a gamma = 0 cell and at least two positive levels.
inline InfluenceSummary influence_summary(const BiasTable& table, const std::string& method,
                                          const std::string& phi_kind,
                                          std::span<const std::string> laws) {
  InfluenceSummary out;
  for (const auto& law : laws) {
    std::vector<double> gammas;
    for (const auto& c : table.cells)
      if (c.method == method && c.phi_kind == phi_kind && c.law == law)
        gammas.push_back(c.gamma);
    std::sort(gammas.begin(), gammas.end());
    long positive = std::count_if(gammas.begin(), gammas.end(), [](double g) { return g > 0; });
    bool has_zero = !gammas.empty() && gammas.front() == 0.0;
    if (!has_zero || positive < 2)
      throw InsufficientGammaGridError(
          "influence summary needs a gamma=0 cell and at least two positive gammas");
    double g1 = *std::find_if(gammas.begin(), gammas.end(), [](double g) { return g > 0; });
    const BiasCell* base = table.find(0.0, method, phi_kind, law);
    const BiasCell* bumped = table.find(g1, method, phi_kind, law);
    InfluenceEntry e;
    e.law = law;
    e.gamma_used = g1;
    double n2 = 0.0;
    for (std::size_t d = 0; d < base->median_theta.size(); ++d) {
      double v = (bumped->median_theta[d] - base->median_theta[d]) / g1;
      e.influence.push_back(v);
      n2 += v * v;
    }
    e.norm = std::sqrt(n2);
    out.entries.push_back(std::move(e));
  }
  out.ges = 0.0;
  for (const auto& e : out.entries) out.ges = std::max(out.ges, e.norm);
  return out;
}

}  // namespace arep
