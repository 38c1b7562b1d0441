// Copyright 2026 The ropelength Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ropelength/io.hpp"

namespace ropelength::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kVerdictFail = 2;

namespace detail {

using io::json;
using io::number;

inline Vector parse_vector(const std::string &text, const std::string &name) {
  std::vector<double> vals;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception &) {
      throw InvalidInput("option --" + name + ": expected comma-separated numbers, got '" + text + "'");
    }
  }
  if (vals.empty()) throw InvalidInput("option --" + name + ": empty vector");
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output;
  std::ostream *out = nullptr;

  void emit(const std::string &text) const {
    if (output.empty())
      *out << text;
    else
      io::write_file(output, text);
  }
};

struct CurveInput {
  std::string path;
  bool open = false;

  void attach(CLI::App *sub) {
    sub->add_option("curve", path, "Curve document (JSON) or CSV file")->required();
    sub->add_flag("--open", open, "Treat CSV input as an open curve");
  }
  Curve load(json &inputs) const {
    const auto doc = io::read_curve_document(path, !open);
    inputs["curve"] = path;
    inputs["closed"] = doc.closed;
    inputs["samples"] = doc.points.cols();
    return doc.to_curve();
  }
};

struct BoundaryInput {
  std::string file, p, q, v, w;
  double lambda = 1.0;

  void attach(CLI::App *sub) {
    sub->add_option("--boundary", file, "Boundary document with fields p, q, v, w, lambda");
    sub->add_option("--p", p, "Start point, comma separated");
    sub->add_option("--q", q, "End point, comma separated");
    sub->add_option("--v", v, "Unit start tangent, comma separated");
    sub->add_option("--w", w, "Unit end tangent, comma separated");
    sub->add_option("--lambda", lambda, "Curvature bound");
  }
  BoundaryData load() const {
    if (!file.empty()) return io::boundary_from_json(io::parse_json(io::read_file(file)));
    if (p.empty() || q.empty() || v.empty() || w.empty())
      throw InvalidInput("boundary data needs --boundary or all of --p --q --v --w");
    BoundaryData b{parse_vector(p, "p"), parse_vector(q, "q"), parse_vector(v, "v"), parse_vector(w, "w"), lambda};
    b.validate();
    return b;
  }
};

inline void write_curve(const std::string &path, const Curve &c, const std::string &name) {
  if (path.empty()) return;
  json meta;
  meta["name"] = name;
  io::write_file(path, io::write_curve_document(io::CurveDocument::from_curve(c, meta)));
}

inline double structure_tol(const std::optional<double> &tol, const Curve &c) {
  return tol.value_or(default_structure_tol(c));
}

}  // namespace detail

/// Parses `args` (without the program name), runs one subcommand and writes
/// its report. Returns 0 on success, 2 when a verdict fails, 1 on bad input.
inline int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  using detail::json;
  using detail::number;
  CLI::App app{"Thickness, ropelength and bounded-curvature shortest paths of discretized curves", "ropelength"};
  app.require_subcommand(1);
  detail::Common common;
  common.out = &out;
  app.add_option("--seed", common.seed, "Seed for randomized commands (echoed in the report)");
  app.add_option("--threads", common.threads, "Worker threads for pairwise scans")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", common.output, "Write the report here instead of stdout");

  std::function<int()> action;
  io::Report report;

  auto sub = [&](const std::string &name, const std::string &desc) {
    CLI::App *s = app.add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  // thickness --------------------------------------------------------------
  detail::CurveInput th_in;
  double th_grid = 0.0, th_pair_tol = 1e-8;
  std::string th_csv;
  {
    auto *s = sub("thickness", "F_k, F_g, MDC, R_O and ropelength of a closed curve");
    th_in.attach(s);
    s->add_option("--grid-step", th_grid, "Double-critical grid step (default: mean spacing)");
    s->add_option("--pair-tol", th_pair_tol, "Orthogonality residual tolerance, relative to chord");
    s->add_option("--csv", th_csv, "Export per-sample kappa and F_g");
    s->callback([&] {
      action = [&] {
        const Curve c = th_in.load(report.inputs);
        CriticalPairOptions opts;
        opts.grid_step = th_grid;
        opts.tol = th_pair_tol;
        const ThicknessReport t = thickness_report(c, opts);
        io::fill(report, t);
        report.tolerances["pair_residual"] = number(th_pair_tol);
        if (!th_csv.empty()) io::write_file(th_csv, io::profile_csv(c, t));
        return cli::kOk;
      };
    });
  }

  // curvature --------------------------------------------------------------
  detail::CurveInput cu_in;
  std::optional<double> cu_window, cu_lambda;
  double cu_tol = 1e-2;
  {
    auto *s = sub("curvature", "Windowed generalized curvature and the equivalent curvature bounds");
    cu_in.attach(s);
    s->add_option("--window", cu_window, "Window half-width (default: max(5 mean, 2 max spacing))");
    s->add_option("--lambda", cu_lambda, "Check the curvature bound Lambda");
    s->add_option("--tol", cu_tol, "Tolerance for the bound check");
    s->callback([&] {
      action = [&] {
        const Curve c = cu_in.load(report.inputs);
        const CurvatureProfile p = cu_window ? curvature_profile(c, *cu_window) : curvature_profile(c);
        report.results["sup_kappa"] = number(p.sup_kappa);
        report.results["f_k"] = number(p.f_k);
        json kappa = json::array();
        for (double k : p.kappa) kappa.push_back(number(k));
        report.results["kappa"] = kappa;
        report.witnesses["sup_kappa_sample"] = p.argmax;
        report.tolerances["window"] = number(p.window);
        if (!cu_lambda) return cli::kOk;
        const Lemma1Report l = verify_lemma1(c, *cu_lambda, cu_tol);
        report.inputs["lambda"] = number(*cu_lambda);
        report.results["windowed_ok"] = l.windowed_ok;
        report.results["pairwise_alpha_ok"] = l.pairwise_alpha_ok;
        report.results["pairwise_chord_ok"] = l.pairwise_chord_ok;
        report.results["max_dilation_alpha"] = number(l.max_dilation_alpha);
        report.results["failed_side"] = l.failed_side();
        report.tolerances["bound"] = number(cu_tol);
        return l.all_pass() ? cli::kOk : cli::kVerdictFail;
      };
    });
  }

  // mdc --------------------------------------------------------------------
  detail::CurveInput mdc_in;
  double mdc_grid = 0.0, mdc_tol = 1e-8;
  {
    auto *s = sub("mdc", "Double critical pairs and the minimal double critical distance");
    mdc_in.attach(s);
    s->add_option("--grid-step", mdc_grid, "Grid step (default: mean spacing)");
    s->add_option("--pair-tol", mdc_tol, "Orthogonality residual tolerance, relative to chord");
    s->callback([&] {
      action = [&] {
        const Curve c = mdc_in.load(report.inputs);
        CriticalPairOptions opts;
        opts.grid_step = mdc_grid;
        opts.tol = mdc_tol;
        opts.exclusion_arc = default_exclusion_arc(c, curvature_profile(c).f_k);
        const auto pairs = double_critical_pairs(c, opts);
        double best = kInf;
        json list = json::array();
        const CriticalPair *witness = nullptr;
        for (const auto &cp : pairs) {
          list.push_back(io::to_json(cp));
          if (cp.d < best) {
            best = cp.d;
            witness = &cp;
          }
        }
        report.results["mdc"] = number(best);
        report.results["pair_count"] = pairs.size();
        report.results["pairs"] = list;
        report.witnesses["mdc_pair"] = witness ? io::to_json(*witness) : json();
        report.tolerances["pair_residual"] = number(mdc_tol);
        report.tolerances["exclusion_arc"] = number(opts.exclusion_arc);
        return cli::kOk;
      };
    });
  }

  // classify / decompose ---------------------------------------------------
  detail::CurveInput cl_in;
  std::optional<double> cl_tol;
  {
    auto *s = sub("classify", "Label samples Iz / Imx / Ib and mark Ic");
    cl_in.attach(s);
    s->add_option("--tol", cl_tol, "Relative tolerance (default 10/N)");
    s->callback([&] {
      action = [&] {
        const Curve c = cl_in.load(report.inputs);
        const ThicknessReport t = thickness_report(c);
        const double tol = detail::structure_tol(cl_tol, c);
        const PointClasses pc = classify_points(c, t, tol);
        json labels = json::array(), critical = json::array();
        for (std::size_t i = 0; i < c.size(); ++i) {
          labels.push_back(to_string(pc.kappa_class[i]));
          if (pc.critical[i]) critical.push_back(i);
        }
        report.results["counts"] = {{"Iz", pc.count(CurvatureClass::zero)},
                                    {"Imx", pc.count(CurvatureClass::maximal)},
                                    {"Ib", pc.count(CurvatureClass::between)},
                                    {"Ic", pc.critical_count()}};
        report.results["labels"] = labels;
        report.results["Ic"] = critical;
        report.results["r_o"] = number(pc.r_o);
        report.results["mdc"] = number(pc.mdc);
        report.tolerances["classification"] = number(tol);
        return cli::kOk;
      };
    });
  }
  detail::CurveInput de_in;
  std::optional<double> de_tol;
  {
    auto *s = sub("decompose", "Split a closed curve into segments, maximal arcs and other runs");
    de_in.attach(s);
    s->add_option("--tol", de_tol, "Relative tolerance (default 10/N)");
    s->callback([&] {
      action = [&] {
        const Curve c = de_in.load(report.inputs);
        const double tol = detail::structure_tol(de_tol, c);
        const StructureReport st = decompose_structure(c, thickness_report(c), tol);
        report.results["runs"] = io::to_json(st, c);
        report.results["segments"] = st.count(RunKind::segment);
        report.results["arcs"] = st.count(RunKind::arc);
        report.results["other"] = st.count(RunKind::other);
        report.results["f_k"] = number(st.f_k);
        report.results["r_o"] = number(st.r_o);
        report.results["mdc"] = number(st.mdc);
        report.results["thickness_gap"] = number(st.thickness_gap);
        report.tolerances["structure"] = number(tol);
        return cli::kOk;
      };
    });
  }

  // check-thm2 / check-thm3 ------------------------------------------------
  detail::CurveInput t2_in;
  std::optional<double> t2_tol;
  {
    auto *s = sub("check-thm2", "Necessary conditions for relative extremality with nonconstant curvature");
    t2_in.attach(s);
    s->add_option("--tol", t2_tol, "Relative tolerance (default 10/N)");
    s->callback([&] {
      action = [&] {
        const Curve c = t2_in.load(report.inputs);
        const double tol = detail::structure_tol(t2_tol, c);
        const Theorem2Verdict v = check_theorem2(c, thickness_report(c), tol);
        report.results["passed"] = v.passed;
        report.results["hypothesis"] = v.hypothesis;
        report.results["thickness_gap"] = number(v.thickness_gap);
        report.results["thickness_ok"] = v.thickness_ok;
        json clauses = json::array();
        for (const auto &cl : v.clauses)
          clauses.push_back({{"segment_run", cl.segment_run}, {"passed", cl.passed}, {"evidence", cl.description}});
        report.results["clauses"] = clauses;
        report.results["summary"] = v.summary;
        report.tolerances["verdict"] = number(tol);
        return v.passed ? cli::kOk : cli::kVerdictFail;
      };
    });
  }
  detail::CurveInput t3_in;
  std::optional<double> t3_tol;
  {
    auto *s = sub("check-thm3", "Constant curvature required when the thickness is not set by a critical chord");
    t3_in.attach(s);
    s->add_option("--tol", t3_tol, "Relative tolerance (default 10/N)");
    s->callback([&] {
      action = [&] {
        const Curve c = t3_in.load(report.inputs);
        const double tol = detail::structure_tol(t3_tol, c);
        const ThicknessReport t = thickness_report(c);
        const Theorem3Verdict v = check_theorem3(t, tol);
        report.results["passed"] = v.passed;
        report.results["triggered"] = v.triggered;
        report.results["max_deviation"] = number(v.max_deviation);
        report.results["r_o"] = number(t.r_o);
        report.results["mdc"] = number(t.mdc);
        report.results["summary"] = v.summary;
        report.tolerances["verdict"] = number(tol);
        return v.passed ? cli::kOk : cli::kVerdictFail;
      };
    });
  }

  // clc-plan ---------------------------------------------------------------
  detail::BoundaryInput pl_in;
  std::size_t pl_samples = 512, pl_segments = 128;
  int pl_restarts = 8;
  bool pl_no_oracle = false;
  std::string pl_curve_out;
  {
    auto *s = sub("clc-plan", "Shortest bounded-curvature path between two oriented points");
    pl_in.attach(s);
    s->add_option("--samples", pl_samples, "Samples in the emitted path");
    s->add_option("--segments", pl_segments, "Oracle polyline segments");
    s->add_option("--restarts", pl_restarts, "Oracle restarts");
    s->add_flag("--no-oracle", pl_no_oracle, "Skip the discrete oracle cross-check");
    s->add_option("--curve-out", pl_curve_out, "Write the winning path as a curve document");
    s->callback([&] {
      action = [&] {
        const BoundaryData b = pl_in.load();
        report.inputs = io::to_json(b);
        PlanOptions opts;
        opts.run_oracle = !pl_no_oracle;
        opts.oracle.segments = pl_segments;
        opts.oracle.restarts = pl_restarts;
        opts.oracle.seed = common.seed;
        opts.csc.seed = common.seed;
        const PlanResult res = plan_shortest_path(b, opts);
        report.results["regime"] = to_string(res.regime);
        report.results["candidate_count"] = res.candidates.size();
        json cands = json::array();
        for (const auto &p : res.candidates) cands.push_back(io::to_json(p));
        report.results["candidates"] = cands;
        report.results["best_length"] = number(res.best_length());
        if (res.oracle) report.results["oracle"] = io::to_json(*res.oracle);
        report.tolerances["agreement"] = number(opts.agreement);
        report.tolerances["joint"] = number(opts.csc.joint_tol);
        if (res.regime == PlanRegime::clc)
          detail::write_curve(pl_curve_out, res.candidates.front().sample(pl_samples), "clc_path");
        else if (res.oracle)
          detail::write_curve(pl_curve_out, res.oracle->polyline, "oracle_polyline");
        return cli::kOk;
      };
    });
  }

  // clc-verify -------------------------------------------------------------
  detail::CurveInput ve_in;
  double ve_lambda = 1.0, ve_tol = 0.05;
  {
    auto *s = sub("clc-verify", "Check the CLC structure of a purported shortest path");
    ve_in.attach(s);
    s->add_option("--lambda", ve_lambda, "Curvature bound")->required();
    s->add_option("--tol", ve_tol, "Relative tolerance");
    s->callback([&] {
      action = [&] {
        const Curve c = ve_in.load(report.inputs);
        report.inputs["lambda"] = number(ve_lambda);
        const Theorem1Verdict v = verify_theorem1_structure(c, ve_lambda, ve_tol);
        json runs = json::array();
        for (const auto &r : v.runs) {
          json j{{"start", r.run.start},     {"count", r.run.count},          {"maximal", r.maximal},
                 {"length", number(r.length)}, {"touches_endpoint", r.touches_endpoint}, {"passed", r.passed}};
          if (r.maximal)
            j["arc_length"] = number(r.arc_length);
          else
            j["straightness"] = number(r.straightness);
          if (!r.reason.empty()) j["reason"] = r.reason;
          runs.push_back(std::move(j));
        }
        report.results["passed"] = v.passed();
        report.results["failures"] = v.failures;
        report.results["runs"] = runs;
        try {
          const ContainmentReport cr = verify_prop2_containment(c, ve_lambda);
          report.results["containment"] = {{"passed", cr.passed()},
                                           {"violations", cr.violations.size()},
                                           {"contacts", cr.contacts},
                                           {"worst_penetration", number(cr.worst_penetration)}};
        } catch (const InvalidInput &e) {
          report.results["containment"] = {{"skipped", e.what()}};
        }
        report.tolerances["structure"] = number(ve_tol);
        return v.passed() ? cli::kOk : cli::kVerdictFail;
      };
    });
  }

  // oracle -----------------------------------------------------------------
  detail::BoundaryInput or_in;
  OracleOptions or_opts;
  std::string or_curve_out;
  {
    auto *s = sub("oracle", "Discrete shortest polyline under the turning bound");
    or_in.attach(s);
    s->add_option("--segments", or_opts.segments, "Polyline segments (>= 16)");
    s->add_option("--restarts", or_opts.restarts, "Random restarts");
    s->add_option("--iters", or_opts.iters, "Inner iterations per round");
    s->add_flag("--one-sided", or_opts.one_sided, "Leave the end direction free");
    s->add_option("--curve-out", or_curve_out, "Write the polyline as a curve document");
    s->callback([&] {
      action = [&] {
        const BoundaryData b = or_in.load();
        report.inputs = io::to_json(b);
        report.inputs["one_sided"] = or_opts.one_sided;
        or_opts.seed = common.seed;
        const OracleResult r = discrete_shortest_oracle(b, or_opts);
        report.results = io::to_json(r);
        report.tolerances["feasibility"] = number(or_opts.feasibility_tol);
        detail::write_curve(or_curve_out, r.polyline, "oracle_polyline");
        return cli::kOk;
      };
    });
  }

  // relax ------------------------------------------------------------------
  detail::CurveInput rx_in;
  double rx_cap = 1.5;
  std::size_t rx_steps = 1000;
  RelaxOptions rx_opts;
  std::string rx_csv, rx_curve_out;
  {
    auto *s = sub("relax", "Curvature-capped ropelength reduction by random bump moves");
    rx_in.attach(s);
    s->add_option("--cap", rx_cap, "Curvature cap")->required();
    s->add_option("--steps", rx_steps, "Number of moves");
    s->add_option("--samples", rx_opts.samples, "Working resolution");
    s->add_option("--csv", rx_csv, "Export the trace");
    s->add_option("--curve-out", rx_curve_out, "Write the relaxed curve");
    s->callback([&] {
      action = [&] {
        const Curve c = rx_in.load(report.inputs);
        report.inputs["cap"] = number(rx_cap);
        report.inputs["steps"] = rx_steps;
        const RelaxResult r = relax_ropelength(c, rx_cap, rx_steps, common.seed, rx_opts);
        report.results["initial_ropelength"] = number(r.trace.front().ropelength);
        report.results["final_ropelength"] = number(r.trace.back().ropelength);
        report.results["final_length"] = number(r.trace.back().length);
        report.results["final_r_o"] = number(r.trace.back().r_o);
        report.results["accepted"] = r.accepted;
        report.tolerances["r_o"] = number(rx_opts.r_o_tol);
        if (!rx_csv.empty()) io::write_file(rx_csv, io::trace_csv(r));
        detail::write_curve(rx_curve_out, r.curve, "relaxed");
        return cli::kOk;
      };
    });
  }

  // generate ---------------------------------------------------------------
  std::string gen_kind;
  std::vector<std::string> gen_params;
  std::optional<double> gen_n;
  detail::BoundaryInput gen_b;
  {
    auto *s = sub("generate", "Emit an analytic fixture as a curve document");
    s->add_option("kind", gen_kind, "Fixture kind")->required();
    s->add_option("--n", gen_n, "Number of samples");
    s->add_option("--param", gen_params, "Fixture parameter key=value (repeatable)");
    gen_b.attach(s);
    s->callback([&] {
      action = [&] {
        io::FixtureParams params;
        for (const auto &kv : gen_params) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw InvalidInput("--param expects key=value, got '" + kv + "'");
          try {
            params.scalars[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
          } catch (const std::exception &) {
            throw InvalidInput("--param " + kv + ": value is not a number");
          }
        }
        if (gen_n) params.scalars["n"] = *gen_n;
        for (auto [key, text] : {std::pair{"p", &gen_b.p}, std::pair{"q", &gen_b.q}, std::pair{"v", &gen_b.v},
                                 std::pair{"w", &gen_b.w}})
          if (!text->empty()) params.vectors[key] = detail::parse_vector(*text, key);
        if (gen_kind == "clc") params.scalars.try_emplace("lambda", gen_b.lambda);
        common.emit(io::write_curve_document(io::generate_fixture(gen_kind, params)));
        return -1;  // the document replaces the report
      };
    });
  }

  // semicontinuity ---------------------------------------------------------
  std::vector<std::string> sc_paths;
  double sc_tol = 1e-9;
  std::optional<std::size_t> sc_tail;
  bool sc_open = false;
  {
    auto *s = sub("semicontinuity", "Tail bounds of R_O and MDC along a sequence ending at its limit");
    s->add_option("curves", sc_paths, "Approximants followed by the limit curve")->required();
    s->add_option("--tol", sc_tol, "Slack in the tail comparisons");
    s->add_option("--tail-start", sc_tail, "First approximant of the tail (default: last)");
    s->add_flag("--open", sc_open, "Treat CSV input as open curves");
    s->callback([&] {
      action = [&] {
        std::vector<Curve> curves;
        json paths = json::array();
        for (const auto &p : sc_paths) {
          curves.push_back(io::read_curve_document(p, !sc_open).to_curve());
          paths.push_back(p);
        }
        report.inputs["curves"] = paths;
        const SemicontinuityReport r = semicontinuity_probe(curves, sc_tol, sc_tail);
        json ro = json::array(), md = json::array(), sup = json::array(), inf = json::array();
        for (std::size_t k = 0; k < r.r_o.size(); ++k) {
          ro.push_back(number(r.r_o[k]));
          md.push_back(number(r.mdc[k]));
          sup.push_back(number(r.tail_sup_r_o[k]));
          inf.push_back(number(r.tail_inf_mdc[k]));
        }
        report.results["r_o"] = ro;
        report.results["mdc"] = md;
        report.results["r_o_limit"] = number(r.r_o_limit);
        report.results["mdc_limit"] = number(r.mdc_limit);
        report.results["tail_sup_r_o"] = sup;
        report.results["tail_inf_mdc"] = inf;
        report.results["tail_start"] = r.tail_start;
        report.results["r_o_upper_ok"] = r.r_o_upper_ok;
        report.results["mdc_lower_ok"] = r.mdc_lower_ok;
        report.tolerances["tail"] = number(sc_tol);
        return r.passed() ? cli::kOk : cli::kVerdictFail;
      };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    set_thread_count(common.threads);
    report.command = app.get_subcommands().front()->get_name();
    report.seed = common.seed;
    const int code = action();
    if (code < 0) return kOk;
    common.emit(report.str());
    return code;
  } catch (const InvalidInput &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InfeasibleProblem &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace ropelength::cli
