#pragma once

// Command-line front end. run_command parses argv, dispatches, and maps
// errors to exit codes: 0 ok, 1 failed verification or hypothesis, 2 usage or
// invalid input, 3 infeasible configuration.

#include "waistlab/verification.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace waistlab::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kInfeasible = 3 };

/// Writes plot.csv (trial, diameter, success, n, k) and plot_summary.csv (one
/// row of diameter quantiles per (n, k) group, in order of appearance).
inline void emit_plot_data(const ExperimentReport& r, const std::filesystem::path& dir) {
  static const std::vector<std::string> cols{"trial", "diameter", "success", "n", "k"};
  std::filesystem::create_directories(dir);
  const bool has = std::all_of(cols.begin(), cols.end(), [&](const auto& c) { return r.trials.has(c); });
  if (!has && !r.trials.rows.empty()) throw Error("report '" + r.experiment + "' has no per-trial diameter records");
  TrialTable plot;
  plot.columns = cols;
  std::vector<std::pair<std::pair<int, int>, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < r.trials.rows.size(); ++i) {
    const auto& row = r.trials.rows[i];
    std::vector<double> out;
    for (const auto& c : cols) out.push_back(row[r.trials.column(c)]);
    plot.rows.push_back(out);
    std::pair<int, int> key{static_cast<int>(out[3]), static_cast<int>(out[4])};
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {i}});
    } else {
      it->second.push_back(i);
    }
  }
  write_text(dir / "plot.csv", trials_csv(plot));

  TrialTable summary;
  summary.columns = {"n", "k", "n_over_k", "count", "min", "q05", "q25", "median", "q75", "q95", "max", "success_rate"};
  for (const auto& [key, idx] : groups) {
    std::vector<double> d;
    double ok = 0.0;
    for (auto i : idx) {
      d.push_back(plot.rows[i][1]);
      ok += plot.rows[i][2];
    }
    summary.rows.push_back({static_cast<double>(key.first), static_cast<double>(key.second),
                            static_cast<double>(key.first) / key.second, static_cast<double>(d.size()), quantile(d, 0.0),
                            quantile(d, 0.05), quantile(d, 0.25), quantile(d, 0.5), quantile(d, 0.75),
                            quantile(d, 0.95), quantile(d, 1.0), ok / d.size()});
  }
  write_text(dir / "plot_summary.csv", trials_csv(summary));
}

namespace detail {

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline Vec parse_vector(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("cannot parse vector component '" + item + "'");
    }
  }
  if (v.empty()) throw DomainError("empty vector");
  return from_std(v);
}

inline json witness_json(const HypothesisFailure& e) { return to_std(e.witness()); }

}  // namespace detail

/// Runs the CLI. args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"waistlab: sphere measures, convex bodies and randomized intersection experiments", "waistlab"};
  app.require_subcommand(1);

  // sigma
  auto* sigma = app.add_subcommand("sigma", "measure of the theta-neighborhood of S^j in S^m");
  int sd = 0;
  int jd = 0;
  double theta = 0.0;
  std::size_t mc = 0;
  std::uint64_t sigma_seed = 1;
  sigma->add_option("--sphere-dim", sd, "m")->required();
  sigma->add_option("--subsphere-dim", jd, "j")->required();
  sigma->add_option("--theta", theta, "radius in radians")->required();
  sigma->add_option("--mc", mc, "also estimate with this many samples");
  sigma->add_option("--seed", sigma_seed, "seed for --mc");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds");
  bounds->require_subcommand(1);
  int bn = 0;
  int bk = 0;
  double beps = 0.0;
  double bM = 2.0;
  BoundConstants consts;
  auto add_consts = [&](CLI::App* a) {
    a->add_option("--c", consts.c_small, "small constant c");
    a->add_option("--C", consts.C_big, "large constant C");
  };
  auto* bcap = bounds->add_subcommand("cap", "cap sandwich bounds and the exact values they bracket");
  auto* blip = bounds->add_subcommand("lip", "Lipschitz-waist bounds");
  auto* bchi = bounds->add_subcommand("chisq", "chi-square tail and small-ball checks");
  auto* bsch = bounds->add_subcommand("schedule", "parameter schedule");
  for (auto* a : {bcap, blip}) {
    a->add_option("--n", bn)->required();
    a->add_option("--k", bk)->required();
    a->add_option("--eps", beps)->required();
    add_consts(a);
  }
  bchi->add_option("--k", bk)->required();
  bchi->add_option("--M", bM, "tail multiplier (>= 2)");
  bchi->add_option("--eps", beps)->required();
  add_consts(bchi);
  bsch->add_option("--n", bn)->required();
  bsch->add_option("--k", bk)->required();
  bsch->add_option("--a", consts.a_frac, "a in (0, 1)");
  bsch->add_option("--C1", consts.C1_sched);
  bsch->add_option("--c2", consts.c2_sched);

  // body
  auto* body = app.add_subcommand("body", "evaluate a body spec");
  std::string body_spec;
  std::vector<std::string> sup_q;
  std::vector<std::string> gauge_q;
  std::vector<std::string> contains_q;
  std::vector<std::string> dist_q;
  body->add_option("--spec", body_spec, "body spec: inline JSON or a file path")->required();
  body->add_option("--support", sup_q, "direction u as comma list");
  body->add_option("--gauge", gauge_q, "point x as comma list");
  body->add_option("--contains", contains_q, "point x as comma list");
  body->add_option("--distance", dist_q, "point x as comma list");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a harness");
  std::string exp_name;
  std::string cfg_path;
  std::optional<std::uint64_t> exp_seed;
  std::string out_dir;
  bool plot = false;
  exp->add_option("name", exp_name, "harness")->required()->check(CLI::IsMember(experiment_names()));
  exp->add_option("--config", cfg_path, "JSON config file")->required();
  exp->add_option("--seed", exp_seed, "seed (default: drawn from the system entropy source)");
  exp->add_option("--out", out_dir, "output directory for report.json and trials.csv");
  exp->add_flag("--plot-data", plot, "also write plot.csv and plot_summary.csv");

  // verify
  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  bool ver_full = false;
  std::vector<std::string> only;
  ver->add_flag("--full", ver_full, "acceptance-scale sample sizes");
  ver->add_option("--only", only, "check ids to run");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (sigma->parsed()) {
      json j;
      j["exact"] = sigma_exact(sd, jd, theta);
      if (mc > 0) {
        Estimate e = sigma_mc({sd, jd, theta}, mc, sigma_seed);
        j["mc"] = e.value;
        j["se"] = e.standard_error;
      }
      out << j.dump() << "\n";
      return kOk;
    }
    if (bounds->parsed()) {
      json j;
      if (bcap->parsed()) {
        CapBounds b = cap_bounds(bn, bk, beps, consts);
        j = {{"lower", b.lower}, {"upper", b.upper}, {"lower_compl", b.lower_compl}, {"upper_compl", b.upper_compl}};
        if (bn > bk) {
          j["exact"] = sigma_exact(bn - 1, bn - bk - 1, cap_angle(bn, bk, beps));
          j["exact_compl"] = sigma_exact(bn - 1, bk - 1, cap_angle_complement(bn, bk, beps));
        }
      } else if (blip->parsed()) {
        LipBounds b = lip_bounds(bn, bk, beps, consts);
        j = {{"bound_i", b.bound_i}, {"bound_ii", b.bound_ii}};
      } else if (bchi->parsed()) {
        auto g = gaussian_fact_check(bk, bM, beps, consts);
        j = {{"tail_probability", g.tail_probability}, {"tail_bound", g.tail_bound}, {"tail_ok", g.tail_ok},
             {"smallball_probability", g.smallball_probability}, {"smallball_lower", g.smallball_lower},
             {"smallball_upper", g.smallball_upper}, {"smallball_ok", g.smallball_ok}};
      } else {
        j = to_json(theorem_schedule(bn, bk, consts));
      }
      out << j.dump() << "\n";
      return kOk;
    }
    if (body->parsed()) {
      std::string text = body_spec;
      if (!text.empty() && text.front() != '{') text = detail::read_text(text);
      BodyOracle K = construct_body(json::parse(text));
      const auto& t = K.traits();
      json j = {{"name", t.name},
                {"dim", t.dim},
                {"inner_radius", number_json(t.inner_radius)},
                {"outer_radius", number_json(t.outer_radius)},
                {"symmetric", t.symmetric},
                {"flat", t.flat},
                {"truncated", t.truncated}};
      auto eval = [&](const std::vector<std::string>& qs, const char* key, auto fn) {
        if (qs.empty()) return;
        json arr = json::array();
        for (const auto& q : qs) arr.push_back({{"point", to_std(detail::parse_vector(q))}, {"value", fn(detail::parse_vector(q))}});
        j[key] = arr;
      };
      eval(sup_q, "support", [&](const Vec& u) { return number_json(K.support(u)); });
      eval(gauge_q, "gauge", [&](const Vec& x) { return number_json(K.gauge(x)); });
      eval(contains_q, "contains", [&](const Vec& x) { return json(K.membership(x)); });
      eval(dist_q, "distance", [&](const Vec& x) { return number_json(K.distance(x)); });
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (exp->parsed()) {
      ExperimentConfig cfg = load_config(cfg_path, exp_name);
      const std::uint64_t seed = exp_seed ? *exp_seed : entropy_seed();
      ExperimentReport rep = run_experiment(cfg, seed);
      if (!out_dir.empty()) {
        write_report(rep, out_dir);
        if (plot) emit_plot_data(rep, out_dir);
        out << "wrote " << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
      } else {
        out << to_json(rep).dump(2) << "\n";
      }
      return kOk;
    }
    if (ver->parsed()) {
      auto checks = verify::all_checks(false);
      bool ok = true;
      for (const auto& c : checks) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        auto r = c.run(ver_full ? verify::Scale::full : verify::Scale::quick);
        ok = ok && r.passed;
        out << (r.passed ? "PASS " : "FAIL ") << r.id << "  " << r.title << "  (" << verify::detail::fmt(r.seconds)
            << " s)\n";
        for (const auto& d : r.details) out << "       " << d << "\n";
      }
      out << (ok ? "all checks passed" : "verification FAILED") << "\n";
      return ok ? kOk : kFailed;
    }
  } catch (const InfeasibleConfiguration& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const HypothesisFailure& e) {
    err << "hypothesis failed: " << e.what() << "\n  witness: " << detail::witness_json(e).dump() << "\n";
    return kFailed;
  } catch (const CertificationFailure& e) {
    err << "certification failed: " << e.what() << "\n";
    return kFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidSpec& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}

}  // namespace waistlab::cli
