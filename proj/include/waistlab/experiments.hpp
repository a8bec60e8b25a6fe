#pragma once

// Experiment harnesses. Each takes a validated config and a seed and returns
// an ExperimentReport whose trial table depends only on (config, seed).

#include "waistlab/body_spec_json.hpp"
#include "waistlab/estimators.hpp"
#include "waistlab/report.hpp"

#include <chrono>
#include <optional>
#include <set>

namespace waistlab {

// ---------------------------------------------------------------------------
// Parameter schedule.

struct ScheduleParams {
  int n = 0;
  int k = 0;
  double a_frac = 0.0;
  double C1_sched = 0.0;
  double c2_sched = 0.0;
  double eps_K = 0.0;
  double delta_K = 0.0;
  double eps_L = 0.0;
  double delta_L = 0.0;
  double guaranteed_radius = 0.0;  ///< 1 − δ_K − 2δ_L
};

inline ScheduleParams theorem_schedule(int n, int k, const BoundConstants& consts = {}) {
  if (n < 1 || k < 1 || k > n) throw DomainError("schedule requires 1 <= k <= n");
  consts.validate();
  const double a = consts.a_frac;
  if (a * k < 1.0) {
    throw InfeasibleConfiguration("schedule requires a*k >= 1 (a=" + format_number(a) + ", k=" + std::to_string(k) +
                                  ")");
  }
  ScheduleParams s;
  s.n = n;
  s.k = k;
  s.a_frac = a;
  s.C1_sched = consts.C1_sched;
  s.c2_sched = consts.c2_sched;
  const double nk = static_cast<double>(n) / k;
  s.eps_K = std::exp(-consts.C1_sched * nk);
  s.delta_K = std::sqrt(1.0 - s.eps_K * s.eps_K / nk);
  s.eps_L = std::exp(-consts.c2_sched * n / (a * k));
  s.delta_L = std::sqrt(s.eps_L * s.eps_L * a * k / n);
  s.guaranteed_radius = 1.0 - s.delta_K - 2.0 * s.delta_L;
  if (!(s.guaranteed_radius > 0.0)) {
    throw InfeasibleConfiguration("schedule infeasible at these constants: delta_K + 2 delta_L >= 1");
  }
  return s;
}

inline json to_json(const ScheduleParams& s) {
  return {{"n", s.n},         {"k", s.k},         {"a_frac", s.a_frac}, {"C1_sched", s.C1_sched},
          {"c2_sched", s.c2_sched}, {"eps_K", s.eps_K}, {"delta_K", s.delta_K}, {"eps_L", s.eps_L},
          {"delta_L", s.delta_L}, {"guaranteed_radius", s.guaranteed_radius}};
}

// ---------------------------------------------------------------------------
// Config plumbing shared by the harnesses.

namespace detail {

/// Reads fields of one JSON object and rejects any key it was not asked about.
class FieldReader {
 public:
  explicit FieldReader(const json& j, std::string where = "config") : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidSpec(where_, "must be a JSON object");
  }
  ~FieldReader() = default;

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }
  const json& raw(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw InvalidSpec(key, "missing");
    return j_[key];
  }
  double number(const char* key) {
    const json& v = raw(key);
    if (!v.is_number()) throw InvalidSpec(key, "must be a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }
  long long integer(const char* key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw InvalidSpec(key, "must be an integer");
    return v.get<long long>();
  }
  long long integer(const char* key, long long fallback) { return has(key) ? integer(key) : fallback; }
  std::string string(const char* key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw InvalidSpec(key, "must be a string");
    return v.get<std::string>();
  }
  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw InvalidSpec(key, "must be a boolean");
    return v.get<bool>();
  }
  std::vector<double> numbers(const char* key) {
    const json& v = raw(key);
    std::vector<double> out;
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw InvalidSpec(key, "must be a number or an array of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw InvalidSpec(key, "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Mat matrix(const char* key) {
    const json& v = raw(key);
    std::vector<std::vector<double>> rows;
    if (!v.is_array() || v.empty()) throw InvalidSpec(key, "must be a non-empty array of arrays");
    for (const auto& r : v) {
      if (!r.is_array()) throw InvalidSpec(key, "must be an array of arrays");
      std::vector<double> row;
      for (const auto& e : r) {
        if (!e.is_number()) throw InvalidSpec(key, "entries must be numbers");
        row.push_back(e.get<double>());
      }
      rows.push_back(std::move(row));
    }
    Mat M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw InvalidSpec(key, "rows have different lengths");
      for (std::size_t c = 0; c < rows[i].size(); ++c) {
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
    return M;
  }
  BodySpec body(const char* key) { return body_spec_from_json(raw(key)); }

  /// Call after reading: any key never asked about is an error.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidSpec(it.key(), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline json matrix_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(to_std(M.row(i).transpose()));
  return rows;
}

inline OptimizerConfig optimizer_from_json(const json& j) {
  FieldReader r(j, "optimizer");
  OptimizerConfig c;
  c.restarts = static_cast<int>(r.integer("restarts", c.restarts));
  c.seed_points = static_cast<std::size_t>(r.integer("seed_points", static_cast<long long>(c.seed_points)));
  c.net_delta = r.number("net_delta", c.net_delta);
  c.max_net_size = static_cast<std::size_t>(r.integer("max_net_size", static_cast<long long>(c.max_net_size)));
  c.max_iterations = static_cast<int>(r.integer("max_iterations", c.max_iterations));
  c.initial_step = r.number("initial_step", c.initial_step);
  c.min_step = r.number("min_step", c.min_step);
  c.extra_directions = static_cast<int>(r.integer("extra_directions", c.extra_directions));
  r.finish();
  if (c.restarts < 0 || c.max_iterations < 0 || !(c.initial_step > 0) || !(c.min_step > 0)) {
    throw InvalidSpec("optimizer", "restarts/max_iterations must be >= 0 and steps > 0");
  }
  return c;
}

inline json to_json(const OptimizerConfig& c) {
  return {{"restarts", c.restarts},           {"seed_points", c.seed_points},     {"net_delta", c.net_delta},
          {"max_net_size", c.max_net_size},   {"max_iterations", c.max_iterations}, {"initial_step", c.initial_step},
          {"min_step", c.min_step},           {"extra_directions", c.extra_directions}};
}

inline BoundConstants constants_from_json(const json& j) {
  FieldReader r(j, "constants");
  BoundConstants c;
  c.c_small = r.number("c_small", c.c_small);
  c.C_big = r.number("C_big", c.C_big);
  c.C1_sched = r.number("C1_sched", c.C1_sched);
  c.c2_sched = r.number("c2_sched", c.c2_sched);
  c.a_frac = r.number("a_frac", c.a_frac);
  r.finish();
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw InvalidSpec("constants", e.what());
  }
  return c;
}

inline json to_json(const BoundConstants& c) {
  return {{"c_small", c.c_small}, {"C_big", c.C_big}, {"C1_sched", c.C1_sched}, {"c2_sched", c.c2_sched},
          {"a_frac", c.a_frac}};
}

inline void require_range(long long v, long long lo, long long hi, const char* key) {
  if (v < lo || v > hi) {
    throw InvalidSpec(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial, std::uint64_t salt = 0) {
  return derive_seed(seed, 0x7000000ULL * (salt + 1) + trial);
}

/// Runs fn(t) for every trial and stores the returned rows in trial order.
template <class Fn>
std::vector<std::vector<double>> run_trials(std::size_t trials, Fn&& fn) {
  std::vector<std::vector<double>> rows(trials);
  std::vector<std::exception_ptr> errors(trials);
  parallel_for_blocks(trials, [&](std::size_t t) {
    try {
      rows[t] = fn(t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  });
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline BodySpecPtr cylinder_spec(int n, int core_dim, double core_radius, double truncation) {
  spec::TruncatedCylinder c;
  c.dim = n;
  c.core = make_spec(spec::Ball{core_dim, core_radius});
  c.truncation_radius = truncation;
  return make_spec(c);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two bodies.

struct DimPair {
  int n = 0;
  int k = 0;
};

struct TwoBodiesConfig {
  int n = 8;
  int k = 4;
  std::vector<DimPair> sweep;  ///< when non-empty, replaces (n, k)
  std::size_t trials = 200;
  std::string mode = "primal";  ///< primal: diam(K ∩ UL); dual: inclusion radius of K + UL and the polar diameter
  std::string construction = "cylinder";  ///< cylinder | explicit
  std::optional<BodySpec> K;
  std::optional<BodySpec> L;
  std::optional<Mat> K_section;  ///< rows spanning the declared section of K (default: leading coordinates)
  std::optional<Mat> L_section;
  std::optional<double> section_bound;  ///< required bound on declared section diameters
  double a_frac = 1.0 / 6.0;
  double core_radius = 0.5;
  double truncation_radius = kDefaultTruncation;
  double C_ref = 2.0;
  std::size_t hypothesis_probes = 2000;
  OptimizerConfig optimizer;
  std::optional<json> schedule;  ///< {"n","k", constants...}: checked before running
};

inline TwoBodiesConfig two_bodies_config_from_json(const json& j) {
  detail::FieldReader r(j);
  TwoBodiesConfig c;
  c.n = static_cast<int>(r.integer("n", c.n));
  c.k = static_cast<int>(r.integer("k", c.k));
  if (r.has("sweep")) {
    const json& s = r.raw("sweep");
    if (!s.is_array()) throw InvalidSpec("sweep", "must be an array of {n, k} objects");
    for (const auto& e : s) {
      detail::FieldReader er(e, "sweep");
      DimPair p{static_cast<int>(er.integer("n")), static_cast<int>(er.integer("k"))};
      er.finish();
      c.sweep.push_back(p);
    }
  }
  c.trials = static_cast<std::size_t>(r.integer("trials", static_cast<long long>(c.trials)));
  c.mode = r.string("mode", c.mode);
  c.construction = r.string("construction", (j.contains("K") || j.contains("L")) ? "explicit" : c.construction);
  if (r.has("K")) c.K = r.body("K");
  if (r.has("L")) c.L = r.body("L");
  if (r.has("K_section")) c.K_section = r.matrix("K_section");
  if (r.has("L_section")) c.L_section = r.matrix("L_section");
  if (r.has("section_bound")) c.section_bound = r.number("section_bound");
  c.a_frac = r.number("a_frac", c.a_frac);
  c.core_radius = r.number("core_radius", c.core_radius);
  c.truncation_radius = r.number("truncation_radius", c.truncation_radius);
  c.C_ref = r.number("C_ref", c.C_ref);
  c.hypothesis_probes = static_cast<std::size_t>(r.integer("hypothesis_probes", static_cast<long long>(c.hypothesis_probes)));
  if (r.has("optimizer")) c.optimizer = detail::optimizer_from_json(r.raw("optimizer"));
  if (r.has("schedule")) c.schedule = r.raw("schedule");
  r.finish();

  detail::require_range(static_cast<long long>(c.trials), 0, 1000000, "trials");
  if (c.mode != "primal" && c.mode != "dual") throw InvalidSpec("mode", "must be 'primal' or 'dual'");
  if (c.construction != "cylinder" && c.construction != "explicit") {
    throw InvalidSpec("construction", "must be 'cylinder' or 'explicit'");
  }
  if (c.construction == "explicit" && (!c.K || !c.L)) throw InvalidSpec("K", "explicit construction needs K and L");
  if (!(c.a_frac > 0.0 && c.a_frac < 1.0)) throw InvalidSpec("a_frac", "must lie in (0, 1)");
  if (!(c.core_radius > 0.0)) throw InvalidSpec("core_radius", "must be strictly positive");
  if (!(c.truncation_radius > 0.0)) throw InvalidSpec("truncation_radius", "must be strictly positive");
  if (!(c.C_ref > 0.0)) throw InvalidSpec("C_ref", "must be strictly positive");
  auto pairs = c.sweep.empty() ? std::vector<DimPair>{{c.n, c.k}} : c.sweep;
  for (const auto& p : pairs) {
    detail::require_range(p.n, 2, kMaxBodyDim, "n");
    detail::require_range(p.k, 1, p.n - 1, "k");
  }
  return c;
}

inline json to_json(const TwoBodiesConfig& c) {
  json j = {{"n", c.n}, {"k", c.k}};
  if (!c.sweep.empty()) {
    json s = json::array();
    for (const auto& p : c.sweep) s.push_back({{"n", p.n}, {"k", p.k}});
    j["sweep"] = s;
  }
  j["trials"] = c.trials;
  j["mode"] = c.mode;
  j["construction"] = c.construction;
  if (c.K) j["K"] = to_json(*c.K);
  if (c.L) j["L"] = to_json(*c.L);
  if (c.K_section) j["K_section"] = detail::matrix_json(*c.K_section);
  if (c.L_section) j["L_section"] = detail::matrix_json(*c.L_section);
  if (c.section_bound) j["section_bound"] = *c.section_bound;
  j["a_frac"] = c.a_frac;
  j["core_radius"] = c.core_radius;
  j["truncation_radius"] = c.truncation_radius;
  j["C_ref"] = c.C_ref;
  j["hypothesis_probes"] = c.hypothesis_probes;
  j["optimizer"] = detail::to_json(c.optimizer);
  if (c.schedule) j["schedule"] = *c.schedule;
  return j;
}

/// Checks a schedule block {n, k, a_frac?, C1_sched?, c2_sched?}; throws
/// InfeasibleConfiguration when it cannot be met.
inline ScheduleParams schedule_from_json(const json& j) {
  detail::FieldReader r(j, "schedule");
  int n = static_cast<int>(r.integer("n"));
  int k = static_cast<int>(r.integer("k"));
  BoundConstants c;
  c.a_frac = r.number("a_frac", c.a_frac);
  c.C1_sched = r.number("C1_sched", c.C1_sched);
  c.c2_sched = r.number("c2_sched", c.c2_sched);
  r.finish();
  return theorem_schedule(n, k, c);
}

struct TwoBodiesSetup {
  BodyOracle K;
  BodyOracle L;
  Subspace K_section;
  Subspace L_section;
  int m = 0;  ///< codimension of L's declared section
};

namespace detail {

inline Subspace section_or_default(const std::optional<Mat>& rows, int n, int k_default, const char* key) {
  if (!rows) return Subspace::coordinate(n, k_default);
  if (rows->cols() != n) throw InvalidSpec(key, "rows must have length n");
  try {
    return Subspace::from_rows(*rows);
  } catch (const DomainError& e) {
    throw InvalidSpec(key, e.what());
  }
}

}  // namespace detail

inline TwoBodiesSetup two_bodies_setup(const TwoBodiesConfig& c, int n, int k) {
  const int m = static_cast<int>(std::ceil(c.a_frac * k - 1e-12));
  if (c.construction == "cylinder") {
    if (n - m < 1) throw InfeasibleConfiguration("cylinder construction needs n - ceil(a*k) >= 1");
    auto Ks = detail::cylinder_spec(n, k, c.core_radius, c.truncation_radius);
    auto Ls = detail::cylinder_spec(n, n - m, c.core_radius, c.truncation_radius);
    return {construct_body(*Ks), construct_body(*Ls), Subspace::coordinate(n, k), Subspace::coordinate(n, n - m), m};
  }
  BodyOracle K = construct_body(*c.K);
  BodyOracle L = construct_body(*c.L);
  if (K.dim() != n || L.dim() != n) throw InvalidSpec("n", "body dimensions must equal n");
  Subspace EK = detail::section_or_default(c.K_section, n, k, "K_section");
  Subspace EL = detail::section_or_default(c.L_section, n, std::max(1, n - m), "L_section");
  return {K, L, EK, EL, n - EL.dim()};
}

inline ExperimentReport run_two_bodies(const TwoBodiesConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "two-bodies";
  rep.config = to_json(c);
  rep.seed = seed;
  if (c.schedule) rep.summary["schedule"] = to_json(schedule_from_json(*c.schedule));

  const bool dual = c.mode == "dual";
  rep.trials.columns = {"trial", "n", "k", "diameter", "success", "truncation_active", "upper_bracket"};
  if (dual) {
    rep.trials.columns.push_back("inclusion_radius");
    rep.trials.columns.push_back("duality_product");
  }
  auto pairs = c.sweep.empty() ? std::vector<DimPair>{{c.n, c.k}} : c.sweep;
  json sweep_summary = json::array();

  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const int n = pairs[pi].n;
    const int k = pairs[pi].k;
    TwoBodiesSetup s = two_bodies_setup(c, n, k);
    json hyp = json::object();
    BodyOracle Kd = s.K;
    BodyOracle Ld = s.L;
    if (dual) {
      // Projection hypotheses PK ⊇ PD and QL ⊇ QD; the primal bodies are the polars.
      check_projection_hypothesis(s.K, s.K_section, c.hypothesis_probes, detail::trial_seed(seed, pi, 90));
      check_projection_hypothesis(s.L, s.L_section, c.hypothesis_probes, detail::trial_seed(seed, pi, 91));
      hyp["projection_hypotheses"] = "verified on sampled directions";
      Kd = polar(s.K);
      Ld = polar(s.L);
    } else {
      auto dk = section_diameter(s.K, s.K_section, c.optimizer, detail::trial_seed(seed, pi, 92));
      auto dl = section_diameter(s.L, s.L_section, c.optimizer, detail::trial_seed(seed, pi, 93));
      hyp["K_section_dim"] = s.K_section.dim();
      hyp["K_section_diameter"] = number_json(dk.diameter);
      hyp["L_section_dim"] = s.L_section.dim();
      hyp["L_section_diameter"] = number_json(dl.diameter);
      for (auto* d : {&dk, &dl}) {
        bool bad = d->truncation_active || (c.section_bound && d->diameter > *c.section_bound * (1.0 + 1e-9));
        if (bad) {
          throw HypothesisFailure("declared section is not bounded (diameter " + format_number(d->diameter) + ")",
                                  d->direction);
        }
      }
    }
    const double bound = std::pow(c.C_ref, static_cast<double>(n) / k);
    auto rows = detail::run_trials(c.trials, [&](std::size_t t) {
      const std::size_t global = pi * c.trials + t;
      Rotation U = haar_rotation(n, detail::trial_seed(seed, global));
      auto d = diameter_of_intersection(Kd, Ld, U.matrix, c.optimizer, detail::trial_seed(seed, global, 1));
      std::vector<double> row{static_cast<double>(global), static_cast<double>(n), static_cast<double>(k),
                              d.diameter, d.diameter <= bound ? 1.0 : 0.0, d.truncation_active ? 1.0 : 0.0, d.upper};
      if (dual) {
        auto inc = inclusion_radius(s.K, s.L, U.matrix, c.optimizer, detail::trial_seed(seed, global, 2));
        row.push_back(inc.radius);
        row.push_back(inc.radius * d.diameter);
      }
      return row;
    });
    std::vector<double> diams;
    std::size_t ok = 0;
    std::size_t truncated = 0;
    for (auto& row : rows) {
      diams.push_back(row[3]);
      ok += row[4] > 0.5;
      truncated += row[5] > 0.5;
      rep.trials.rows.push_back(std::move(row));
    }
    json entry = {{"n", n}, {"k", k}, {"n_over_k", static_cast<double>(n) / k}, {"m", s.m}, {"hypotheses", hyp}};
    entry["diameter"] = quantile_summary(diams);
    if (!diams.empty()) {
      const double kn = static_cast<double>(k) / n;
      entry["C_fit"] = number_json(std::pow(quantile(diams, 1.0), kn));
      entry["C_fit_p95"] = number_json(std::pow(quantile(diams, 0.95), kn));
    }
    entry["C_ref"] = c.C_ref;
    entry["reference_bound"] = number_json(bound);
    entry["success"] = estimate_json(proportion(ok, diams.size()));
    entry["truncated_trials"] = truncated;
    sweep_summary.push_back(entry);
  }
  if (pairs.size() == 1) {
    for (auto it = sweep_summary[0].begin(); it != sweep_summary[0].end(); ++it) rep.summary[it.key()] = it.value();
  } else {
    rep.summary["sweep"] = sweep_summary;
  }
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Random sections.

struct SectionsConfig {
  BodySpec K;
  int k_exist = 1;
  std::optional<Mat> exist_section;
  std::vector<int> k_query;
  std::size_t trials = 200;
  std::vector<double> thresholds;
  double C_ref = 2.0;
  OptimizerConfig optimizer;
};

inline SectionsConfig sections_config_from_json(const json& j) {
  detail::FieldReader r(j);
  SectionsConfig c;
  c.K = r.body("K");
  c.k_exist = static_cast<int>(r.integer("k_exist"));
  if (r.has("exist_section")) c.exist_section = r.matrix("exist_section");
  for (double q : r.numbers("k_query")) {
    if (q != std::floor(q)) throw InvalidSpec("k_query", "must be integers");
    c.k_query.push_back(static_cast<int>(q));
  }
  c.trials = static_cast<std::size_t>(r.integer("trials", static_cast<long long>(c.trials)));
  if (r.has("thresholds")) c.thresholds = r.numbers("thresholds");
  c.C_ref = r.number("C_ref", c.C_ref);
  if (r.has("optimizer")) c.optimizer = detail::optimizer_from_json(r.raw("optimizer"));
  r.finish();
  const int n = construct_body(c.K).dim();
  detail::require_range(c.k_exist, 1, n, "k_exist");
  for (int q : c.k_query) detail::require_range(q, 1, n, "k_query");
  if (c.k_query.empty()) throw InvalidSpec("k_query", "empty list");
  detail::require_range(static_cast<long long>(c.trials), 0, 1000000, "trials");
  return c;
}

inline json to_json(const SectionsConfig& c) {
  json j = {{"K", to_json(c.K)}, {"k_exist", c.k_exist}};
  if (c.exist_section) j["exist_section"] = detail::matrix_json(*c.exist_section);
  j["k_query"] = c.k_query;
  j["trials"] = c.trials;
  j["thresholds"] = c.thresholds;
  j["C_ref"] = c.C_ref;
  j["optimizer"] = detail::to_json(c.optimizer);
  return j;
}

inline ExperimentReport run_sections(const SectionsConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "sections";
  rep.config = to_json(c);
  rep.seed = seed;
  BodyOracle K = construct_body(c.K);
  const int n = K.dim();
  Subspace E0 = detail::section_or_default(c.exist_section, n, c.k_exist, "exist_section");
  if (E0.dim() != c.k_exist) throw InvalidSpec("exist_section", "must have k_exist rows");
  auto d0 = section_diameter(K, E0, c.optimizer, detail::trial_seed(seed, 0, 80));
  if (d0.truncation_active || !std::isfinite(d0.diameter)) {
    throw HypothesisFailure("declared section is unbounded", d0.direction);
  }
  rep.summary["existing_section"] = {{"dim", c.k_exist}, {"diameter", number_json(d0.diameter)}};

  rep.trials.columns = {"trial", "n", "k", "diameter", "success", "truncation_active"};
  json per_k = json::array();
  std::vector<double> medians;
  for (std::size_t qi = 0; qi < c.k_query.size(); ++qi) {
    const int kq = c.k_query[qi];
    const double bound = std::pow(c.C_ref, static_cast<double>(n) / kq);
    auto rows = detail::run_trials(c.trials, [&](std::size_t t) {
      const std::size_t global = qi * c.trials + t;
      Rng rng = make_rng(detail::trial_seed(seed, global), 0);
      Subspace E = random_subspace(n, kq, rng);
      auto d = section_diameter(K, E, c.optimizer, detail::trial_seed(seed, global, 1));
      return std::vector<double>{static_cast<double>(global), static_cast<double>(n), static_cast<double>(kq),
                                 d.diameter, d.diameter <= bound ? 1.0 : 0.0, d.truncation_active ? 1.0 : 0.0};
    });
    std::vector<double> diams;
    for (auto& row : rows) {
      diams.push_back(row[3]);
      rep.trials.rows.push_back(std::move(row));
    }
    json entry = {{"n", n}, {"k", kq}, {"n_over_k", static_cast<double>(n) / kq}, {"diameter", quantile_summary(diams)}};
    json exceed = json::array();
    for (double th : c.thresholds) {
      std::size_t cnt = 0;
      for (double d : diams) cnt += d > th;
      exceed.push_back({{"threshold", th}, {"probability", estimate_json(proportion(cnt, diams.size()))}});
    }
    entry["exceedance"] = exceed;
    per_k.push_back(entry);
    if (!diams.empty()) medians.push_back(quantile(diams, 0.5));
  }
  rep.summary["by_k"] = per_k;
  // Lower-dimensional random sections should not get wider.
  std::vector<std::pair<double, double>> trend;
  for (std::size_t i = 0; i < medians.size(); ++i) trend.emplace_back(static_cast<double>(n) / c.k_query[i], medians[i]);
  std::sort(trend.begin(), trend.end());
  bool monotone = true;
  for (std::size_t i = 1; i < trend.size(); ++i) monotone = monotone && trend[i].second <= trend[i - 1].second + 1e-9;
  rep.summary["median_nonincreasing_in_n_over_k"] = monotone;
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Core lemma.

struct CoreLemmaConfig {
  BodySpec K;
  BodySpec L;
  double delta_K = 0.3;
  double delta_L = 0.3;
  std::size_t trials = 500;
  std::size_t sigma_samples = 200000;
  CoveringOptions covering;
  OptimizerConfig optimizer;
};

inline CoreLemmaConfig core_lemma_config_from_json(const json& j) {
  detail::FieldReader r(j);
  CoreLemmaConfig c;
  c.K = r.body("K");
  c.L = r.body("L");
  c.delta_K = r.number("delta_K");
  c.delta_L = r.number("delta_L");
  c.trials = static_cast<std::size_t>(r.integer("trials", static_cast<long long>(c.trials)));
  c.sigma_samples = static_cast<std::size_t>(r.integer("sigma_samples", static_cast<long long>(c.sigma_samples)));
  if (r.has("covering")) {
    detail::FieldReader cr(r.raw("covering"), "covering");
    c.covering.interior_probes = static_cast<std::size_t>(cr.integer("interior_probes", 20000));
    c.covering.boundary_probes = static_cast<std::size_t>(cr.integer("boundary_probes", 5000));
    c.covering.max_centers = static_cast<std::size_t>(cr.integer("max_centers", 100000));
    cr.finish();
  }
  if (r.has("optimizer")) c.optimizer = detail::optimizer_from_json(r.raw("optimizer"));
  r.finish();
  if (!(c.delta_K >= 0.0) || !(c.delta_L >= 0.0)) throw InvalidSpec("delta_K", "deltas must be nonnegative");
  if (!(c.delta_K + c.delta_L < 1.0)) throw InfeasibleConfiguration("core lemma requires delta_K + delta_L < 1");
  if (c.sigma_samples < 1) throw InvalidSpec("sigma_samples", "must be >= 1");
  return c;
}

inline json to_json(const CoreLemmaConfig& c) {
  return {{"K", to_json(c.K)},
          {"L", to_json(c.L)},
          {"delta_K", c.delta_K},
          {"delta_L", c.delta_L},
          {"trials", c.trials},
          {"sigma_samples", c.sigma_samples},
          {"covering",
           {{"interior_probes", c.covering.interior_probes},
            {"boundary_probes", c.covering.boundary_probes},
            {"max_centers", c.covering.max_centers}}},
          {"optimizer", detail::to_json(c.optimizer)}};
}

inline ExperimentReport run_core_lemma(const CoreLemmaConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "core";
  rep.config = to_json(c);
  rep.seed = seed;
  rep.trials.columns = {"trial", "net_ok", "inclusion_radius", "success"};
  if (c.trials == 0) {
    rep.wall_time_seconds = clock.seconds();
    return rep;
  }
  BodyOracle K = construct_body(c.K);
  BodyOracle L = construct_body(c.L);
  if (K.dim() != L.dim()) throw DimensionMismatch(K.dim(), L.dim());
  const int n = K.dim();

  // 𝒩 with D ⊆ 𝒩 + L + δ_L·D.
  CoveringOptions copt = c.covering;
  copt.seed = detail::trial_seed(seed, 0, 70);
  CoveringResult cover = covering_number_upper(ball(n), neighborhood(L, c.delta_L), copt);
  const std::size_t N = cover.count;
  Estimate inside = mc_sigma_body(K, c.delta_K, c.sigma_samples, detail::trial_seed(seed, 0, 71));
  const double sigma_hat = 1.0 - inside.value;
  const double target = 1.0 - c.delta_K - c.delta_L;

  auto rows = detail::run_trials(c.trials, [&](std::size_t t) {
    Rotation U = haar_rotation(n, detail::trial_seed(seed, t));
    bool net_ok = true;
    for (const auto& z : cover.centers) {
      if (K.distance(U.matrix * z) > c.delta_K) {
        net_ok = false;
        break;
      }
    }
    auto inc = inclusion_radius(K, L, U.matrix, c.optimizer, detail::trial_seed(seed, t, 1));
    return std::vector<double>{static_cast<double>(t), net_ok ? 1.0 : 0.0, inc.radius,
                               inc.radius >= target - 1e-9 ? 1.0 : 0.0};
  });
  std::size_t fails = 0;
  std::size_t net_fails = 0;
  for (auto& row : rows) {
    net_fails += row[1] < 0.5;
    fails += row[3] < 0.5;
    rep.trials.rows.push_back(std::move(row));
  }
  Estimate fail = proportion(fails, c.trials);
  Estimate net_fail = proportion(net_fails, c.trials);
  const double bound = static_cast<double>(N) * sigma_hat;
  const double slack = 3.0 * std::hypot(fail.standard_error, static_cast<double>(N) * inside.standard_error);
  rep.summary["net_size"] = N;
  rep.summary["sigma_hat"] = estimate_json({sigma_hat, inside.standard_error});
  rep.summary["target_radius"] = target;
  rep.summary["failure_rate"] = estimate_json(fail);
  rep.summary["net_failure_rate"] = estimate_json(net_fail);
  rep.summary["bound_N_sigma"] = number_json(bound);
  rep.summary["slack_3se"] = number_json(slack);
  rep.summary["bound_vacuous"] = bound >= 1.0;
  rep.summary["bound_holds"] = fail.value <= bound + slack;
  rep.summary["net_bound_holds"] = net_fail.value <= bound + slack;
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Higher sphere.

struct Cap {
  Vec center;  ///< unit vector in R^{n+1}
  double radius = 0.0;
};

/// A symmetric subset A of S^n: either a union of caps ±(center, radius) or
/// the canonical subsphere S^j.
struct SphereSet {
  std::vector<Cap> caps;
  int subsphere_dim = -1;  ///< ≥ 0 selects the subsphere S^j

  /// Geodesic distance from a unit x ∈ R^{m+1} (m ≥ n) to A ⊂ S^n ⊂ S^m.
  double distance(const Vec& x, int n) const {
    if (subsphere_dim >= 0) {
      double in = x.head(subsphere_dim + 1).norm();
      return std::acos(std::clamp(in, -1.0, 1.0));
    }
    Vec w = x.head(n + 1);
    double len = w.norm();
    if (len == 0.0) return kPi / 2;
    Vec wu = w / len;
    double best = -1.0;
    for (const auto& cap : caps) {
      for (double s : {1.0, -1.0}) {
        double ang = geodesic_distance(wu, s * cap.center);
        best = std::max(best, len * std::cos(std::max(0.0, ang - cap.radius)));
      }
    }
    return std::acos(std::clamp(best, -1.0, 1.0));
  }
};

struct HigherSphereConfig {
  std::string set_type = "random_caps";  ///< caps | subsphere | random_caps
  std::vector<Cap> caps;
  int subsphere_dim = 0;
  int cap_count_min = 1;
  int cap_count_max = 4;
  double cap_radius_min = 0.05;
  double cap_radius_max = 0.6;
  int n = 2;  ///< A ⊂ S^n
  int m = 4;  ///< comparison sphere S^m, m ≥ n
  double theta = 0.3;
  std::size_t samples = 200000;
  std::size_t claim_samples = 100000;
  std::size_t configurations = 1;
  bool randomize_dims = false;  ///< per configuration: n ∈ [n_min, n_max], m ∈ [n, n + m_extra_max], θ ∈ [theta_min, theta_max]
  int n_min = 2;
  int n_max = 6;
  int m_extra_max = 4;
  double theta_min = 0.05;
  double theta_max = 0.6;
};

inline HigherSphereConfig higher_sphere_config_from_json(const json& j) {
  detail::FieldReader r(j);
  HigherSphereConfig c;
  c.set_type = r.string("set", c.set_type);
  if (r.has("caps")) {
    const json& arr = r.raw("caps");
    if (!arr.is_array()) throw InvalidSpec("caps", "must be an array");
    for (const auto& e : arr) {
      detail::FieldReader er(e, "caps");
      Cap cap{from_std(er.numbers("center")), er.number("radius")};
      er.finish();
      if (cap.center.norm() == 0.0) throw InvalidSpec("center", "zero vector");
      cap.center.normalize();
      if (!(cap.radius >= 0.0 && cap.radius <= kPi / 2)) throw InvalidSpec("radius", "must lie in [0, pi/2]");
      c.caps.push_back(cap);
    }
  }
  c.subsphere_dim = static_cast<int>(r.integer("subsphere_dim", c.subsphere_dim));
  c.cap_count_min = static_cast<int>(r.integer("cap_count_min", c.cap_count_min));
  c.cap_count_max = static_cast<int>(r.integer("cap_count_max", c.cap_count_max));
  c.cap_radius_min = r.number("cap_radius_min", c.cap_radius_min);
  c.cap_radius_max = r.number("cap_radius_max", c.cap_radius_max);
  c.n = static_cast<int>(r.integer("n", c.n));
  c.m = static_cast<int>(r.integer("m", c.m));
  c.theta = r.number("theta", c.theta);
  c.samples = static_cast<std::size_t>(r.integer("samples", static_cast<long long>(c.samples)));
  c.claim_samples = static_cast<std::size_t>(r.integer("claim_samples", static_cast<long long>(c.claim_samples)));
  c.configurations = static_cast<std::size_t>(r.integer("configurations", static_cast<long long>(c.configurations)));
  c.randomize_dims = r.boolean("randomize_dims", c.randomize_dims);
  c.n_min = static_cast<int>(r.integer("n_min", c.n_min));
  c.n_max = static_cast<int>(r.integer("n_max", c.n_max));
  c.m_extra_max = static_cast<int>(r.integer("m_extra_max", c.m_extra_max));
  c.theta_min = r.number("theta_min", c.theta_min);
  c.theta_max = r.number("theta_max", c.theta_max);
  r.finish();
  if (c.set_type != "caps" && c.set_type != "subsphere" && c.set_type != "random_caps") {
    throw InvalidSpec("set", "must be caps, subsphere or random_caps");
  }
  detail::require_range(c.n, 1, kMaxBodyDim, "n");
  detail::require_range(c.m, c.n, kMaxBodyDim, "m");
  if (c.set_type == "caps") {
    if (c.caps.empty()) throw InvalidSpec("caps", "empty list");
    for (const auto& cap : c.caps) {
      if (cap.center.size() != c.n + 1) throw InvalidSpec("center", "caps live in R^{n+1}");
    }
  }
  if (c.set_type == "subsphere") detail::require_range(c.subsphere_dim, 0, c.n - 1, "subsphere_dim");
  if (!(c.theta > 0.0 && c.theta <= kPi / 2)) throw InvalidSpec("theta", "must lie in (0, pi/2]");
  if (c.samples < 1) throw InvalidSpec("samples", "must be >= 1");
  if (c.cap_count_min < 1 || c.cap_count_max < c.cap_count_min) throw InvalidSpec("cap_count_min", "bad range");
  if (c.randomize_dims) {
    detail::require_range(c.n_min, 1, kMaxBodyDim, "n_min");
    detail::require_range(c.n_max, c.n_min, kMaxBodyDim, "n_max");
    if (!(c.theta_min > 0 && c.theta_max >= c.theta_min && c.theta_max <= kPi / 2)) {
      throw InvalidSpec("theta_min", "bad range");
    }
  }
  return c;
}

inline json to_json(const HigherSphereConfig& c) {
  json j = {{"set", c.set_type}};
  if (!c.caps.empty()) {
    json caps = json::array();
    for (const auto& cap : c.caps) caps.push_back({{"center", to_std(cap.center)}, {"radius", cap.radius}});
    j["caps"] = caps;
  }
  j["subsphere_dim"] = c.subsphere_dim;
  j["cap_count_min"] = c.cap_count_min;
  j["cap_count_max"] = c.cap_count_max;
  j["cap_radius_min"] = c.cap_radius_min;
  j["cap_radius_max"] = c.cap_radius_max;
  j["n"] = c.n;
  j["m"] = c.m;
  j["theta"] = c.theta;
  j["samples"] = c.samples;
  j["claim_samples"] = c.claim_samples;
  j["configurations"] = c.configurations;
  j["randomize_dims"] = c.randomize_dims;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["m_extra_max"] = c.m_extra_max;
  j["theta_min"] = c.theta_min;
  j["theta_max"] = c.theta_max;
  return j;
}

inline Estimate mc_set_neighborhood(const SphereSet& A, int n, int m, double theta, std::size_t samples,
                                    std::uint64_t seed) {
  std::size_t hits = count_hits(samples, seed, [&](Rng& rng) {
    return A.distance(uniform_on_sphere(m + 1, rng), n) <= theta;
  });
  return proportion(hits, samples);
}

/// Counts x ∈ S^m with d(x₁, A) > d(x, A), x₁ the spherical projection to S^n.
inline std::size_t claim_violations(const SphereSet& A, int n, int m, std::size_t samples, std::uint64_t seed) {
  if (m == n) return 0;
  return count_hits(samples, seed, [&](Rng& rng) {
    Vec x = uniform_on_sphere(m + 1, rng);
    if (x.head(n + 1).norm() <= 1e-12) return false;
    Vec x1 = Vec::Zero(m + 1);
    x1.head(n + 1) = spherical_projection(x, n + 1);
    return A.distance(x1, n) > A.distance(x, n) + 1e-12;
  });
}

inline ExperimentReport run_higher_sphere(const HigherSphereConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "higher-sphere";
  rep.config = to_json(c);
  rep.seed = seed;
  rep.trials.columns = {"trial", "n", "m", "theta", "caps", "lhs", "lhs_se", "rhs", "rhs_se", "holds", "claim_violations",
                        "lhs_exact", "rhs_exact"};
  std::size_t holds = 0;
  std::size_t total_violations = 0;
  for (std::size_t t = 0; t < c.configurations; ++t) {
    Rng rng = make_rng(detail::trial_seed(seed, t), 0);
    int n = c.n;
    int m = c.m;
    double theta = c.theta;
    if (c.randomize_dims) {
      n = std::uniform_int_distribution<int>(c.n_min, c.n_max)(rng);
      m = n + std::uniform_int_distribution<int>(0, c.m_extra_max)(rng);
      theta = std::uniform_real_distribution<double>(c.theta_min, c.theta_max)(rng);
    }
    SphereSet A;
    double lhs_exact = std::nan("");
    double rhs_exact = std::nan("");
    if (c.set_type == "subsphere") {
      A.subsphere_dim = std::min(c.subsphere_dim, n - 1);
      lhs_exact = sigma_exact(n, A.subsphere_dim, theta);
      rhs_exact = sigma_exact(m, A.subsphere_dim, theta);
    } else if (c.set_type == "caps") {
      A.caps = c.caps;
    } else {
      int count = std::uniform_int_distribution<int>(c.cap_count_min, c.cap_count_max)(rng);
      std::uniform_real_distribution<double> rad(c.cap_radius_min, c.cap_radius_max);
      for (int i = 0; i < count; ++i) A.caps.push_back({uniform_on_sphere(n + 1, rng), rad(rng)});
    }
    Estimate lhs = mc_set_neighborhood(A, n, n, theta, c.samples, detail::trial_seed(seed, t, 1));
    Estimate rhs = mc_set_neighborhood(A, n, m, theta, c.samples, detail::trial_seed(seed, t, 2));
    const double slack = 4.0 * std::hypot(lhs.standard_error, rhs.standard_error);
    const bool ok = lhs.value + slack >= rhs.value;
    std::size_t viol = claim_violations(A, n, m, c.claim_samples, detail::trial_seed(seed, t, 3));
    holds += ok;
    total_violations += viol;
    rep.trials.rows.push_back({static_cast<double>(t), static_cast<double>(n), static_cast<double>(m), theta,
                               static_cast<double>(A.caps.size()), lhs.value, lhs.standard_error, rhs.value,
                               rhs.standard_error, ok ? 1.0 : 0.0, static_cast<double>(viol), lhs_exact, rhs_exact});
  }
  rep.summary["configurations"] = c.configurations;
  rep.summary["inequality_holds"] = holds;
  rep.summary["slack"] = "4 combined standard errors";
  rep.summary["claim_samples_per_configuration"] = c.claim_samples;
  rep.summary["claim_violations"] = total_violations;
  rep.summary["all_hold"] = holds == c.configurations && total_violations == 0;
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Projection (waist) inequality.

struct ProjectionConfig {
  BodySpec K;
  int k = 2;
  std::optional<Mat> P;  ///< rows spanning E; default leading coordinates
  std::vector<double> eps{0.1};
  std::size_t samples = 200000;
  std::size_t waist_samples = 10000;
  std::size_t hypothesis_probes = 2000;
};

inline ProjectionConfig projection_config_from_json(const json& j) {
  detail::FieldReader r(j);
  ProjectionConfig c;
  c.K = r.body("K");
  c.k = static_cast<int>(r.integer("k"));
  if (r.has("P")) c.P = r.matrix("P");
  c.eps = r.numbers("eps");
  c.samples = static_cast<std::size_t>(r.integer("samples", static_cast<long long>(c.samples)));
  c.waist_samples = static_cast<std::size_t>(r.integer("waist_samples", static_cast<long long>(c.waist_samples)));
  c.hypothesis_probes = static_cast<std::size_t>(r.integer("hypothesis_probes", static_cast<long long>(c.hypothesis_probes)));
  r.finish();
  const int n = construct_body(c.K).dim();
  detail::require_range(c.k, 1, n - 1, "k");
  for (double e : c.eps) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidSpec("eps", "must lie in (0, 1)");
  }
  if (c.samples < 1) throw InvalidSpec("samples", "must be >= 1");
  return c;
}

inline json to_json(const ProjectionConfig& c) {
  json j = {{"K", to_json(c.K)}, {"k", c.k}};
  if (c.P) j["P"] = detail::matrix_json(*c.P);
  j["eps"] = c.eps;
  j["samples"] = c.samples;
  j["waist_samples"] = c.waist_samples;
  j["hypothesis_probes"] = c.hypothesis_probes;
  return j;
}

inline ExperimentReport run_projection(const ProjectionConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "projection";
  rep.config = to_json(c);
  rep.seed = seed;
  BodyOracle K = construct_body(c.K);
  const int n = K.dim();
  Subspace P = detail::section_or_default(c.P, n, c.k, "P");
  if (P.dim() != c.k) throw InvalidSpec("P", "must have k rows");
  check_projection_hypothesis(K, P, c.hypothesis_probes, detail::trial_seed(seed, 0, 60));

  rep.trials.columns = {"trial", "eps", "lhs", "lhs_se", "rhs", "equality_value", "holds", "equality_z"};
  std::size_t holds = 0;
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    const double eps = c.eps[i];
    const double theta = std::asin(eps);
    Estimate lhs = mc_sigma_body(K, eps, c.samples, detail::trial_seed(seed, i));
    const double rhs = c.k >= 2 ? sigma_lip_lower(n - 1, c.k - 1, theta) : std::nan("");
    const double eq = sigma_exact(n - 1, c.k - 1, theta);
    const bool ok = std::isnan(rhs) || lhs.value + 4.0 * lhs.standard_error >= rhs;
    holds += ok;
    const double z = lhs.standard_error > 0 ? (lhs.value - eq) / lhs.standard_error : (lhs.value == eq ? 0.0 : kInf);
    rep.trials.rows.push_back({static_cast<double>(i), eps, lhs.value, lhs.standard_error, rhs, eq, ok ? 1.0 : 0.0, z});
  }
  rep.summary["inequality_holds"] = holds;
  rep.summary["rows"] = c.eps.size();
  rep.summary["slack"] = "4 standard errors";

  // Lifted waist on sampled points of S^{k−1}.
  std::size_t outside = 0;
  double odd_err = 0.0;
  double fiber_err = 0.0;
  double min_norm = kInf;
  Rng rng = make_rng(detail::trial_seed(seed, 0, 61), 0);
  for (std::size_t i = 0; i < c.waist_samples; ++i) {
    Vec x = uniform_on_sphere(c.k, rng);
    Lift a = lift_waist(K, P, x);
    Lift b = lift_waist(K, P, Vec(-x));
    odd_err = std::max(odd_err, (a.g + b.g).norm());
    fiber_err = std::max(fiber_err, (P.coords(a.g) - x).norm());
    min_norm = std::min(min_norm, a.g.norm());
    if (!K.membership(a.f)) ++outside;
  }
  rep.summary["waist"] = {{"samples", c.waist_samples},
                          {"containment_violations", outside},
                          {"oddness_max_error", odd_err},
                          {"fiber_max_error", fiber_err},
                          {"min_lift_norm", number_json(min_norm)}};
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Global volume ratio.

struct GlobalVrConfig {
  BodySpec K;
  std::optional<BodySpec> L;  ///< default: cylinder over core_radius·B^k on the leading coordinates
  int k = 1;
  std::size_t trials = 50;
  std::size_t volume_samples = 1000000;
  double core_radius = 0.5;
  double truncation_radius = kDefaultTruncation;
  double C_ref = 2.0;
  OptimizerConfig optimizer;
};

inline GlobalVrConfig global_vr_config_from_json(const json& j) {
  detail::FieldReader r(j);
  GlobalVrConfig c;
  c.K = r.body("K");
  if (r.has("L")) c.L = r.body("L");
  c.k = static_cast<int>(r.integer("k"));
  c.trials = static_cast<std::size_t>(r.integer("trials", static_cast<long long>(c.trials)));
  c.volume_samples = static_cast<std::size_t>(r.integer("volume_samples", static_cast<long long>(c.volume_samples)));
  c.core_radius = r.number("core_radius", c.core_radius);
  c.truncation_radius = r.number("truncation_radius", c.truncation_radius);
  c.C_ref = r.number("C_ref", c.C_ref);
  if (r.has("optimizer")) c.optimizer = detail::optimizer_from_json(r.raw("optimizer"));
  r.finish();
  const int n = construct_body(c.K).dim();
  detail::require_range(c.k, 1, n - 1, "k");
  if (c.volume_samples < 1) throw InvalidSpec("volume_samples", "must be >= 1");
  if (!(c.core_radius > 0.0)) throw InvalidSpec("core_radius", "must be strictly positive");
  return c;
}

inline json to_json(const GlobalVrConfig& c) {
  json j = {{"K", to_json(c.K)}};
  if (c.L) j["L"] = to_json(*c.L);
  j["k"] = c.k;
  j["trials"] = c.trials;
  j["volume_samples"] = c.volume_samples;
  j["core_radius"] = c.core_radius;
  j["truncation_radius"] = c.truncation_radius;
  j["C_ref"] = c.C_ref;
  j["optimizer"] = detail::to_json(c.optimizer);
  return j;
}

inline ExperimentReport run_global_vr(const GlobalVrConfig& c, std::uint64_t seed) {
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.experiment = "global-vr";
  rep.config = to_json(c);
  rep.seed = seed;
  BodyOracle K = construct_body(c.K);
  const int n = K.dim();
  const int k = c.k;
  Estimate A = volume_ratio(K, c.volume_samples, detail::trial_seed(seed, 0, 50));
  BodyOracle Kp = difference_body(K);
  Estimate vK = mc_volume(K, c.volume_samples, detail::trial_seed(seed, 0, 50));
  Estimate vKp = mc_volume(Kp, c.volume_samples, detail::trial_seed(seed, 0, 51));
  const double ratio = vKp.value / vK.value;
  const double ratio_se = ratio * std::hypot(vKp.standard_error / vKp.value, vK.standard_error / vK.value);
  const double rs = binomial(2 * n, n);
  rep.summary["volume_ratio"] = estimate_json(A);
  rep.summary["volume_K"] = estimate_json(vK);
  rep.summary["volume_difference_body"] = estimate_json(vKp);
  rep.summary["rogers_shephard_ratio"] = estimate_json({ratio, ratio_se});
  rep.summary["rogers_shephard_bound"] = rs;
  rep.summary["rogers_shephard_holds"] = ratio <= rs + 3.0 * ratio_se;

  // K − K ⊇ 2D; the harness runs on (K − K)/2, which contains D.
  BodyOracle Kh = scale_body(Kp, 0.5);
  BodyOracle L = c.L ? construct_body(*c.L)
                     : construct_body(*detail::cylinder_spec(n, k, c.core_radius, c.truncation_radius));
  if (L.dim() != n) throw InvalidSpec("L", "dimension must match K");
  rep.trials.columns = {"trial", "n", "k", "diameter", "success", "truncation_active", "upper_bracket"};
  const double bound = std::pow(c.C_ref, static_cast<double>(n) / k);
  auto rows = detail::run_trials(c.trials, [&](std::size_t t) {
    Rotation U = haar_rotation(n, detail::trial_seed(seed, t));
    auto d = diameter_of_intersection(Kh, L, U.matrix, c.optimizer, detail::trial_seed(seed, t, 1));
    return std::vector<double>{static_cast<double>(t), static_cast<double>(n), static_cast<double>(k), d.diameter,
                               d.diameter <= bound ? 1.0 : 0.0, d.truncation_active ? 1.0 : 0.0, d.upper};
  });
  std::vector<double> diams;
  for (auto& row : rows) {
    diams.push_back(row[3]);
    rep.trials.rows.push_back(std::move(row));
  }
  rep.summary["diameter"] = quantile_summary(diams);
  const double base = 2.0 * A.value;
  rep.summary["base_2A"] = base;
  if (!diams.empty() && base > 1.0) {
    const double kn = static_cast<double>(k) / n;
    rep.summary["beta_fit"] = number_json(kn * std::log(quantile(diams, 1.0)) / std::log(base));
    rep.summary["beta_fit_p95"] = number_json(kn * std::log(quantile(diams, 0.95)) / std::log(base));
  }
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

}  // namespace waistlab
