#pragma once

// Experiment config files: parse, validate, and report errors with the line
// they came from.

#include "waistlab/experiments.hpp"

#include <sstream>
#include <variant>

namespace waistlab {

using ExperimentConfig = std::variant<TwoBodiesConfig, SectionsConfig, CoreLemmaConfig, HigherSphereConfig,
                                      ProjectionConfig, GlobalVrConfig>;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"two-bodies", "sections", "core", "higher-sphere", "projection",
                                              "global-vr"};
  return names;
}

/// Parse or schema error; line is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::size_t line, std::string field = {})
      : Error(msg), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Line of the first occurrence of "key" used as an object key.
inline std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t after = text.find_first_not_of(" \t\r\n", pos + quoted.size());
    if (after != std::string::npos && text[after] == ':') return line_of_offset(text, pos);
    pos += quoted.size();
  }
  return 0;
}

inline std::string source_line(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  std::string s;
  for (std::size_t i = 0; i < line && std::getline(in, s); ++i) {
  }
  return s;
}

inline ConfigError located(const std::string& source, const std::string& text, std::size_t line, const std::string& what,
                           const std::string& field = {}) {
  std::string msg = source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what;
  if (line) {
    std::string src = source_line(text, line);
    src.erase(0, src.find_first_not_of(" \t"));
    msg += "\n  | " + src;
  }
  return ConfigError(msg, line, field);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const std::string& experiment, const json& j) {
  if (experiment == "two-bodies") {
    TwoBodiesConfig c = two_bodies_config_from_json(j);
    if (c.schedule) schedule_from_json(*c.schedule);  // infeasible schedules fail at load time
    return c;
  }
  if (experiment == "sections") return sections_config_from_json(j);
  if (experiment == "core") return core_lemma_config_from_json(j);
  if (experiment == "higher-sphere") return higher_sphere_config_from_json(j);
  if (experiment == "projection") return projection_config_from_json(j);
  if (experiment == "global-vr") return global_vr_config_from_json(j);
  throw DomainError("unknown experiment '" + experiment + "'");
}

inline json to_json(const ExperimentConfig& c) {
  return std::visit([](const auto& v) { return to_json(v); }, c);
}

/// Parses config text. Schema errors (InvalidSpec) and JSON syntax errors are
/// rethrown as ConfigError carrying the line; infeasible configurations pass
/// through unchanged.
inline ExperimentConfig parse_config(const std::string& text, const std::string& experiment,
                                     const std::string& source = "<config>") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw detail::located(source, text, detail::line_of_offset(text, e.byte ? e.byte - 1 : 0), e.what());
  }
  if (!j.is_object()) throw detail::located(source, text, 1, "config must be a JSON object");
  try {
    return config_from_json(experiment, j);
  } catch (const InvalidSpec& e) {
    throw detail::located(source, text, detail::line_of_key(text, e.field()), e.what(), e.field());
  } catch (const json::exception& e) {
    throw detail::located(source, text, 0, e.what());
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), experiment, path.string());
}

inline ExperimentReport run_experiment(const ExperimentConfig& c, std::uint64_t seed) {
  return std::visit(
      [seed](const auto& v) -> ExperimentReport {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TwoBodiesConfig>) return run_two_bodies(v, seed);
        if constexpr (std::is_same_v<T, SectionsConfig>) return run_sections(v, seed);
        if constexpr (std::is_same_v<T, CoreLemmaConfig>) return run_core_lemma(v, seed);
        if constexpr (std::is_same_v<T, HigherSphereConfig>) return run_higher_sphere(v, seed);
        if constexpr (std::is_same_v<T, ProjectionConfig>) return run_projection(v, seed);
        if constexpr (std::is_same_v<T, GlobalVrConfig>) return run_global_vr(v, seed);
      },
      c);
}

}  // namespace waistlab
