#include "z2edge/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

namespace z2edge {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where,
                    std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw InvalidArgument(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string name = where + "." + key;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw InvalidArgument(name + ": expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InvalidArgument(name + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw InvalidArgument(name + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InvalidArgument(name + ": expected a string");
    }
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(name + ": " + e.what());
  }
}

template <typename T>
void read_list(const json& j, const char* key, const std::string& where,
               std::vector<T>& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string name = where + "." + key;
  if (!v.is_array()) throw InvalidArgument(name + ": expected an array");
  std::vector<T> values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    T x{};
    json holder = {{"item", v[i]}};
    read(holder, "item", name + "[" + std::to_string(i) + "]", x);
    values.push_back(x);
  }
  out = std::move(values);
}

void check(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

ModelSpec RunConfig::model_spec() const {
  ModelSpec s;
  s.mass = model.mass;
  s.lambda_r = model.lambda_r;
  s.disorder = model.disorder;
  s.seed = model.seed;
  s.geometry = LatticeGeometry::torus(model.lx, model.ly);
  return s;
}

IndexSettings RunConfig::index_settings() const {
  IndexSettings s;
  s.tol_sweep = tolerance.tol_sweep;
  s.plateau_decades = tolerance.plateau_decades;
  s.guard_factor = tolerance.guard_factor;
  s.filter_radius = tolerance.filter_radius;
  s.localization_threshold = tolerance.localization_threshold;
  s.edge_trace_margin = tolerance.edge_trace_margin;
  return s;
}

CompareSettings RunConfig::compare_settings() const {
  CompareSettings s;
  s.index = index_settings();
  s.gap_fraction = tolerance.gap_fraction;
  return s;
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) !=
         output.formats.end();
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  require_object(j, "config", {"model", "tolerance", "scan", "wold", "spectrum",
                               "transport", "output"});
  if (j.contains("model")) {
    const json& m = j["model"];
    require_object(m, "model",
                   {"mass", "lambda_r", "disorder", "seed", "lx", "ly", "mu"});
    read(m, "mass", "model", c.model.mass);
    read(m, "lambda_r", "model", c.model.lambda_r);
    read(m, "disorder", "model", c.model.disorder);
    read(m, "seed", "model", c.model.seed);
    read(m, "lx", "model", c.model.lx);
    read(m, "ly", "model", c.model.ly);
    read(m, "mu", "model", c.model.mu);
  }
  check(c.model.lx >= 2 && c.model.ly >= 2, "model: lx and ly must be at least 2");
  check(c.model.disorder >= 0.0, "model.disorder: must be non-negative");

  if (j.contains("tolerance")) {
    const json& t = j["tolerance"];
    require_object(t, "tolerance",
                   {"tol_sweep", "plateau_decades", "guard_factor", "filter_radius",
                    "localization_threshold", "edge_trace_margin", "gap_fraction",
                    "cluster_tol"});
    read_list(t, "tol_sweep", "tolerance", c.tolerance.tol_sweep);
    read(t, "plateau_decades", "tolerance", c.tolerance.plateau_decades);
    read(t, "guard_factor", "tolerance", c.tolerance.guard_factor);
    read(t, "filter_radius", "tolerance", c.tolerance.filter_radius);
    read(t, "localization_threshold", "tolerance", c.tolerance.localization_threshold);
    read(t, "edge_trace_margin", "tolerance", c.tolerance.edge_trace_margin);
    read(t, "gap_fraction", "tolerance", c.tolerance.gap_fraction);
    read(t, "cluster_tol", "tolerance", c.tolerance.cluster_tol);
  }
  check(!c.tolerance.tol_sweep.empty(), "tolerance.tol_sweep: must not be empty");
  for (double x : c.tolerance.tol_sweep) {
    check(x > 0.0 && x < 1.0, "tolerance.tol_sweep: entries must lie in (0, 1)");
  }
  check(c.tolerance.gap_fraction > 0.0 && c.tolerance.gap_fraction <= 1.0,
        "tolerance.gap_fraction: must lie in (0, 1]");
  check(c.tolerance.cluster_tol > 0.0, "tolerance.cluster_tol: must be positive");
  check(c.tolerance.localization_threshold > 0.0 &&
            c.tolerance.localization_threshold <= 1.0,
        "tolerance.localization_threshold: must lie in (0, 1]");
  check(c.tolerance.edge_trace_margin > 0.0 && c.tolerance.edge_trace_margin < 0.5,
        "tolerance.edge_trace_margin: must lie in (0, 0.5)");

  if (j.contains("scan")) {
    const json& s = j["scan"];
    require_object(s, "scan", {"mass", "variants"});
    read_list(s, "mass", "scan", c.scan.mass);
    if (s.contains("variants")) {
      const json& vs = s["variants"];
      check(vs.is_array(), "scan.variants: expected an array");
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string where = "scan.variants[" + std::to_string(i) + "]";
        require_object(vs[i], where, {"lambda_r", "disorder", "seeds"});
        ScanVariant v;
        read(vs[i], "lambda_r", where, v.lambda_r);
        read(vs[i], "disorder", where, v.disorder);
        read_list(vs[i], "seeds", where, v.seeds);
        check(!v.seeds.empty(), where + ".seeds: must not be empty");
        check(v.disorder >= 0.0, where + ".disorder: must be non-negative");
        c.scan.variants.push_back(v);
      }
    }
  }

  if (j.contains("wold")) {
    const json& w = j["wold"];
    require_object(w, "wold",
                   {"source", "input", "dimension", "sites", "arc_end", "depth"});
    read(w, "source", "wold", c.wold.source);
    read(w, "input", "wold", c.wold.input);
    read(w, "dimension", "wold", c.wold.dimension);
    read(w, "sites", "wold", c.wold.sites);
    read(w, "arc_end", "wold", c.wold.arc_end);
    read(w, "depth", "wold", c.wold.depth);
  }
  const std::set<std::string> sources = {"random", "ring", "synthetic", "file"};
  check(sources.count(c.wold.source) == 1,
        "wold.source: expected random, ring, synthetic or file");
  check(c.wold.depth >= 0, "wold.depth: must be non-negative");

  if (j.contains("spectrum")) {
    const json& s = j["spectrum"];
    require_object(s, "spectrum", {"k_points", "edge_tag_threshold",
                                   "resolution_fraction", "coverage_probes"});
    read(s, "k_points", "spectrum", c.spectrum.k_points);
    read(s, "edge_tag_threshold", "spectrum", c.spectrum.edge_tag_threshold);
    read(s, "resolution_fraction", "spectrum", c.spectrum.resolution_fraction);
    read(s, "coverage_probes", "spectrum", c.spectrum.coverage_probes);
  }
  check(c.spectrum.k_points > 0 && c.spectrum.k_points % 2 == 0,
        "spectrum.k_points: must be positive and even");
  check(c.spectrum.resolution_fraction > 0.0 && c.spectrum.resolution_fraction <= 1.0,
        "spectrum.resolution_fraction: must lie in (0, 1]");

  if (j.contains("transport")) {
    const json& t = j["transport"];
    require_object(t, "transport", {"x1", "x2", "times", "min_norm"});
    read(t, "x1", "transport", c.transport.x1);
    read(t, "x2", "transport", c.transport.x2);
    read_list(t, "times", "transport", c.transport.times);
    read(t, "min_norm", "transport", c.transport.min_norm);
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    require_object(o, "output", {"directory", "formats"});
    read(o, "directory", "output", c.output.directory);
    read_list(o, "formats", "output", c.output.formats);
  }
  for (const auto& f : c.output.formats) {
    check(f == "json" || f == "csv", "output.formats: expected json or csv, got " + f);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json variants = json::array();
  for (const auto& v : c.scan.variants) {
    variants.push_back({{"lambda_r", v.lambda_r}, {"disorder", v.disorder},
                        {"seeds", v.seeds}});
  }
  return {
      {"model",
       {{"mass", c.model.mass},
        {"lambda_r", c.model.lambda_r},
        {"disorder", c.model.disorder},
        {"seed", c.model.seed},
        {"lx", c.model.lx},
        {"ly", c.model.ly},
        {"mu", c.model.mu}}},
      {"tolerance",
       {{"tol_sweep", c.tolerance.tol_sweep},
        {"plateau_decades", c.tolerance.plateau_decades},
        {"guard_factor", c.tolerance.guard_factor},
        {"filter_radius", c.tolerance.filter_radius},
        {"localization_threshold", c.tolerance.localization_threshold},
        {"edge_trace_margin", c.tolerance.edge_trace_margin},
        {"gap_fraction", c.tolerance.gap_fraction},
        {"cluster_tol", c.tolerance.cluster_tol}}},
      {"scan", {{"mass", c.scan.mass}, {"variants", variants}}},
      {"wold",
       {{"source", c.wold.source},
        {"input", c.wold.input},
        {"dimension", c.wold.dimension},
        {"sites", c.wold.sites},
        {"arc_end", c.wold.arc_end},
        {"depth", c.wold.depth}}},
      {"spectrum",
       {{"k_points", c.spectrum.k_points},
        {"edge_tag_threshold", c.spectrum.edge_tag_threshold},
        {"resolution_fraction", c.spectrum.resolution_fraction},
        {"coverage_probes", c.spectrum.coverage_probes}}},
      {"transport",
       {{"x1", c.transport.x1},
        {"x2", c.transport.x2},
        {"times", c.transport.times},
        {"min_norm", c.transport.min_norm}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace z2edge
