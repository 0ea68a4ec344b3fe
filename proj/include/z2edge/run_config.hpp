#pragma once

// Run configuration shared by every CLI subcommand. Parsing is strict:
// unknown keys and wrong types are errors; missing keys take the defaults
// below. The resolved config round-trips through JSON and is embedded in
// every report.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "z2edge/edge_index.hpp"
#include "z2edge/lattice_models.hpp"

namespace z2edge {

inline constexpr const char* artifact_version = "z2edge 0.1.0";

struct ModelBlock {
  double mass = 1.0;
  double lambda_r = 0.0;
  double disorder = 0.0;
  std::uint64_t seed = 1;
  int lx = 16;
  int ly = 16;
  double mu = 0.0;
};

struct ToleranceBlock {
  std::vector<double> tol_sweep = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double plateau_decades = 1.0;
  double guard_factor = 3.1622776601683795;
  double filter_radius = 0.0;       // <= 0: quarter of the system size
  double localization_threshold = 0.9;
  double edge_trace_margin = 0.25;
  double gap_fraction = 0.8;
  double cluster_tol = 1e-7;
};

// One family of compare rows: every mass in the scan with these disorder
// settings and each seed.
struct ScanVariant {
  double lambda_r = 0.0;
  double disorder = 0.0;
  std::vector<std::uint64_t> seeds = {1};
};

struct ScanBlock {
  std::vector<double> mass;         // empty: the model block alone
  std::vector<ScanVariant> variants;  // empty: the model block's disorder
};

struct WoldBlock {
  std::string source = "random";    // random | ring | synthetic | file
  std::string input;                // pair file for source = file
  int dimension = 16;               // random pair size
  int sites = 12;                   // ring and synthetic sizes
  int arc_end = 5;
  int depth = 4;                    // chain depth K, 0 disables chains
};

struct SpectrumBlock {
  int k_points = 256;
  double edge_tag_threshold = 0.5;
  double resolution_fraction = 0.02;  // bin width / |Delta|
  int coverage_probes = 101;
};

struct TransportBlock {
  int x1 = -1;
  int x2 = 0;
  std::vector<double> times;
  double min_norm = 0.1;
};

struct OutputBlock {
  std::string directory = "out";
  std::vector<std::string> formats = {"json", "csv"};
};

struct RunConfig {
  ModelBlock model;
  ToleranceBlock tolerance;
  ScanBlock scan;
  WoldBlock wold;
  SpectrumBlock spectrum;
  TransportBlock transport;
  OutputBlock output;

  // Model spec on a torus of the configured size.
  ModelSpec model_spec() const;
  IndexSettings index_settings() const;
  CompareSettings compare_settings() const;
  bool wants(const std::string& format) const;
};

// Throws InvalidArgument naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

// Deterministic number formatting for CSV output.
std::string format_number(double x);

}  // namespace z2edge
