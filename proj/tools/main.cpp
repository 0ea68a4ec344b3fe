// z2edge command line: indices, bulk-edge scans, Wold runs and edge
// diagnostics. Outputs go to --out-dir only after a run succeeds.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "z2edge/bulk_index.hpp"
#include "z2edge/edge_index.hpp"
#include "z2edge/lattice_models.hpp"
#include "z2edge/matrix_io.hpp"
#include "z2edge/run_config.hpp"
#include "z2edge/spectra_diagnostics.hpp"
#include "z2edge/wold_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace z2edge;

namespace {

constexpr const char* proxy_note =
    "finite-size proxy; does not decide absolute continuity of the spectrum";

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int workers = 1;
};

// Files staged in memory and written together at the end of a run.
class Outputs {
 public:
  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }
  void commit(const std::string& dir) const {
    fs::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const fs::path tmp = fs::path(dir) / (name + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
      }
      fs::rename(tmp, fs::path(dir) / name);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

RunConfig resolve(const Common& common) {
  RunConfig cfg = common.config_path.empty() ? parse_config(json::object())
                                             : load_config(common.config_path);
  if (common.seed) cfg.model.seed = *common.seed;
  if (common.out_dir) cfg.output.directory = *common.out_dir;
  if (common.workers < 1) throw InvalidArgument("--workers must be at least 1");
  return cfg;
}

json report_header(const RunConfig& cfg, const std::string& command) {
  return {{"version", artifact_version}, {"command", command}, {"config", to_json(cfg)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json interval_json(const std::optional<Interval>& i) {
  if (!i) return nullptr;
  return {{"lower", i->lower}, {"upper", i->upper}};
}

json sweep_row_json(const SweepRow& r) {
  return {{"tol", r.tol}, {"count", r.count}, {"trace", r.trace}, {"resolved", r.resolved}};
}

json index_json(const IndexReport& r) {
  json modes = json::array();
  for (const auto& m : r.modes) {
    modes.push_back({{"index", m.index},
                     {"eigenvalue", m.eigenvalue},
                     {"distance_to_one", m.distance_to_one},
                     {"weight", m.weight},
                     {"radius90", m.radius90},
                     {"localized", m.localized}});
  }
  json sweep = json::array();
  for (const auto& s : r.sweep) sweep.push_back(sweep_row_json(s));
  json out = {{"z2", to_string(r.z2)},
              {"modes", modes},
              {"sweep", sweep},
              {"guard", r.guard ? sweep_row_json(*r.guard) : json(nullptr)},
              {"center", {r.center.x(), r.center.y()}},
              {"filter_radius", r.filter_radius},
              {"localization_threshold", r.localization_threshold},
              {"count_rule", to_string(r.rule)},
              {"exact_kernel_dim", r.exact_kernel_dim},
              {"pairing_residual", r.pairing_residual},
              {"checks", r.checks}};
  out["plateau"] = r.plateau ? json{r.plateau->first, r.plateau->second} : json(nullptr);
  return out;
}

std::string eigenvalue_csv(const RealVector& spectrum) {
  std::ostringstream out;
  out << "index,eigenvalue\n";
  for (Index i = 0; i < spectrum.size(); ++i) {
    out << i << ',' << format_number(spectrum(i)) << '\n';
  }
  return out.str();
}

ModelSpec with_geometry(const RunConfig& cfg, LatticeGeometry g) {
  ModelSpec s = cfg.model_spec();
  s.geometry = g;
  return s;
}

// Bulk gap: the Bloch spectrum for clean models, the torus spectrum
// otherwise.
std::optional<Interval> bulk_gap(const RunConfig& cfg) {
  const ModelSpec torus = cfg.model_spec();
  if (torus.disorder == 0.0) return bloch_gap(torus, cfg.model.mu);
  return spectral_gap(build_bulk_hamiltonian(torus), cfg.model.mu);
}

int cmd_index_bulk(const RunConfig& cfg, Outputs& out) {
  const ModelSpec spec = cfg.model_spec();
  const HermitianOperator h = build_bulk_hamiltonian(spec);
  const auto gap = spectral_gap(h, cfg.model.mu);
  json report = report_header(cfg, "index bulk");
  report["gap"] = interval_json(gap);
  if (!gap) {
    report["status"] = "no bulk gap at mu";
    report["z2"] = to_string(Z2Value::undetermined);
    if (cfg.wants("json")) out.add("bulk_index.json", dump(report));
    return 0;
  }
  const IndexReport r = bulk_index(h, build_time_reversal(spec.geometry), spec.geometry,
                                   cfg.model.mu, cfg.index_settings());
  report["status"] = "ok";
  report["index"] = index_json(r);
  report["z2"] = to_string(r.z2);
  if (cfg.wants("json")) out.add("bulk_index.json", dump(report));
  if (cfg.wants("csv")) out.add("bulk_eigenvalues.csv", eigenvalue_csv(r.spectrum));
  return 0;
}

int cmd_index_edge(const RunConfig& cfg, Outputs& out) {
  json report = report_header(cfg, "index edge");
  const auto gap = spectral_gap(build_bulk_hamiltonian(cfg.model_spec()), cfg.model.mu);
  report["gap"] = interval_json(gap);
  if (!gap) {
    report["status"] = "no bulk gap at mu";
    report["z2"] = to_string(Z2Value::undetermined);
    if (cfg.wants("json")) out.add("edge_index.json", dump(report));
    return 0;
  }
  const Interval delta = gap_window(*gap, cfg.model.mu, cfg.tolerance.gap_fraction);
  const ModelSpec spec =
      with_geometry(cfg, LatticeGeometry::cylinder(cfg.model.lx, cfg.model.ly));
  const HermitianOperator h_hat = build_half_space_hamiltonian(spec);
  const AntiUnitary tau = build_time_reversal(spec.geometry);
  const GapFunction g = make_gap_function(delta);
  const SpectralDecomposition h_spec = spectral_decomposition(h_hat);
  const IndexSettings settings = cfg.index_settings();
  const IndexReport r = edge_index(h_hat, tau, spec.geometry, g, settings);

  const UnitaryOperator u_e = edge_unitary(h_spec, g);
  const ProjectionOperator pi = quadrant_projection(spec.geometry);
  const CommutatorReport comm =
      commutator_decay_report(u_e.matrix(), pi.matrix(), spec.geometry);
  const LocalizationFilter filter{spec.geometry, r.center, r.filter_radius,
                                  r.localization_threshold, r.rule};
  const FredholmReport fred = fredholm_cross_check(u_e.matrix(), pi.matrix(), filter, settings);

  report["status"] = "ok";
  report["delta"] = interval_json(delta);
  report["index"] = index_json(r);
  report["z2"] = to_string(r.z2);
  auto profile = [](const DecayProfile& p) {
    return json{{"distance", p.distance},
                {"max_norm", p.max_norm},
                {"decay_length", std::isfinite(p.decay_length) ? json(p.decay_length)
                                                               : json("inf")},
                {"prefactor", p.prefactor}};
  };
  report["commutator"] = {{"from_cut", profile(comm.from_cut)},
                          {"from_edge", profile(comm.from_edge)},
                          {"trace_norm", comm.trace_norm},
                          {"hilbert_schmidt", comm.hilbert_schmidt},
                          {"identity_residual", comm.identity_residual}};
  json fsweep = json::array();
  for (const auto& s : fred.sweep) fsweep.push_back(sweep_row_json(s));
  report["fredholm"] = {{"z2", to_string(fred.z2)},
                        {"sweep", fsweep},
                        {"guard", fred.guard ? sweep_row_json(*fred.guard) : json(nullptr)},
                        {"kernel_candidates", fred.kernel_candidates},
                        {"max_correspondence_residual", fred.max_correspondence_residual},
                        {"correspondence_holds", fred.correspondence_holds}};
  if (cfg.wants("json")) out.add("edge_index.json", dump(report));
  if (cfg.wants("csv")) out.add("edge_eigenvalues.csv", eigenvalue_csv(r.spectrum));
  return 0;
}

std::vector<ModelSpec> scan_rows(const RunConfig& cfg) {
  const std::vector<double> masses =
      cfg.scan.mass.empty() ? std::vector<double>{cfg.model.mass} : cfg.scan.mass;
  std::vector<ScanVariant> variants = cfg.scan.variants;
  if (variants.empty()) {
    variants.push_back({cfg.model.lambda_r, cfg.model.disorder, {cfg.model.seed}});
  }
  std::vector<ModelSpec> rows;
  for (const auto& v : variants) {
    for (double m : masses) {
      // A clean variant does not depend on the seed; one row suffices.
      const std::size_t seeds = v.disorder == 0.0 ? 1 : v.seeds.size();
      for (std::size_t s = 0; s < seeds; ++s) {
        ModelSpec spec = cfg.model_spec();
        spec.mass = m;
        spec.lambda_r = v.lambda_r;
        spec.disorder = v.disorder;
        spec.seed = v.seeds[s];
        rows.push_back(spec);
      }
    }
  }
  return rows;
}

int cmd_index_compare(const RunConfig& cfg, int workers, Outputs& out) {
  const std::vector<ModelSpec> specs = scan_rows(cfg);
  std::vector<std::optional<BulkEdgeRow>> rows(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  const CompareSettings settings = cfg.compare_settings();
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        rows[i] = bulk_edge_check(specs[i], cfg.model.mu, settings);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(workers, int(specs.size())));
  for (int w = 0; w < n; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "row,mass,lambda_r,disorder,seed,lx,ly,mu,bulk,edge,fredholm,status,reason,"
         "gap_lower,gap_upper,delta_lower,delta_upper,bulk_exact_kernel,"
         "edge_exact_kernel\n";
  json table = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BulkEdgeRow& r = *rows[i];
    auto bound = [](const std::optional<Interval>& iv, bool lower) {
      return iv ? format_number(lower ? iv->lower : iv->upper) : std::string();
    };
    csv << i << ',' << format_number(r.spec.mass) << ',' << format_number(r.spec.lambda_r)
        << ',' << format_number(r.spec.disorder) << ',' << r.spec.seed << ','
        << r.spec.geometry.lx() << ',' << r.spec.geometry.ly() << ','
        << format_number(cfg.model.mu) << ',' << to_string(r.bulk) << ','
        << to_string(r.edge) << ',' << to_string(r.fredholm) << ','
        << to_string(r.status) << ',' << r.reason << ',' << bound(r.gap, true) << ','
        << bound(r.gap, false) << ',' << bound(r.delta, true) << ','
        << bound(r.delta, false) << ',' << r.bulk_exact_kernel << ','
        << r.edge_exact_kernel << '\n';
    table.push_back({{"row", i},
                     {"mass", r.spec.mass},
                     {"lambda_r", r.spec.lambda_r},
                     {"disorder", r.spec.disorder},
                     {"seed", r.spec.seed},
                     {"bulk", to_string(r.bulk)},
                     {"edge", to_string(r.edge)},
                     {"fredholm", to_string(r.fredholm)},
                     {"status", to_string(r.status)},
                     {"reason", r.reason},
                     {"gap", interval_json(r.gap)},
                     {"delta", interval_json(r.delta)},
                     {"bulk_exact_kernel", r.bulk_exact_kernel},
                     {"edge_exact_kernel", r.edge_exact_kernel}});
  }
  json report = report_header(cfg, "index compare");
  report["rows"] = table;
  if (cfg.wants("csv")) out.add("compare.csv", csv.str());
  if (cfg.wants("json")) out.add("compare.json", dump(report));
  return 0;
}

json chain_json(const ChainReport& c) {
  return {{"depth", c.depth},
          {"orthogonality_residual", c.orthogonality_residual},
          {"inclusion_residual", c.inclusion_residual},
          {"kramers_residual", c.kramers_residual},
          {"base_residual", c.base_residual},
          {"clean_depth", c.clean_depth},
          {"pass", c.pass}};
}

json shift_json(const ShiftReport& s) {
  return {{"depth", s.depth},
          {"forward_residual", s.forward_residual},
          {"backward_residual", s.backward_residual},
          {"cross_overlap", s.cross_overlap},
          {"equivalence_residual", s.equivalence_residual},
          {"invariance_residual", s.invariance_residual},
          {"rest_commutator", s.rest_commutator},
          {"chain_dimension", s.chain_basis.cols()},
          {"complement_dimension", s.complement_basis.cols()},
          {"clean_depth", s.clean_depth}};
}

int cmd_wold_run(const RunConfig& cfg, Outputs& out) {
  json report = report_header(cfg, "wold run");
  const int depth = cfg.wold.depth;
  std::vector<NamedMatrix> artifacts;

  if (cfg.wold.source == "synthetic") {
    const SyntheticShift s = synthetic_bilateral_shift(cfg.wold.sites);
    report["source"] = "synthetic";
    if (depth > 0) {
      report["chains"] =
          chain_json(chain_projections(s.w, s.p, s.tau, s.pi_plus, s.pi_minus, depth));
      report["shift"] = shift_json(shift_extraction(s.w, s.p, s.tau, s.pi_plus, depth));
    }
    artifacts.push_back({"W", s.w});
    artifacts.push_back({"P", s.p});
  } else {
    std::optional<SymmetricPair> pair;
    if (cfg.wold.source == "random") {
      pair.emplace(random_symmetric_pair(cfg.wold.dimension, cfg.model.seed));
    } else if (cfg.wold.source == "ring") {
      pair.emplace(ring_shift_pair(cfg.wold.sites, cfg.wold.arc_end));
    } else {
      const auto blocks = load_matrices(cfg.wold.input);
      pair.emplace(find_matrix(blocks, "U"), find_matrix(blocks, "P"),
                   AntiUnitary(find_matrix(blocks, "tau")));
    }
    const DecouplingResult d = decouple(*pair, cfg.tolerance.cluster_tol);
    json stability = json::array();
    for (const auto& [tol, dim] : d.stability) {
      stability.push_back({{"cluster_tol", tol}, {"e_plus_dimension", dim}});
    }
    json schatten = json::array();
    for (const auto& row : d.schatten) {
      schatten.push_back({{"p", row.p},
                          {"commutator_up", row.commutator_up},
                          {"u_minus_w", row.u_minus_w},
                          {"commutator_wp", row.commutator_wp},
                          {"bound", row.bound}});
    }
    report["source"] = cfg.wold.source;
    report["dimension"] = pair->dimension();
    report["classification"] = to_string(d.classification);
    report["e_plus_dimension"] = d.e_plus_dimension;
    report["e_minus_dimension"] = d.e_minus_dimension;
    report["stability"] = stability;
    report["schatten"] = schatten;
    report["checks"] = d.checks;
    if (d.pi_plus && d.pi_minus && depth > 0) {
      report["chains"] = chain_json(chain_projections(d.w, pair->p(), pair->tau(),
                                                      *d.pi_plus, *d.pi_minus, depth));
      report["shift"] =
          shift_json(shift_extraction(d.w, pair->p(), pair->tau(), *d.pi_plus, depth));
    }
    artifacts.push_back({"W", d.w});
    artifacts.push_back({"V", d.v});
  }
  if (cfg.wants("json")) out.add("wold_result.json", dump(report));
  std::ostringstream m;
  for (const auto& a : artifacts) write_matrix(m, a.name, a.value);
  out.add("wold_matrices.txt", m.str());
  return 0;
}

int cmd_edge_spectrum(const RunConfig& cfg, Outputs& out) {
  json report = report_header(cfg, "edge spectrum");
  report["proxy"] = proxy_note;
  const auto gap = bulk_gap(cfg);
  report["gap"] = interval_json(gap);
  if (!gap) {
    report["status"] = "no bulk gap at mu";
    if (cfg.wants("json")) out.add("spectrum.json", dump(report));
    return 0;
  }
  const Interval delta = gap_window(*gap, cfg.model.mu, cfg.tolerance.gap_fraction);
  report["delta"] = interval_json(delta);
  const ModelSpec spec =
      with_geometry(cfg, LatticeGeometry::cylinder(cfg.model.lx, cfg.model.ly));
  const SpectralDecomposition h = spectral_decomposition(build_half_space_hamiltonian(spec));
  const double resolution = cfg.spectrum.resolution_fraction * delta.width();
  report["gap_filling_fraction"] = gap_filling_fraction(h.eigenvalues, delta, resolution);
  report["resolution"] = resolution;

  std::ostringstream csv;
  csv << "k_index,k,band,energy,edge_weight,edge_tagged\n";
  if (spec.disorder == 0.0) {
    const BandStructure b =
        cylinder_bands(spec, cfg.spectrum.k_points, cfg.spectrum.edge_tag_threshold);
    const CoverageReport cov = branch_coverage(b, delta, cfg.spectrum.coverage_probes);
    report["bands"] = {{"kramers_residual", b.kramers_residual},
                       {"reflection_residual", b.reflection_residual},
                       {"coverage_fraction", cov.fraction},
                       {"eigenvalues_in_delta", cov.eigenvalues_in_delta},
                       {"max_edge_velocity", cov.max_edge_velocity}};
    for (Index j = 0; j < b.energies.rows(); ++j) {
      for (Index n = 0; n < b.energies.cols(); ++n) {
        csv << j << ',' << format_number(b.k[std::size_t(j)]) << ',' << n << ','
            << format_number(b.energies(j, n)) << ','
            << format_number(b.edge_weight(j, n)) << ',' << (b.edge_tagged(j, n) ? 1 : 0)
            << '\n';
      }
    }
  } else {
    report["bands"] = nullptr;
    report["bands_reason"] = "disordered spec breaks translation invariance";
  }
  report["status"] = "ok";
  if (cfg.wants("json")) out.add("spectrum.json", dump(report));
  if (cfg.wants("csv") && spec.disorder == 0.0) out.add("bands.csv", csv.str());
  return 0;
}

int cmd_edge_transport(const RunConfig& cfg, Outputs& out) {
  json report = report_header(cfg, "edge transport");
  report["proxy"] = proxy_note;
  const auto gap = bulk_gap(cfg);
  report["gap"] = interval_json(gap);
  if (!gap) {
    report["status"] = "no bulk gap at mu";
    if (cfg.wants("json")) out.add("transport.json", dump(report));
    return 0;
  }
  const Interval delta = gap_window(*gap, cfg.model.mu, cfg.tolerance.gap_fraction);
  report["delta"] = interval_json(delta);
  const ModelSpec spec =
      with_geometry(cfg, LatticeGeometry::cylinder(cfg.model.lx, cfg.model.ly));
  ModelSpec clean = spec;
  clean.disorder = 0.0;
  const double v_max = branch_coverage(cylinder_bands(clean, cfg.spectrum.k_points,
                                                      cfg.spectrum.edge_tag_threshold),
                                       delta, cfg.spectrum.coverage_probes)
                           .max_edge_velocity;
  report["v_max"] = v_max;
  if (!(v_max > 0.0)) {
    report["status"] = "no edge branches in Delta";
    if (cfg.wants("json")) out.add("transport.json", dump(report));
    return 0;
  }
  const HermitianOperator h = build_half_space_hamiltonian(spec);
  const SpectralDecomposition hs = spectral_decomposition(h);
  TransportSettings ts;
  ts.x1 = cfg.transport.x1;
  ts.x2 = cfg.transport.x2;
  ts.times = cfg.transport.times;
  ts.min_norm = cfg.transport.min_norm;
  TransportTrace tr;
  try {
    tr = ballistic_transport(h, hs, spec.geometry, build_time_reversal(spec.geometry),
                             delta, v_max, ts);
  } catch (const InvalidArgument& e) {
    // A trivial phase has nothing to propagate: data, not a tool failure.
    report["status"] = e.what();
    if (cfg.wants("json")) out.add("transport.json", dump(report));
    return 0;
  }
  double norm_err = 0.0, energy_err = 0.0;
  std::ostringstream csv;
  csv << "t,spread,mean,norm_error,energy_error\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    norm_err = std::max(norm_err, tr.norm_error[i]);
    energy_err = std::max(energy_err, tr.energy_error[i]);
    csv << format_number(tr.times[i]) << ',' << format_number(tr.spread[i]) << ','
        << format_number(tr.mean[i]) << ',' << format_number(tr.norm_error[i]) << ','
        << format_number(tr.energy_error[i]) << '\n';
  }
  report["status"] = "ok";
  report["alpha"] = tr.alpha;
  report["alpha_stderr"] = tr.alpha_stderr;
  report["alpha_band"] = {tr.alpha_low, tr.alpha_high};
  report["fit_points"] = tr.fit_points;
  report["wrap_time"] = tr.wrap_time;
  report["initial_norm"] = tr.initial_norm;
  report["trs_residual"] = tr.trs_residual;
  report["max_norm_error"] = norm_err;
  report["max_energy_error"] = energy_err;
  if (cfg.wants("json")) out.add("transport.json", dump(report));
  if (cfg.wants("csv")) out.add("transport.csv", csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Z2 bulk and edge indices, symmetric Wold decoupling, edge diagnostics"};
  app.set_version_flag("--version", artifact_version);
  app.require_subcommand(1);

  Common common;
  std::vector<double> tol_sweep;
  std::optional<double> filter_radius;
  std::string pair_input;
  std::optional<double> cluster_tol;
  std::optional<int> depth;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run config")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override model.seed");
    sub->add_option("--out-dir", common.out_dir, "Override output.directory");
    sub->add_option("--workers", common.workers, "Worker threads for scans");
  };
  auto add_index_flags = [&](CLI::App* sub) {
    sub->add_option("--tol-sweep", tol_sweep, "Sweep tolerances")->delimiter(',');
    sub->add_option("--filter-radius", filter_radius, "Localization filter radius");
  };

  auto* index = app.add_subcommand("index", "Z2 indices");
  index->require_subcommand(1);
  auto* bulk = index->add_subcommand("bulk", "Bulk index on the torus");
  auto* edge = index->add_subcommand("edge", "Edge index on the cylinder");
  auto* compare = index->add_subcommand("compare", "Bulk-edge scan");
  auto* wold = app.add_subcommand("wold", "Symmetric Wold decoupling");
  wold->require_subcommand(1);
  auto* wold_run = wold->add_subcommand("run", "Decouple a pair (U, P, tau)");
  auto* diag = app.add_subcommand("edge", "Edge diagnostics");
  diag->require_subcommand(1);
  auto* spectrum = diag->add_subcommand("spectrum", "Cylinder bands and gap filling");
  auto* transport = diag->add_subcommand("transport", "Edge wave-packet spreading");

  for (auto* sub : {bulk, edge, compare, wold_run, spectrum, transport}) add_common(sub);
  for (auto* sub : {bulk, edge, compare}) add_index_flags(sub);
  wold_run->add_option("--input", pair_input, "Matrix file with U, P, tau")
      ->check(CLI::ExistingFile);
  wold_run->add_option("--cluster-tol", cluster_tol, "Eigenvalue cluster tolerance");
  wold_run->add_option("--depth", depth, "Chain depth K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig cfg = resolve(common);
    if (!tol_sweep.empty()) cfg.tolerance.tol_sweep = tol_sweep;
    if (filter_radius) cfg.tolerance.filter_radius = *filter_radius;
    if (!pair_input.empty()) {
      cfg.wold.source = "file";
      cfg.wold.input = pair_input;
    }
    if (cluster_tol) cfg.tolerance.cluster_tol = *cluster_tol;
    if (depth) cfg.wold.depth = *depth;
    // Re-validate after overrides.
    cfg = parse_config(to_json(cfg));

    Outputs out;
    int code = 0;
    if (*bulk) code = cmd_index_bulk(cfg, out);
    else if (*edge) code = cmd_index_edge(cfg, out);
    else if (*compare) code = cmd_index_compare(cfg, common.workers, out);
    else if (*wold_run) code = cmd_wold_run(cfg, out);
    else if (*spectrum) code = cmd_edge_spectrum(cfg, out);
    else if (*transport) code = cmd_edge_transport(cfg, out);
    out.commit(cfg.output.directory);
    return code;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
