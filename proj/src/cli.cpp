#include "rotorkick/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rotorkick/errors.hpp"
#include "rotorkick/io.hpp"
#include "rotorkick/observables.hpp"
#include "rotorkick/parallel.hpp"
#include "rotorkick/propagator.hpp"
#include "rotorkick/reduced.hpp"
#include "rotorkick/sudden.hpp"

namespace rotorkick::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;
using Clock = std::chrono::steady_clock;

/// Populations closer than this to the maximum count as tied.
constexpr double kTieTolerance = 1e-6;

struct Grid {
  double lo = 0.0, hi = 0.0;
  int n = 1;

  std::vector<double> points() const { return observables::linspace(lo, hi, n); }
};

// "lo:hi:n" or a single value.
Grid parse_grid(const std::string& text, const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  try {
    Grid g;
    if (parts.size() == 1) {
      g.lo = g.hi = std::stod(parts[0]);
      g.n = 1;
    } else if (parts.size() == 3) {
      g.lo = std::stod(parts[0]);
      g.hi = std::stod(parts[1]);
      g.n = std::stoi(parts[2]);
    } else {
      throw InputError("");
    }
    if (g.n < 1 || g.lo > g.hi || !std::isfinite(g.lo) || !std::isfinite(g.hi)) throw InputError("");
    if (g.n == 1 && g.lo != g.hi) throw InputError("");
    return g;
  } catch (const std::exception&) {
    throw InputError(name + ": expected lo:hi:n with lo <= hi and n >= 1, or a single value; got '" + text + "'");
  }
}

std::pair<double, double> parse_range(const std::string& text, const std::string& name) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw InputError("");
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (!(lo > 0.0) || !(hi > lo)) throw InputError("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw InputError(name + ": expected lo:hi with 0 < lo < hi; got '" + text + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat `key = value` file; keys are flag names without the leading dashes.
// Values only fill options that were not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw InputError(path + ": config files cannot include other config files");
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw InputError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for " + sub.get_name());
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

Json resolved_args(const CLI::App& sub) {
  Json args = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      args[name] = r.size() == 1 ? Json(r[0]) : Json(r);
    } else {
      args[name] = opt->get_default_str();
    }
  }
  return args;
}

struct Session {
  CLI::App* sub = nullptr;
  Clock::time_point start = Clock::now();

  Json sidecar(Json extra = Json::object()) const {
    Json j;
    j["command"] = sub->get_name();
    j["args"] = resolved_args(*sub);
    j["version"] = io::version();
    j["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
  }

  void write(const fs::path& path, const std::string& body, Json extra = Json::object()) const {
    io::write_text(path, body);
    io::write_text(io::sidecar_path(path), sidecar(std::move(extra)).dump(2) + "\n");
    std::cout << "wrote " << path.string() << "\n";
  }
};

fs::path with_suffix(const fs::path& out, const std::string& suffix, const std::string& ext) {
  return out.parent_path() / (out.stem().string() + suffix + ext);
}

struct KickArgs {
  double p_eta = 0.0, p_zeta = 0.0;
  double sigma = 0.0;
  CLI::Option* sigma_opt = nullptr;
  int j_max = 0;
  int j0 = 0, m0 = 0;

  bool has_sigma() const { return sigma_opt != nullptr && sigma_opt->count() > 0; }
  KickStrengths kick() const {
    KickStrengths k{p_eta, p_zeta};
    k.validate();
    return k;
  }
};

void add_kick_flags(CLI::App* sub, KickArgs& a, bool with_sigma) {
  sub->add_option("--p-eta", a.p_eta, "orienting kick strength")->check(CLI::NonNegativeNumber);
  sub->add_option("--p-zeta", a.p_zeta, "aligning kick strength")->check(CLI::NonNegativeNumber);
  if (with_sigma) {
    a.sigma_opt = sub->add_option("--sigma", a.sigma, "Gaussian pulse width; omit for a delta kick")
                      ->check(CLI::PositiveNumber);
  }
  sub->add_option("--j-max", a.j_max, "basis cutoff; 0 selects it automatically")->check(CLI::NonNegativeNumber);
}

// Post-pulse state: delta kick, or a propagated Gaussian pulse when --sigma is set.
Wavepacket prepare_state(const KickArgs& a) {
  const KickStrengths kick = a.kick();
  if (!a.has_sigma()) return sudden::delta_kick(InitialState{}, kick, a.j_max);
  const int jm = a.j_max > 0 ? a.j_max : sudden::auto_j_max(kick);
  auto cfg = propagator::PropagatorConfig::defaults(jm, a.sigma);
  cfg.record_stride = propagator::PropagatorConfig::kRecordNone;
  return propagator::propagate(InitialState{}, propagator::pulse_for_kicks(kick, a.sigma), cfg).final_state;
}

struct QuiltCell {
  double p_eta = 0.0, p_zeta = 0.0;
  int dominant_j = -1;
  double dominant_pop = 0.0;
  double j2 = 0.0;
  bool tie = false;
  std::vector<std::pair<int, double>> top3;
  std::string error;
};

QuiltCell quilt_cell(double pe, double pz, const KickArgs& a) {
  QuiltCell cell;
  cell.p_eta = pe;
  cell.p_zeta = pz;
  try {
    KickArgs local = a;
    local.p_eta = pe;
    local.p_zeta = pz;
    const Wavepacket wp = prepare_state(local);
    auto pops = observables::populations(wp);
    std::stable_sort(pops.begin(), pops.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    const double top = pops.front().second;
    cell.dominant_j = pops.front().first;
    cell.dominant_pop = top;
    for (const auto& [j, p] : pops) {
      if (j == cell.dominant_j || top - p > kTieTolerance) continue;
      cell.tie = true;
      if (j < cell.dominant_j) {
        cell.dominant_j = j;
        cell.dominant_pop = p;
      }
    }
    for (std::size_t k = 0; k < 3 && k < pops.size(); ++k) cell.top3.push_back(pops[k]);
    cell.j2 = observables::kinetic_energy(wp);
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

std::string quilt_csv(const std::vector<QuiltCell>& cells) {
  std::string s =
      "p_eta,p_zeta,dominant_j,dominant_pop,j2,tie_flag,top1_j,top1_pop,top2_j,top2_pop,top3_j,top3_pop,error\n";
  for (const auto& c : cells) {
    s += io::format_double(c.p_eta) + ',' + io::format_double(c.p_zeta) + ',';
    if (c.error.empty()) {
      s += std::to_string(c.dominant_j) + ',' + io::format_double(c.dominant_pop) + ',' + io::format_double(c.j2) +
           ',' + (c.tie ? "1" : "0");
    } else {
      s += ",,,";
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (k < c.top3.size()) {
        s += ',' + std::to_string(c.top3[k].first) + ',' + io::format_double(c.top3[k].second);
      } else {
        s += ",,";
      }
    }
    s += ',' + csv_quote(c.error) + '\n';
  }
  return s;
}

reduced::Engine parse_engine(const std::string& name) {
  return name == "full" ? reduced::Engine::full : reduced::Engine::two_level;
}

int dispatch(CLI::App& app, const std::vector<std::string>& argv_tail) {
  std::string config;
  std::string out;
  int workers = 0;

  auto add_common = [&](CLI::App* sub, const std::string& default_out) {
    out = default_out;
    sub->add_option("--out", out, "output CSV path");
    sub->add_option("--workers", workers, "worker threads; 0 uses all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--config", config, "flat key = value file; command-line flags take precedence");
  };

  // kick
  KickArgs kick_a;
  std::string method = "quadrature";
  int k_max = sudden::kSeriesDefaultKMax;
  auto* kick = app.add_subcommand("kick", "post-kick wavepacket in the sudden limit");
  add_kick_flags(kick, kick_a, false);
  kick->add_option("--j0", kick_a.j0, "initial J")->check(CLI::NonNegativeNumber);
  kick->add_option("--m0", kick_a.m0, "initial M");
  kick->add_option("--method", method, "phase-coefficient evaluation")->check(CLI::IsMember({"quadrature", "series"}));
  kick->add_option("--k-max", k_max, "series truncation shell")->check(CLI::Range(0, sudden::kSeriesMaxKMax));
  add_common(kick, "kick.csv");

  // propagate
  KickArgs prop_a;
  double dt = 0.0;
  int record_stride = 0;
  bool trajectory = false;
  auto* prop = app.add_subcommand("propagate", "finite Gaussian pulse, split-operator propagation");
  add_kick_flags(prop, prop_a, true);
  prop->add_option("--dt", dt, "time step; 0 uses the default")->check(CLI::NonNegativeNumber);
  prop->add_option("--record-stride", record_stride, "snapshot every n steps; 0 uses the default")
      ->check(CLI::NonNegativeNumber);
  prop->add_flag("--trajectory", trajectory, "also write recorded coefficients");
  add_common(prop, "propagate.csv");

  // quilt
  KickArgs quilt_a;
  std::string eta_grid = "0:10:11", zeta_grid = "0:10:11";
  auto* quilt = app.add_subcommand("quilt", "dominant state over a (P_eta, P_zeta) grid");
  quilt->add_option("--p-eta", eta_grid, "grid lo:hi:n");
  quilt->add_option("--p-zeta", zeta_grid, "grid lo:hi:n");
  quilt_a.sigma_opt = quilt->add_option("--sigma", quilt_a.sigma, "pulse width; omit for delta kicks")
                          ->check(CLI::PositiveNumber);
  quilt->add_option("--j-max", quilt_a.j_max, "basis cutoff; 0 selects it automatically")
      ->check(CLI::NonNegativeNumber);
  add_common(quilt, "quilt.csv");

  // carpet, series, spectrum
  KickArgs obs_a;
  int n_theta = 128, n_tau = 513;
  int beta_max = -1;
  std::vector<double> fractions{1.0, 0.5, 0.25};
  auto* carpet = app.add_subcommand("carpet", "|psi(theta, tau)|^2 over one revival");
  add_kick_flags(carpet, obs_a, true);
  carpet->add_option("--n-theta", n_theta, "Gauss-Legendre theta points")->check(CLI::Range(2, 4096));
  carpet->add_option("--n-tau", n_tau, "tau samples over [0, pi]")->check(CLI::Range(2, 1000000));
  carpet->add_option("--beta-max", beta_max, "also write characteristic rays up to this reflection index")
      ->check(CLI::NonNegativeNumber);
  carpet->add_option("--nu", fractions, "revival fractions for the fractional rays")->delimiter(',');
  add_common(carpet, "carpet.csv");

  int series_n_tau = 2001;
  auto* series = app.add_subcommand("series", "orientation and alignment cosines over one revival");
  add_kick_flags(series, obs_a, true);
  series->add_option("--n-tau", series_n_tau, "tau samples over [0, pi]")->check(CLI::Range(2, 10000000));
  add_common(series, "series.csv");

  auto* spectrum = app.add_subcommand("spectrum", "exact line spectra of orientation and alignment");
  add_kick_flags(spectrum, obs_a, true);
  add_common(spectrum, "spectrum.csv");

  // resonance, resonance-map
  KickArgs res_a;
  std::string sigma_range = "0.1:10";
  int n_sigma = 100;
  std::string engine = "two-level";
  auto* res = app.add_subcommand("resonance", "post-pulse <J^2> against pulse width");
  add_kick_flags(res, res_a, false);
  res->add_option("--sigma-range", sigma_range, "lo:hi, log-spaced");
  res->add_option("--n-sigma", n_sigma, "scan points")->check(CLI::Range(50, 100000));
  res->add_option("--engine", engine, "two-level or full")->check(CLI::IsMember({"two-level", "full"}));
  add_common(res, "resonance.csv");

  std::string map_eta = "0.5:12:47";
  std::string map_engine = "two-level";
  int map_n_sigma = 120;
  std::string map_sigma_range = "0.1:10";
  auto* rmap = app.add_subcommand("resonance-map", "resonance widths against P_eta (two-level model)");
  rmap->add_option("--p-eta", map_eta, "grid lo:hi:n");
  rmap->add_option("--sigma-range", map_sigma_range, "lo:hi, log-spaced");
  rmap->add_option("--n-sigma", map_n_sigma, "scan points per P_eta")->check(CLI::Range(50, 100000));
  rmap->add_option("--engine", map_engine, "only two-level is supported")->check(CLI::IsMember({"two-level"}));
  add_common(rmap, "resonance_map.csv");

  app.require_subcommand(1);

  try {
    std::vector<std::string> rev(argv_tail.rbegin(), argv_tail.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  // Defaults for --out differ per subcommand; recover the right one.
  if (sub->get_option("--out")->count() == 0) out = sub->get_option("--out")->get_default_str();
  if (!config.empty()) apply_config(*sub, config);

  Session session{sub, Clock::now()};
  const fs::path out_path(out);

  if (sub == kick) {
    const InitialState init{kick_a.j0, kick_a.m0};
    init.validate();
    const KickStrengths k = kick_a.kick();
    Wavepacket wp = Wavepacket::identity(InitialState{}, 0);
    if (method == "series") {
      const int jm = kick_a.j_max > 0 ? kick_a.j_max : sudden::auto_j_max(k, init);
      wp = sudden::kick_wavepacket(init, sudden::phase_coeffs_series(k, jm + init.j0, k_max), jm);
    } else {
      wp = sudden::delta_kick(init, k, kick_a.j_max);
    }
    io::write_text(out_path, io::wavepacket_csv(wp));
    Json side = io::wavepacket_json(wp);
    const Json run = session.sidecar();
    for (auto it = run.begin(); it != run.end(); ++it) side[it.key()] = it.value();
    io::write_text(io::sidecar_path(out_path), side.dump(2) + "\n");
    std::cout << "wrote " << out_path.string() << " (norm defect " << wp.norm_defect() << ")\n";
    return 0;
  }

  if (sub == prop) {
    if (!prop_a.has_sigma()) throw InputError("propagate: --sigma is required");
    const KickStrengths k = prop_a.kick();
    const int jm = prop_a.j_max > 0 ? prop_a.j_max : sudden::auto_j_max(k);
    auto cfg = propagator::PropagatorConfig::defaults(jm, prop_a.sigma);
    if (dt > 0.0) cfg.dt = dt;
    if (record_stride > 0) cfg.record_stride = record_stride;
    const auto pulse = propagator::pulse_for_kicks(k, prop_a.sigma);
    const auto result = propagator::propagate(InitialState{}, pulse, cfg);
    Json extra = {{"steps", result.steps},
                  {"active_steps", result.active_steps},
                  {"dt", result.dt},
                  {"norm_defect_max", result.norm_defect_max}};
    io::write_text(out_path, io::wavepacket_csv(result.final_state));
    Json side = io::wavepacket_json(result.final_state);
    for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
    const Json run = session.sidecar();
    for (auto it = run.begin(); it != run.end(); ++it) side[it.key()] = it.value();
    io::write_text(io::sidecar_path(out_path), side.dump(2) + "\n");
    std::cout << "wrote " << out_path.string() << "\n";
    session.write(with_suffix(out_path, "_kinetic", ".csv"), io::kinetic_csv(result.kinetic_series), extra);
    if (trajectory) {
      session.write(with_suffix(out_path, "_trajectory", ".csv"), io::trajectory_csv(result.trajectory), extra);
    }
    return 0;
  }

  if (sub == quilt) {
    const auto etas = parse_grid(eta_grid, "--p-eta").points();
    const auto zetas = parse_grid(zeta_grid, "--p-zeta").points();
    std::vector<QuiltCell> cells(etas.size() * zetas.size());
    parallel_for(cells.size(), workers, [&](std::size_t idx) {
      cells[idx] = quilt_cell(etas[idx / zetas.size()], zetas[idx % zetas.size()], quilt_a);
    });
    const auto failed = std::count_if(cells.begin(), cells.end(), [](const QuiltCell& c) { return !c.error.empty(); });
    session.write(out_path, quilt_csv(cells),
                  {{"cells", cells.size()}, {"failed_cells", failed}, {"tie_tolerance", kTieTolerance}});
    if (failed == static_cast<long>(cells.size())) {
      std::cerr << "error: every quilt cell failed; first error: " << cells.front().error << "\n";
      return 2;
    }
    return 0;
  }

  if (sub == carpet || sub == series || sub == spectrum) {
    const Wavepacket wp = prepare_state(obs_a);
    const Json prov = io::wavepacket_json(wp);
    if (sub == carpet) {
      const auto c = observables::carpet(wp, n_theta, n_tau);
      session.write(out_path, io::carpet_csv(c), {{"wavepacket", prov}});
      if (beta_max >= 0) {
        const auto rays = reduced::ray_set(wp, obs_a.kick(), beta_max, fractions);
        const fs::path ray_path = with_suffix(out_path, "_rays", ".json");
        Json j = io::rayset_json(rays);
        j["provenance"] = session.sidecar({{"wavepacket", prov}});
        io::write_text(ray_path, j.dump(2) + "\n");
        std::cout << "wrote " << ray_path.string() << "\n";
      }
    } else if (sub == series) {
      const auto taus = observables::linspace(0.0, observables::kRevivalTime, series_n_tau);
      const auto s = observables::observable_series(wp, taus);
      session.write(out_path, io::series_csv(s),
                    {{"wavepacket", prov}, {"alignment_pop", s.alignment_pop}, {"kinetic", s.kinetic}});
    } else {
      const std::vector<observables::LineSpectrum> spectra{
          observables::line_spectrum(wp, observables::Observable::orientation),
          observables::line_spectrum(wp, observables::Observable::alignment)};
      session.write(out_path, io::spectrum_csv(spectra), {{"wavepacket", prov}});
    }
    return 0;
  }

  if (sub == res) {
    const auto [lo, hi] = parse_range(sigma_range, "--sigma-range");
    reduced::ScanOptions opts;
    opts.workers = workers;
    opts.j_max = res_a.j_max;
    const auto scan = reduced::resonance_scan(res_a.kick(), lo, hi, n_sigma, parse_engine(engine), opts);
    session.write(out_path, io::scan_csv(scan));
    std::vector<reduced::ResonanceRow> rows;
    Json details = Json::array();
    for (const auto& r : scan.resonances) {
      rows.push_back({res_a.p_eta, r.sigma_r, r.order});
      details.push_back({{"sigma_r", r.sigma_r}, {"order", r.order}, {"energy", r.energy},
                         {"depth_decades", r.depth_decades}});
    }
    session.write(with_suffix(out_path, "_resonances", ".csv"), io::resonance_csv(rows), {{"resonances", details}});
    return 0;
  }

  if (sub == rmap) {
    const Grid g = parse_grid(map_eta, "--p-eta");
    const auto [lo, hi] = parse_range(map_sigma_range, "--sigma-range");
    const auto rows = reduced::resonance_map(g.lo, g.hi, g.n, lo, hi, map_n_sigma, workers);
    const double period = reduced::oscillation_period(rows, 1);
    session.write(out_path, io::resonance_csv(rows),
                  {{"oscillation_period", std::isfinite(period) ? Json(period) : Json(nullptr)}});
    return 0;
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Rigid-rotor dynamics under unipolar pulses: delta kicks, Gaussian pulses, observables",
               "rotorkick"};
  app.set_version_flag("--version", io::version());
  app.option_defaults()->always_capture_default();
  try {
    return dispatch(app, args);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace rotorkick::cli
