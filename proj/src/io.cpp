#include "rotorkick/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rotorkick/errors.hpp"

namespace rotorkick::io {

namespace fs = std::filesystem;

std::string version() { return ROTORKICK_VERSION; }

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw InputError("failed writing " + path.string());
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

Json provenance_json(const Provenance& meta) {
  Json j;
  j["origin"] = meta.origin;
  j["init"] = {{"j0", meta.init.j0}, {"m0", meta.init.m0}};
  if (meta.kick) {
    j["kick"] = {{"p_eta", meta.kick->p_eta}, {"p_zeta", meta.kick->p_zeta}};
  } else {
    j["kick"] = nullptr;
  }
  if (meta.pulse) {
    j["pulse"] = {{"eta0", meta.pulse->eta0},
                  {"zeta0", meta.pulse->zeta0},
                  {"sigma", meta.pulse->sigma},
                  {"tau0", meta.pulse->tau0}};
  } else {
    j["pulse"] = nullptr;
  }
  j["settings"] = meta.settings;
  return j;
}

Json wavepacket_json(const Wavepacket& wp) {
  Json j;
  j["m"] = wp.m();
  j["j_max"] = wp.j_max();
  j["norm_defect"] = wp.norm_defect();
  j["tail_population"] = wp.tail_population();
  j["provenance"] = provenance_json(wp.meta());
  j["version"] = version();
  return j;
}

std::string wavepacket_csv(const Wavepacket& wp) {
  std::string s = "J,re,im,population\n";
  for (int j = wp.j_min(); j <= wp.j_max(); ++j) {
    const cplx c = wp.coeff(j);
    s += std::to_string(j) + ',' + format_double(c.real()) + ',' + format_double(c.imag()) + ',' +
         format_double(std::norm(c)) + '\n';
  }
  return s;
}

void write_wavepacket(const Wavepacket& wp, const fs::path& csv, const Json& extra) {
  write_text(csv, wavepacket_csv(wp));
  Json side = wavepacket_json(wp);
  if (extra.is_object()) {
    for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
  }
  write_text(sidecar_path(csv), side.dump(2) + "\n");
}

namespace {

double parse_double(const std::string& field, const fs::path& path) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InputError("bad number '" + field + "' in " + path.string());
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

Wavepacket read_wavepacket(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw InputError("cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line != "J,re,im,population") {
    throw InputError(csv.string() + " is not a wavepacket CSV");
  }
  std::vector<std::pair<int, cplx>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) throw InputError("malformed row '" + line + "' in " + csv.string());
    rows.emplace_back(static_cast<int>(parse_double(f[0], csv)),
                      cplx(parse_double(f[1], csv), parse_double(f[2], csv)));
  }
  if (rows.empty()) throw InputError(csv.string() + " has no coefficients");

  int m = 0;
  Provenance meta;
  meta.origin = "csv";
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    std::ifstream sin(side);
    const Json j = Json::parse(sin, nullptr, false);
    if (j.is_discarded()) throw InputError("malformed sidecar " + side.string());
    m = j.value("m", 0);
    if (j.contains("provenance")) {
      const Json& p = j["provenance"];
      meta.origin = p.value("origin", std::string("csv"));
      meta.settings = p.value("settings", std::string());
      if (p.contains("init")) meta.init = {p["init"].value("j0", 0), p["init"].value("m0", 0)};
      if (p.contains("kick") && p["kick"].is_object()) {
        meta.kick = KickStrengths{p["kick"].value("p_eta", 0.0), p["kick"].value("p_zeta", 0.0)};
      }
      if (p.contains("pulse") && p["pulse"].is_object()) {
        const Json& q = p["pulse"];
        meta.pulse = GaussianPulse{q.value("eta0", 0.0), q.value("zeta0", 0.0), q.value("sigma", 1.0),
                                   q.value("tau0", 100.0)};
      }
    }
  }
  const int jmin = m < 0 ? -m : m;
  std::vector<cplx> coeffs(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].first != jmin + static_cast<int>(k)) {
      throw InputError(csv.string() + ": J column must run contiguously from |m|");
    }
    coeffs[k] = rows[k].second;
  }
  return Wavepacket(m, std::move(coeffs), std::move(meta));
}

std::string kinetic_csv(std::span<const std::pair<double, double>> series) {
  std::string s = "tau,J2_expect\n";
  for (const auto& [tau, e] : series) s += format_double(tau) + ',' + format_double(e) + '\n';
  return s;
}

std::string trajectory_csv(std::span<const propagator::Snapshot> snapshots) {
  std::string s = "tau,J,re,im\n";
  for (const auto& snap : snapshots) {
    const std::string tau = format_double(snap.tau);
    for (std::size_t j = 0; j < snap.coeffs.size(); ++j) {
      s += tau + ',' + std::to_string(j) + ',' + format_double(snap.coeffs[j].real()) + ',' +
           format_double(snap.coeffs[j].imag()) + '\n';
    }
  }
  return s;
}

std::string carpet_csv(const observables::Carpet& c) {
  std::string s = "theta/tau";
  for (double t : c.taus) s += ',' + format_double(t);
  s += '\n';
  for (std::size_t i = 0; i < c.thetas.size(); ++i) {
    s += format_double(c.thetas[i]);
    for (std::size_t t = 0; t < c.taus.size(); ++t) s += ',' + format_double(c.at(i, t));
    s += '\n';
  }
  return s;
}

std::string series_csv(const observables::ObservableSeries& ser) {
  std::string s = "tau,orientation,alignment_total,alignment_coherent\n";
  for (std::size_t i = 0; i < ser.taus.size(); ++i) {
    s += format_double(ser.taus[i]) + ',' + format_double(ser.orientation[i]) + ',' +
         format_double(ser.alignment[i]) + ',' + format_double(ser.alignment_coherent[i]) + '\n';
  }
  return s;
}

std::string spectrum_csv(std::span<const observables::LineSpectrum> spectra) {
  std::string s = "delta_e,amplitude,observable\n";
  for (const auto& sp : spectra) {
    for (const auto& [f, amp] : sp.entries) {
      s += std::to_string(f) + ',' + format_double(amp) + ',' + observables::to_string(sp.observable) + '\n';
    }
  }
  return s;
}

std::string scan_csv(const reduced::ResonanceScan& scan) {
  std::string s = "sigma,j2_post,engine\n";
  for (std::size_t i = 0; i < scan.sigmas.size(); ++i) {
    s += format_double(scan.sigmas[i]) + ',' + format_double(scan.energies[i]) + ',' +
         reduced::to_string(scan.engine) + '\n';
  }
  return s;
}

std::string resonance_csv(std::span<const reduced::ResonanceRow> rows) {
  std::string s = "p_eta,sigma_r,order\n";
  for (const auto& r : rows) {
    s += format_double(r.p_eta) + ',' + format_double(r.sigma_r) + ',' + std::to_string(r.order) + '\n';
  }
  return s;
}

Json rayset_json(const reduced::RaySet& rays) {
  Json j;
  j["j_bar"] = rays.j_bar;
  j["j_bar_rounded"] = rays.j_bar_rounded;
  j["tau_cl"] = rays.tau_cl;
  j["tau_f"] = rays.tau_f;
  j["tau_rf"] = rays.tau_rf;
  j["tau_rf_bracket"] = {rays.tau_rf_lo, rays.tau_rf_hi};
  j["tau_rf_approximate"] = rays.tau_rf_approximate;
  Json list = Json::array();
  for (const auto& r : rays.rays) {
    Json e;
    e["type"] = reduced::to_string(r.kind);
    if (r.kind == reduced::Ray::Kind::classical || r.kind == reduced::Ray::Kind::reversed) {
      e["beta"] = r.beta;
    } else {
      e["nu"] = r.nu;
    }
    Json pts = Json::array();
    for (const auto& [tau, theta] : r.points) pts.push_back({tau, theta});
    e["points"] = std::move(pts);
    list.push_back(std::move(e));
  }
  j["rays"] = std::move(list);
  return j;
}

}  // namespace rotorkick::io
