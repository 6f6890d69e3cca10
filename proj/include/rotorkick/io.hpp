#pragma once

// CSV and JSON export. Numbers use the shortest decimal form that reads back
// to the same double, so outputs are deterministic and lossless.

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rotorkick/observables.hpp"
#include "rotorkick/propagator.hpp"
#include "rotorkick/reduced.hpp"
#include "rotorkick/wavepacket.hpp"

namespace rotorkick::io {

using Json = nlohmann::ordered_json;

std::string version();

/// Shortest round-trip representation.
std::string format_double(double v);

/// Writes `content` to `path`, creating parent directories. Throws InputError
/// if the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& content);

/// `out.csv` -> `out.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

Json provenance_json(const Provenance& meta);
Json wavepacket_json(const Wavepacket& wp);

/// `J,re,im,population`
std::string wavepacket_csv(const Wavepacket& wp);

/// CSV plus JSON sidecar; `extra` keys are merged into the sidecar.
void write_wavepacket(const Wavepacket& wp, const std::filesystem::path& csv, const Json& extra = {});

/// Reads a CSV written by write_wavepacket. m and provenance come from the
/// sidecar when present.
Wavepacket read_wavepacket(const std::filesystem::path& csv);

/// `tau,J2_expect`
std::string kinetic_csv(std::span<const std::pair<double, double>> series);

/// `tau,J,re,im`, one row per stored coefficient.
std::string trajectory_csv(std::span<const propagator::Snapshot> snapshots);

/// First row `theta/tau,<taus...>`, then one row per theta.
std::string carpet_csv(const observables::Carpet& c);

/// `tau,orientation,alignment_total,alignment_coherent`
std::string series_csv(const observables::ObservableSeries& s);

/// `delta_e,amplitude,observable`
std::string spectrum_csv(std::span<const observables::LineSpectrum> spectra);

/// `sigma,j2_post,engine`
std::string scan_csv(const reduced::ResonanceScan& scan);

/// `p_eta,sigma_r,order`
std::string resonance_csv(std::span<const reduced::ResonanceRow> rows);

Json rayset_json(const reduced::RaySet& rays);

}  // namespace rotorkick::io
