#pragma once

#include <string>

#include "lci/types.hpp"

namespace lci {

// Tracks files are comma-separated, UTF-8, dot decimal separator, one row per
// (track, frame). Column set follows the public highD/exiD tracks convention
// plus optional ramp columns; docs/FORMATS.md lists them. A sidecar metadata
// file (see meta_path_for) carries recording id, location, sampling rate,
// dataset kind and speed limit.

// Sidecar path: "<stem>_tracks.csv" -> "<stem>_meta.csv", otherwise
// "<path>.meta.csv".
std::string meta_path_for(const std::string& tracks_path);

// Parses and validates a recording. Rows are grouped by track id in order of
// first appearance; frame order within a track must already be strictly
// increasing with unit stride (NonMonotonicFrames otherwise). Negative
// dhw/thw/ttc values are treated as absent (no-value sentinels in the public
// datasets). Missing sidecar falls back to defaults (id 0, location 0,
// 25 Hz, no speed limit).
Recording load_recording(const std::string& path, DatasetKind kind);

// Writes tracks + sidecar such that load_recording reproduces the recording
// field-for-field (floating values round-trip exactly via %.17g).
void write_recording(const Recording& rec, const std::string& path);

}  // namespace lci
