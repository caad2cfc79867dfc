#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lci/labeling.hpp"
#include "lci/types.hpp"

namespace lci {

// Synthetic highway corpus generator. Maneuver tracks follow a smooth
// lateral profile: a short pre-maneuver drift cue, then a smoothstep ramp
// into the adjacent lane, plus low-frequency lane wander whose per-step
// increments stay far below the labeling drift tolerance. Emitted ground
// truth therefore satisfies the detection rules by construction (threshold
// crossing, monotone drift, settled completion).
struct SynthConfig {
  int n_locations = 2;
  int tracks_per_location = 50;
  int lane_count = 3;
  double lane_width = 3.5;  // m
  // Upper bound on the fraction of tracks carrying a maneuver; 0 disables
  // events entirely.
  double maneuver_rate = 0.5;
  // Target No:Left:Right window ratio under the nominal labeling params
  // below; drives how many tracks maneuver, capped by maneuver_rate.
  std::array<double, 3> class_skew = {27.0, 1.0, 1.0};
  double ramp_fraction = 0.0;  // fraction of locations synthesized as ramps
  double noise_std = 0.03;     // lateral wander amplitude, m, <= 0.05
  std::uint64_t seed = 0;

  // Plumbing knobs; defaults suit desk-scale tests.
  double sampling_rate = 25.0;
  double track_duration_s = 40.0;
  double maneuver_duration_s = 3.0;
  double lead_in_s = 1.2;        // pre-maneuver drift cue duration
  double lead_in_offset = 0.15;  // pre-maneuver drift amplitude, m (< 0.2)
  double speed_limit = 33.3;     // m/s, recorded in metadata
  // Nominal labeling parameters used only to size class_skew targets.
  double nominal_history_s = 1.0;
  double nominal_horizon_s = 1.0;
  int nominal_stride = 1;

  void validate() const;  // throws Error{InfeasibleConfig} on bad geometry
};

struct SynthResult {
  Recording recording;
  std::vector<LaneChangeEvent> events;  // ground truth, time-ordered
};

// One recording for one location. Pure function of (cfg, location_id,
// recording_id): identical arguments give bit-identical output.
SynthResult synthesize_recording(const SynthConfig& cfg, int location_id = 0,
                                 int recording_id = 0);

// One recording per location; location i is a ramp site when the striped
// ramp_fraction quota selects it. Recording/location ids are 0-based.
std::vector<SynthResult> synthesize_corpus(const SynthConfig& cfg);

}  // namespace lci
