#pragma once

#include <cstdint>
#include <vector>

#include "lci/feature_vector.hpp"
#include "lci/types.hpp"

namespace lci {

struct LaneChangeEvent {
  std::int32_t track_id = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  Direction direction = Direction::Left;
  std::int32_t lane_before = 0;
  std::int32_t lane_after = 0;
};

struct LabelingParams {
  double crossing_threshold = 0.2;  // m beyond the departed lane centerline
  double drift_duration = 0.5;      // s of monotone drift after the crossing
  double settle_duration = 1.0;     // s without reverse motion after entry
  double direction_window = 0.1;    // s of lat_velocity averaged for ramps
  double drift_tolerance = 0.02;    // m of per-step reversal absorbed as noise

  void validate() const;  // all positive
};

// Per-frame channels fed to the sequence encoder, in order:
// x_velocity, y_velocity, x_acceleration, y_acceleration, lat_velocity,
// lateral_lane_offset, dist_left_boundary, dist_right_boundary.
inline constexpr int kSequenceDim = 8;

struct LabeledWindow {
  std::int32_t track_id = 0;
  std::int64_t anchor_frame = 0;  // last frame of the history window
  double history_s = 0.0;         // W
  double horizon_s = 0.0;         // T
  int seq_steps = 0;              // round(W * f_s)
  std::vector<double> sequence;   // row-major seq_steps x kSequenceDim
  FeatureVector physics;          // filled by features::assemble
  LcClass label = LcClass::NoLc;

  double seq(int t, int c) const { return sequence[t * kSequenceDim + c]; }
};

// Lane-change event detection. Start: first rising edge where the offset
// from the departed lane centerline reaches crossing_threshold, followed by
// monotone (within drift_tolerance per step) same-direction drift for
// drift_duration. End: first frame inside the adjacent lane followed by
// settle_duration without reverse motion. Direction: lane-id rule for
// straight roads, mean lat_velocity for ramps. Events are non-overlapping
// and time-ordered.
std::vector<LaneChangeEvent> detect_events(const Track& track,
                                           const LabelingParams& params,
                                           DatasetKind kind, double f_s);

// Left iff lane_before < lane_after; throws Error{SameLane} when equal.
Direction direction_straight(std::int32_t lane_before, std::int32_t lane_after);

// Mean lat_velocity over [start_frame, start_frame + direction_window];
// positive => Left, otherwise Right. Throws Error{OutOfRange} when
// start_frame lies outside the track.
Direction direction_ramp(const Track& track, std::int64_t start_frame,
                         const LabelingParams& params, double f_s);

// One window per anchor at the given stride. An anchor needs a full history
// window; the horizon scan clips at track end (eligibility does not depend
// on T, which keeps LC-labeled anchors monotone in T). Label: direction of
// the event starting within (anchor, anchor + T*f_s], inclusive right edge,
// else NoLC. Windows whose anchor lies inside an event in progress, or whose
// history contains an event start, are dropped.
std::vector<LabeledWindow> label_windows(const Track& track,
                                         const std::vector<LaneChangeEvent>& events,
                                         double history_s, double horizon_s,
                                         double f_s, int stride = 1);

// Removes windows whose horizon (anchor, anchor + T*f_s] contains two or
// more event starts.
std::vector<LabeledWindow> consistency_filter(std::vector<LabeledWindow> windows,
                                              const std::vector<LaneChangeEvent>& events,
                                              double horizon_s, double f_s);

// Event table export (track_id, start_frame, end_frame, direction,
// lane_before, lane_after), comma-separated with header.
void write_events_csv(const std::vector<LaneChangeEvent>& events,
                      const std::string& path);
std::vector<LaneChangeEvent> load_events_csv(const std::string& path);

}  // namespace lci
