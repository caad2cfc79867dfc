#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lci/feature_vector.hpp"
#include "lci/labeling.hpp"
#include "lci/types.hpp"

namespace lci {

// Center-to-center gap statistics per neighbor position, fitted over event
// start frames on training locations only. Also carries time-gap (d/v_ego)
// statistics used to z-score the time-to-gap measure.
struct PositionStats {
  double mu = 0.0;
  double sigma = 0.0;  // population convention
  double t_mu = 0.0;
  double t_sigma = 0.0;
  std::int64_t count = 0;
  std::int64_t t_count = 0;

  bool present() const { return count > 0; }
};

struct NeighborStats {
  std::array<PositionStats, kNumNeighborPos> positions;

  const PositionStats& at(NeighborPos p) const {
    return positions[static_cast<int>(p)];
  }
};

// Default stabilizing constant for the closing-gap time.
inline constexpr double kCgtEpsilon = 1e-6;

// Instantaneous kinematics at the anchor plus rolling 1 s statistics of
// speed, acceleration magnitude and heading. Throws Error{TooFewFrames}
// below 2 frames.
void kinematics_features(std::span<const Frame> window, double f_s,
                         FeatureVector& out);

// The 12-descriptor temporal block for one scalar series, written under
// "td.<series_name>.*": lagged differences at 0.5/1/1.5/2 s, EMA
// (half-life 0.5 s) and its per-second slope, 0.25 s autocorrelation,
// spectral energy ratio above 1 Hz, zero-crossing rate, linear-fit R^2 and
// slope, longest same-sign-derivative run. Short series leave the affected
// slots missing.
void temporal_descriptors(std::span<const double> series, double f_s,
                          const std::string& series_name, FeatureVector& out);

// Window-level one-offs: TTC threshold episode statistics (<3 s, <5 s),
// cumulative lateral energy, time-to-boundary on each side.
void window_statistics(std::span<const Frame> window, double f_s,
                       FeatureVector& out);

// Lateral offset, boundary distances, derivatives, rolling means,
// cumulative absolute lateral displacement.
void lane_features(std::span<const Frame> window, double f_s, FeatureVector& out);

// Fits per-position gap statistics over event start frames. Call with
// training-side recordings only.
NeighborStats fit_neighbor_stats(
    const std::vector<std::pair<const Recording*, const std::vector<LaneChangeEvent>*>>&
        train_corpus);

// Per-neighbor interaction block plus lane-advantage, safe-gap count and
// occupancy ratio. Absent neighbors leave their slots missing.
void interaction_features(const Frame& ego, const TrackIndex& index,
                          const NeighborStats& stats, double eps,
                          FeatureVector& out);

// Minimum DHW/THW/TTC over the window; missing when never present.
void safety_features(std::span<const Frame> window, FeatureVector& out);

// Vehicle class one-hot, lane-change frequency up to the anchor, speed
// limit ratio, rolling-max ratios.
void behavioral_features(const Track& track, const Recording& rec,
                         const std::vector<LaneChangeEvent>& track_events,
                         std::span<const Frame> window, double f_s,
                         FeatureVector& out);

// Ramp descriptors and the reachability indicators at 5/15/30 s; all
// missing when ramp_meta is absent.
void ramp_features(std::span<const Frame> window, double f_s, FeatureVector& out);

// Runs every group for the window ending at anchor_frame and returns the
// fully populated vector (243 slots straight, 264 ramp).
FeatureVector assemble(const Recording& rec, const TrackIndex& index,
                       const Track& track,
                       const std::vector<LaneChangeEvent>& track_events,
                       std::int64_t anchor_frame, int history_steps,
                       const NeighborStats& stats, double eps = kCgtEpsilon);

// Feature matrix export: comma-separated, header = schema names, missing
// rendered as an empty field; a leading "label" column carries the class.
void write_feature_csv(const std::vector<LabeledWindow>& windows,
                       const std::string& path);

// NeighborStats as a small key-value artifact (one "position key value"
// triple per line).
void write_neighbor_stats(const NeighborStats& stats, const std::string& path);
NeighborStats load_neighbor_stats(const std::string& path);

}  // namespace lci
