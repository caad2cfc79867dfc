#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lci/types.hpp"

namespace lci::testing {

// Builds a physically consistent track from a continuous lateral series:
// lane ids, per-lane offsets, boundary distances and finite-difference
// velocities all derive from y, mirroring the synthesizer's geometry.
inline Track make_track_from_lateral(const std::vector<double>& y,
                                     double lane_width = 3.5, double f_s = 25.0,
                                     std::int32_t track_id = 1) {
  Track track;
  track.track_id = track_id;
  track.vehicle_class = VehicleClass::Car;
  const auto n = static_cast<std::int64_t>(y.size());
  track.frames.resize(n);
  for (std::int64_t k = 0; k < n; ++k) {
    Frame& f = track.frames[k];
    f.frame_index = k;
    f.x = 25.0 * static_cast<double>(k) / f_s;
    f.y = y[k];
    f.x_velocity = 25.0;
    const double vy = k + 1 < n ? (y[k + 1] - y[k]) * f_s
                                : (n >= 2 ? (y[k] - y[k - 1]) * f_s : 0.0);
    f.y_velocity = vy;
    f.lat_velocity = vy;
    const int lane = std::max(1, static_cast<int>(std::floor(y[k] / lane_width)) + 1);
    f.lane_id = lane;
    const double center = (lane - 0.5) * lane_width;
    f.lateral_lane_offset = y[k] - center;
    f.dist_left_boundary = std::max(0.0, 0.5 * lane_width - f.lateral_lane_offset);
    f.dist_right_boundary = std::max(0.0, 0.5 * lane_width + f.lateral_lane_offset);
  }
  return track;
}

// Smoothstep lateral profile helper for hand-built maneuvers.
inline std::vector<double> lateral_profile(int frames, double base, int ramp_start,
                                           int ramp_len, double amplitude) {
  std::vector<double> y(frames, base);
  for (int k = 0; k < frames; ++k) {
    if (k < ramp_start) continue;
    const double u = std::min(1.0, static_cast<double>(k - ramp_start) / ramp_len);
    y[k] = base + amplitude * u * u * (3.0 - 2.0 * u);
  }
  return y;
}

}  // namespace lci::testing
