#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lci {

enum class DatasetKind { Straight, Ramp };

enum class VehicleClass { Car, Truck };

// Three-class intention target. Order is fixed: probability vectors, logits
// and confusion matrices all index by this enum.
enum class LcClass : int { NoLc = 0, Left = 1, Right = 2 };

inline constexpr int kNumClasses = 3;

enum class Direction { Left, Right };

// The eight surrounding-vehicle slots. Order is fixed; feature schemas and
// file columns index by it.
enum class NeighborPos : int {
  Lead = 0,
  Rear,
  LeftLead,
  LeftAlong,
  LeftRear,
  RightLead,
  RightAlong,
  RightRear,
};

inline constexpr int kNumNeighborPos = 8;

const char* dataset_kind_name(DatasetKind k);
const char* vehicle_class_name(VehicleClass c);
const char* lc_class_name(LcClass c);
const char* direction_name(Direction d);
const char* neighbor_pos_name(NeighborPos p);

struct RampMeta {
  double dist_to_entry = 0.0;  // m
  double dist_to_exit = 0.0;   // m
  double eta_exit = 0.0;       // s
};

struct Frame {
  std::int64_t frame_index = 0;
  double x = 0.0;  // longitudinal position, m
  double y = 0.0;  // lateral position, m, left-positive
  double x_velocity = 0.0;
  double y_velocity = 0.0;
  double x_acceleration = 0.0;
  double y_acceleration = 0.0;
  double lat_velocity = 0.0;  // signed, left-positive
  std::int32_t lane_id = 0;
  double lateral_lane_offset = 0.0;  // from current lane centerline, left-positive
  double dist_left_boundary = 0.0;
  double dist_right_boundary = 0.0;
  std::optional<double> dhw;
  std::optional<double> thw;
  std::optional<double> ttc;
  std::array<std::optional<std::int32_t>, kNumNeighborPos> neighbor_ids;
  std::optional<RampMeta> ramp_meta;

  double speed() const;
  double accel_magnitude() const;

  std::optional<std::int32_t> neighbor(NeighborPos p) const {
    return neighbor_ids[static_cast<int>(p)];
  }
};

struct Track {
  std::int32_t track_id = 0;
  VehicleClass vehicle_class = VehicleClass::Car;
  std::vector<Frame> frames;  // unit-stride frame indices, >= 2 frames

  std::int64_t first_frame() const { return frames.front().frame_index; }
  std::int64_t last_frame() const { return frames.back().frame_index; }

  // Frame lookup by recording frame index; nullptr when outside the track.
  const Frame* frame_at(std::int64_t frame_index) const;
};

struct Recording {
  std::int32_t recording_id = 0;
  std::int32_t location_id = 0;
  double sampling_rate = 25.0;  // Hz
  DatasetKind dataset_kind = DatasetKind::Straight;
  std::optional<double> speed_limit;  // m/s
  std::vector<Track> tracks;
};

// Throws Error on any invariant violation (track ids unique, frames
// monotone unit-stride, >= 2 frames per track, boundary distances sane).
void validate_recording(const Recording& rec);

// O(1) track lookup for neighbor resolution. Valid while the recording is
// alive and unmodified; recordings are immutable after construction.
class TrackIndex {
 public:
  explicit TrackIndex(const Recording& rec);

  const Track* find(std::int32_t track_id) const;
  const Frame* frame_of(std::int32_t track_id, std::int64_t frame_index) const;

 private:
  std::unordered_map<std::int32_t, const Track*> by_id_;
};

}  // namespace lci
