#include "lci/types.hpp"

#include <cmath>
#include <unordered_set>

#include "lci/error.hpp"

namespace lci {

const char* dataset_kind_name(DatasetKind k) {
  return k == DatasetKind::Straight ? "straight" : "ramp";
}

const char* vehicle_class_name(VehicleClass c) {
  return c == VehicleClass::Car ? "car" : "truck";
}

const char* lc_class_name(LcClass c) {
  switch (c) {
    case LcClass::NoLc: return "NoLC";
    case LcClass::Left: return "LeftLC";
    case LcClass::Right: return "RightLC";
  }
  return "?";
}

const char* direction_name(Direction d) {
  return d == Direction::Left ? "Left" : "Right";
}

const char* neighbor_pos_name(NeighborPos p) {
  switch (p) {
    case NeighborPos::Lead: return "lead";
    case NeighborPos::Rear: return "rear";
    case NeighborPos::LeftLead: return "left_lead";
    case NeighborPos::LeftAlong: return "left_along";
    case NeighborPos::LeftRear: return "left_rear";
    case NeighborPos::RightLead: return "right_lead";
    case NeighborPos::RightAlong: return "right_along";
    case NeighborPos::RightRear: return "right_rear";
  }
  return "?";
}

double Frame::speed() const {
  return std::hypot(x_velocity, y_velocity);
}

double Frame::accel_magnitude() const {
  return std::hypot(x_acceleration, y_acceleration);
}

const Frame* Track::frame_at(std::int64_t frame_index) const {
  if (frames.empty()) return nullptr;
  const std::int64_t offset = frame_index - frames.front().frame_index;
  if (offset < 0 || offset >= static_cast<std::int64_t>(frames.size())) {
    return nullptr;
  }
  return &frames[static_cast<std::size_t>(offset)];
}

void validate_recording(const Recording& rec) {
  if (rec.sampling_rate <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sampling_rate must be positive");
  }
  if (rec.tracks.empty()) {
    throw Error(ErrorCode::EmptyRecording,
                "recording " + std::to_string(rec.recording_id) + " has no tracks");
  }
  std::unordered_set<std::int32_t> seen_ids;
  for (const auto& track : rec.tracks) {
    if (!seen_ids.insert(track.track_id).second) {
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate track id " + std::to_string(track.track_id));
    }
    if (track.frames.size() < 2) {
      throw Error(ErrorCode::InvalidArgument,
                  "track " + std::to_string(track.track_id) + " has fewer than 2 frames");
    }
    for (std::size_t i = 1; i < track.frames.size(); ++i) {
      if (track.frames[i].frame_index != track.frames[i - 1].frame_index + 1) {
        throw Error(ErrorCode::NonMonotonicFrames,
                    "track " + std::to_string(track.track_id) +
                        " frame indices must increase with unit stride");
      }
    }
    for (const auto& f : track.frames) {
      if (f.dist_left_boundary < 0.0 || f.dist_right_boundary < 0.0 ||
          f.dist_left_boundary + f.dist_right_boundary <= 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "track " + std::to_string(track.track_id) +
                        ": boundary distances must be nonnegative with positive sum");
      }
      if ((f.dhw && *f.dhw < 0.0) || (f.thw && *f.thw < 0.0) || (f.ttc && *f.ttc < 0.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "track " + std::to_string(track.track_id) +
                        ": dhw/thw/ttc must be nonnegative when present");
      }
    }
  }
}

TrackIndex::TrackIndex(const Recording& rec) {
  by_id_.reserve(rec.tracks.size());
  for (const auto& track : rec.tracks) by_id_.emplace(track.track_id, &track);
}

const Track* TrackIndex::find(std::int32_t track_id) const {
  auto it = by_id_.find(track_id);
  return it == by_id_.end() ? nullptr : it->second;
}

const Frame* TrackIndex::frame_of(std::int32_t track_id,
                                  std::int64_t frame_index) const {
  const Track* track = find(track_id);
  return track ? track->frame_at(frame_index) : nullptr;
}

}  // namespace lci
