#include "lci/labeling.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lci/error.hpp"

namespace lci {
namespace {

// Continuous lateral position reconstructed from per-lane offsets. At a
// lane switch the raw offset re-bases by one lane width; the delta is
// unwrapped by the nearest multiple of the current lane width so drift and
// reverse-motion checks see a continuous series.
std::vector<double> unwrap_lateral(const Track& track) {
  const auto& fr = track.frames;
  std::vector<double> un(fr.size());
  un[0] = fr[0].lateral_lane_offset;
  for (std::size_t k = 1; k < fr.size(); ++k) {
    double delta = fr[k].lateral_lane_offset - fr[k - 1].lateral_lane_offset;
    if (fr[k].lane_id != fr[k - 1].lane_id) {
      const double width = fr[k].dist_left_boundary + fr[k].dist_right_boundary;
      if (width > 0.0) delta -= std::round(delta / width) * width;
    }
    un[k] = un[k - 1] + delta;
  }
  return un;
}

int steps_for(double seconds, double f_s) {
  return static_cast<int>(std::ceil(seconds * f_s - 1e-9));
}

}  // namespace

void LabelingParams::validate() const {
  if (crossing_threshold <= 0.0 || drift_duration <= 0.0 || settle_duration <= 0.0 ||
      direction_window <= 0.0 || drift_tolerance <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "labeling parameters must be positive");
  }
}

Direction direction_straight(std::int32_t lane_before, std::int32_t lane_after) {
  if (lane_before == lane_after) {
    throw Error(ErrorCode::SameLane,
                "lane id unchanged: " + std::to_string(lane_before));
  }
  return lane_before < lane_after ? Direction::Left : Direction::Right;
}

Direction direction_ramp(const Track& track, std::int64_t start_frame,
                         const LabelingParams& params, double f_s) {
  const Frame* first = track.frame_at(start_frame);
  if (!first) {
    throw Error(ErrorCode::OutOfRange,
                "start frame " + std::to_string(start_frame) + " outside track " +
                    std::to_string(track.track_id));
  }
  const int count = std::max<int>(1, static_cast<int>(std::llround(params.direction_window * f_s)));
  double sum = 0.0;
  int used = 0;
  for (int i = 0; i < count; ++i) {
    const Frame* f = track.frame_at(start_frame + i);
    if (!f) break;
    sum += f->lat_velocity;
    ++used;
  }
  return (sum / used) > 0.0 ? Direction::Left : Direction::Right;
}

std::vector<LaneChangeEvent> detect_events(const Track& track,
                                           const LabelingParams& params,
                                           DatasetKind kind, double f_s) {
  params.validate();
  const auto& fr = track.frames;
  const auto n = static_cast<std::int64_t>(fr.size());
  if (n < 2) return {};
  for (const auto& f : fr) {
    if (!std::isfinite(f.lateral_lane_offset) || !std::isfinite(f.lat_velocity)) {
      throw Error(ErrorCode::MissingLateralData,
                  "track " + std::to_string(track.track_id));
    }
  }

  const int drift_steps = steps_for(params.drift_duration, f_s);
  const int settle_steps = steps_for(params.settle_duration, f_s);
  const double tol = params.drift_tolerance;

  const auto un = unwrap_lateral(track);
  // reversal_left[j]: step j is reverse motion for a leftward (positive)
  // maneuver; prefix sums give O(1) window queries.
  std::vector<std::int32_t> rev_left(n, 0), rev_right(n, 0);
  for (std::int64_t j = 0; j + 1 < n; ++j) {
    const double delta = un[j + 1] - un[j];
    rev_left[j + 1] = rev_left[j] + (delta < -tol ? 1 : 0);
    rev_right[j + 1] = rev_right[j] + (delta > tol ? 1 : 0);
  }
  const auto reversals = [&](int sign, std::int64_t first_step, std::int64_t count) {
    const auto& pre = sign > 0 ? rev_left : rev_right;
    return pre[first_step + count] - pre[first_step];
  };

  std::vector<LaneChangeEvent> events;
  std::int64_t k = 1;
  while (k < n) {
    const double off = fr[k].lateral_lane_offset;
    const double prev = fr[k - 1].lateral_lane_offset;
    const bool rising_edge = std::abs(off) >= params.crossing_threshold &&
                             std::abs(prev) < params.crossing_threshold &&
                             fr[k].lane_id == fr[k - 1].lane_id;
    if (!rising_edge) {
      ++k;
      continue;
    }
    const int sign = off > 0.0 ? 1 : -1;
    if (k + drift_steps > n - 1 || reversals(sign, k, drift_steps) > 0) {
      ++k;
      continue;
    }

    const std::int32_t lane_before = fr[k].lane_id;
    std::int64_t cross = k + 1;
    while (cross < n && fr[cross].lane_id == lane_before) ++cross;
    if (cross >= n) break;  // never leaves the lane: no further event possible here

    std::int64_t end = -1;
    for (std::int64_t e = cross; e < n; ++e) {
      if (fr[e].lane_id == lane_before) break;  // bounced back: aborted
      if (e + settle_steps > n - 1) break;      // settle window unverifiable
      if (reversals(sign, e, settle_steps) == 0) {
        end = e;
        break;
      }
    }
    if (end < 0) {
      k = cross + 1;
      continue;
    }

    LaneChangeEvent ev;
    ev.track_id = track.track_id;
    ev.start_frame = fr[k].frame_index;
    ev.end_frame = fr[end].frame_index;
    ev.lane_before = lane_before;
    ev.lane_after = fr[end].lane_id;
    ev.direction = kind == DatasetKind::Straight
                       ? direction_straight(ev.lane_before, ev.lane_after)
                       : direction_ramp(track, ev.start_frame, params, f_s);
    events.push_back(ev);
    k = end + 1;
  }
  return events;
}

std::vector<LabeledWindow> label_windows(const Track& track,
                                         const std::vector<LaneChangeEvent>& events,
                                         double history_s, double horizon_s,
                                         double f_s, int stride) {
  if (history_s <= 0.0 || horizon_s <= 0.0 || stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "history, horizon and stride must be positive");
  }
  const auto& fr = track.frames;
  const auto n = static_cast<std::int64_t>(fr.size());
  const int hist = std::max<int>(1, static_cast<int>(std::llround(history_s * f_s)));
  const int horizon = std::max<int>(1, static_cast<int>(std::llround(horizon_s * f_s)));
  if (n < hist + horizon) {
    throw Error(ErrorCode::TrackTooShort,
                "track " + std::to_string(track.track_id) + " has " + std::to_string(n) +
                    " frames, needs " + std::to_string(hist + horizon));
  }

  std::vector<LabeledWindow> windows;
  for (std::int64_t a = hist - 1; a < n; a += stride) {
    const std::int64_t anchor = fr[a].frame_index;

    bool dropped = false;
    LcClass label = LcClass::NoLc;
    for (const auto& ev : events) {
      const bool in_progress = ev.start_frame <= anchor && anchor <= ev.end_frame;
      const bool starts_in_history =
          ev.start_frame >= anchor - hist + 1 && ev.start_frame <= anchor;
      if (in_progress || starts_in_history) {
        dropped = true;
        break;
      }
      if (label == LcClass::NoLc && ev.start_frame > anchor &&
          ev.start_frame <= anchor + horizon) {
        label = ev.direction == Direction::Left ? LcClass::Left : LcClass::Right;
      }
    }
    if (dropped) continue;

    LabeledWindow w;
    w.track_id = track.track_id;
    w.anchor_frame = anchor;
    w.history_s = history_s;
    w.horizon_s = horizon_s;
    w.seq_steps = hist;
    w.label = label;
    w.sequence.resize(static_cast<std::size_t>(hist) * kSequenceDim);
    for (int t = 0; t < hist; ++t) {
      const Frame& f = fr[a - hist + 1 + t];
      double* row = w.sequence.data() + static_cast<std::size_t>(t) * kSequenceDim;
      row[0] = f.x_velocity;
      row[1] = f.y_velocity;
      row[2] = f.x_acceleration;
      row[3] = f.y_acceleration;
      row[4] = f.lat_velocity;
      row[5] = f.lateral_lane_offset;
      row[6] = f.dist_left_boundary;
      row[7] = f.dist_right_boundary;
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<LabeledWindow> consistency_filter(std::vector<LabeledWindow> windows,
                                              const std::vector<LaneChangeEvent>& events,
                                              double horizon_s, double f_s) {
  const int horizon = std::max<int>(1, static_cast<int>(std::llround(horizon_s * f_s)));
  std::vector<LabeledWindow> kept;
  kept.reserve(windows.size());
  for (auto& w : windows) {
    int starts = 0;
    for (const auto& ev : events) {
      if (ev.start_frame > w.anchor_frame && ev.start_frame <= w.anchor_frame + horizon) {
        ++starts;
      }
    }
    if (starts < 2) kept.push_back(std::move(w));
  }
  return kept;
}

void write_events_csv(const std::vector<LaneChangeEvent>& events,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
  out << "trackId,startFrame,endFrame,direction,laneBefore,laneAfter\n";
  for (const auto& ev : events) {
    out << ev.track_id << ',' << ev.start_frame << ',' << ev.end_frame << ','
        << direction_name(ev.direction) << ',' << ev.lane_before << ','
        << ev.lane_after << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

std::vector<LaneChangeEvent> load_events_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open events file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::IoFailure, "events file has no header: " + path);
  }
  std::vector<LaneChangeEvent> events;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    LaneChangeEvent ev;
    char dir[16] = {0};
    long long start = 0, end = 0;
    if (std::sscanf(line.c_str(), "%d,%lld,%lld,%15[^,],%d,%d", &ev.track_id, &start,
                    &end, dir, &ev.lane_before, &ev.lane_after) != 6) {
      throw Error(ErrorCode::IoFailure, "malformed events row: " + line);
    }
    ev.start_frame = start;
    ev.end_frame = end;
    ev.direction = std::string(dir) == "Left" ? Direction::Left : Direction::Right;
    events.push_back(ev);
  }
  return events;
}

}  // namespace lci
