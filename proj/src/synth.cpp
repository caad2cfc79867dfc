#include "lci/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lci/error.hpp"
#include "lci/rng.hpp"

namespace lci {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kCarLength = 4.0;       // m, for headway gaps
constexpr double kAlongsideHalf = 5.0;   // m, |dx| below this is "alongside"
constexpr double kRampEntryX = 200.0;    // m
constexpr double kRampExitX = 900.0;     // m

// Non-sequential display ids for ramp recordings (exiD-style: lane ids do
// not order geometrically between mainline and ramp lanes).
constexpr std::int32_t kRampLaneIds[] = {4, 21, 2, 17, 9, 33, 6, 28};

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

struct Wander {
  double amp[3];
  double freq[3];
  double phase[3];

  double at(double t) const {
    double v = 0.0;
    for (int j = 0; j < 3; ++j) v += amp[j] * std::sin(kTwoPi * freq[j] * t + phase[j]);
    return v;
  }
};

Wander draw_wander(Rng& rng, double amplitude) {
  Wander w{};
  double weights[3];
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    weights[j] = rng.uniform(0.5, 1.0);
    total += weights[j];
    w.freq[j] = rng.uniform(0.02, 0.04);
    w.phase[j] = rng.uniform(0.0, kTwoPi);
  }
  for (int j = 0; j < 3; ++j) w.amp[j] = amplitude * weights[j] / total;
  return w;
}

// Maneuver lateral displacement away from the departure lane centerline:
// lead-in drift cue, then a smoothstep ramp of one lane width. The profile
// is nondecreasing, so with the wander slope bound it satisfies the
// monotone-drift and no-reverse-motion labeling rules by construction.
double maneuver_displacement(double t, double t0, double lead_in_s,
                             double lead_in_offset, double duration_s,
                             double lane_width) {
  if (t < t0 - lead_in_s) return 0.0;
  if (t < t0) return lead_in_offset * smoothstep((t - (t0 - lead_in_s)) / lead_in_s);
  if (t < t0 + duration_s) {
    return lead_in_offset +
           (lane_width - lead_in_offset) * smoothstep((t - t0) / duration_s);
  }
  return lane_width;
}

struct SkewPlan {
  std::int64_t left_tracks = 0;
  std::int64_t right_tracks = 0;
};

// Solves for the number of left/right maneuver tracks so that the labeled
// window ratio under the nominal labeling parameters approximates
// class_skew, capped by maneuver_rate.
SkewPlan plan_skew(const SynthConfig& cfg, double lead_in_offset) {
  const double fs = cfg.sampling_rate;
  const auto frames = static_cast<std::int64_t>(std::llround(cfg.track_duration_s * fs));
  const int hist = std::max<int>(1, static_cast<int>(std::llround(cfg.nominal_history_s * fs)));
  const int horizon = std::max<int>(1, static_cast<int>(std::llround(cfg.nominal_horizon_s * fs)));
  const int stride = cfg.nominal_stride;

  // Noiseless crossing offsets relative to the main ramp start, in frames.
  const double w = cfg.lane_width;
  double u_start = 0.0, u_end = 0.0;
  {
    const double ramp_span = w - lead_in_offset;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lead_in_offset + ramp_span * smoothstep(mid) < 0.2 ? lo : hi) = mid;
    }
    u_start = hi;
    lo = 0.0;
    hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lead_in_offset + ramp_span * smoothstep(mid) < 0.5 * w ? lo : hi) = mid;
    }
    u_end = hi;
  }
  const double start_frame = u_start * cfg.maneuver_duration_s * fs;
  const double end_frame = u_end * cfg.maneuver_duration_s * fs;

  const double anchors_per_track =
      std::floor(static_cast<double>(frames - hist) / stride) + 1.0;
  const double lc_per_event = static_cast<double>(horizon) / stride;
  const double dropped_per_event =
      (std::max(end_frame - start_frame, static_cast<double>(hist - 1)) + 1.0) / stride;

  const double r_no = cfg.class_skew[0];
  const double r_l = cfg.class_skew[1];
  const double r_r = cfg.class_skew[2];
  const double n = static_cast<double>(cfg.tracks_per_location);
  const double denom =
      lc_per_event * r_no + (r_l + r_r) * (lc_per_event + dropped_per_event);

  SkewPlan plan;
  plan.left_tracks = std::llround(r_l * n * anchors_per_track / denom);
  plan.right_tracks = std::llround(r_r * n * anchors_per_track / denom);

  const auto cap = static_cast<std::int64_t>(std::floor(cfg.maneuver_rate * n + 1e-9));
  const std::int64_t total = plan.left_tracks + plan.right_tracks;
  if (total > cap) {
    if (cap <= 0) {
      plan.left_tracks = plan.right_tracks = 0;
    } else {
      plan.left_tracks = std::llround(static_cast<double>(plan.left_tracks) * cap / total);
      plan.left_tracks = std::min(plan.left_tracks, cap);
      plan.right_tracks = cap - plan.left_tracks;
    }
  }
  return plan;
}

struct TrackBuild {
  std::vector<double> y;
  std::vector<double> x;
  std::vector<double> vx;
  std::vector<int> lane_geo;
  int origin_lane = 0;
  bool maneuver = false;
  int dir_sign = 0;
  std::int64_t entry = 0;
  double speed = 0.0;
  VehicleClass vclass = VehicleClass::Car;
};

}  // namespace

void SynthConfig::validate() const {
  if (n_locations <= 0 || tracks_per_location <= 0) {
    throw Error(ErrorCode::InfeasibleConfig, "counts must be positive");
  }
  if (lane_count < 2) {
    throw Error(ErrorCode::InfeasibleConfig, "need at least 2 lanes");
  }
  if (lane_width <= 0.5) {
    throw Error(ErrorCode::InfeasibleConfig, "lane width too small");
  }
  for (double r : class_skew) {
    if (r <= 0.0) throw Error(ErrorCode::InfeasibleConfig, "class_skew ratios must be positive");
  }
  if (maneuver_rate < 0.0 || maneuver_rate > 1.0 || ramp_fraction < 0.0 ||
      ramp_fraction > 1.0) {
    throw Error(ErrorCode::InfeasibleConfig, "rates must lie in [0,1]");
  }
  if (noise_std < 0.0 || noise_std > 0.05) {
    throw Error(ErrorCode::InfeasibleConfig,
                "noise_std must lie in [0, 0.05] m to keep events detectable");
  }
  if (sampling_rate <= 0.0 || track_duration_s < 2.0 || maneuver_duration_s <= 0.0 ||
      lead_in_s <= 0.0 || lead_in_offset <= 0.0 || nominal_stride < 1 ||
      nominal_history_s <= 0.0 || nominal_horizon_s <= 0.0) {
    throw Error(ErrorCode::InfeasibleConfig, "invalid synthesis parameters");
  }
}

SynthResult synthesize_recording(const SynthConfig& cfg, int location_id,
                                 int recording_id) {
  cfg.validate();
  const double fs = cfg.sampling_rate;
  const double w = cfg.lane_width;
  const auto frames = static_cast<std::int64_t>(std::llround(cfg.track_duration_s * fs));
  const int n_tracks = cfg.tracks_per_location;

  // Keep the lead-in cue safely below the crossing threshold even at the
  // wander peak (rising edges must come from the ramp alone).
  const double lead_in_offset = std::min(cfg.lead_in_offset, 0.19 - cfg.noise_std);

  const SkewPlan plan = plan_skew(cfg, lead_in_offset);
  const std::int64_t n_maneuver = plan.left_tracks + plan.right_tracks;
  if (n_maneuver > n_tracks) {
    throw Error(ErrorCode::InfeasibleConfig,
                "class_skew requires more maneuver tracks than available");
  }

  const auto t0_min = static_cast<std::int64_t>(std::ceil((cfg.lead_in_s + 2.0) * fs));
  const auto t0_max =
      frames - static_cast<std::int64_t>(std::ceil((cfg.maneuver_duration_s + 1.5) * fs)) - 1;
  if (n_maneuver > 0 && t0_min > t0_max) {
    throw Error(ErrorCode::InfeasibleConfig,
                "maneuver duration exceeds track length");
  }

  const std::int64_t span = std::max<std::int64_t>(
      frames, static_cast<std::int64_t>(
                  std::ceil(static_cast<double>(n_tracks) * frames /
                            (6.0 * cfg.lane_count))));

  const bool ramp_kind = [&] {
    // Stripe ramp locations evenly across the corpus.
    const double f = cfg.ramp_fraction;
    return std::floor((location_id + 1) * f) > std::floor(location_id * f);
  }();

  Rng rec_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(location_id)));

  std::vector<TrackBuild> builds(n_tracks);
  for (int i = 0; i < n_tracks; ++i) {
    Rng rng = rec_rng.split(static_cast<std::uint64_t>(i));
    TrackBuild& b = builds[i];
    b.maneuver = i < n_maneuver;
    b.dir_sign = i < plan.left_tracks ? 1 : -1;

    b.vclass = rng.uniform() < 0.2 ? VehicleClass::Truck : VehicleClass::Car;
    b.speed = b.vclass == VehicleClass::Truck ? rng.uniform(19.0, 24.0)
                                              : rng.uniform(23.0, 31.0);
    const double x0 = rng.uniform(0.0, 1500.0);
    b.entry = static_cast<std::int64_t>(rng.uniform_below(
        static_cast<std::uint64_t>(span - frames + 1)));

    if (b.maneuver) {
      // Pick a lane with an adjacent lane on the maneuver side.
      const int lo = b.dir_sign > 0 ? 1 : 2;
      const int hi = b.dir_sign > 0 ? cfg.lane_count - 1 : cfg.lane_count;
      b.origin_lane = lo + static_cast<int>(rng.uniform_below(
                               static_cast<std::uint64_t>(hi - lo + 1)));
    } else {
      b.origin_lane = 1 + static_cast<int>(rng.uniform_below(
                              static_cast<std::uint64_t>(cfg.lane_count)));
    }

    std::int64_t t0 = 0;
    if (b.maneuver) {
      t0 = t0_min + static_cast<std::int64_t>(rng.uniform_below(
                        static_cast<std::uint64_t>(t0_max - t0_min + 1)));
    }
    const Wander wander = draw_wander(rng, cfg.noise_std);
    const double speed_phase = rng.uniform(0.0, kTwoPi);

    const double center = (b.origin_lane - 0.5) * w;
    b.y.resize(frames);
    b.x.resize(frames);
    b.vx.resize(frames);
    b.lane_geo.resize(frames);
    double x = x0;
    for (std::int64_t k = 0; k < frames; ++k) {
      const double t = static_cast<double>(k) / fs;
      double d = 0.0;
      if (b.maneuver) {
        d = maneuver_displacement(t, static_cast<double>(t0) / fs, cfg.lead_in_s,
                                  lead_in_offset, cfg.maneuver_duration_s, w);
      }
      b.y[k] = center + b.dir_sign * d + wander.at(t);
      b.vx[k] = b.speed + 0.3 * std::sin(kTwoPi * 0.05 * t + speed_phase);
      b.x[k] = x;
      x += b.vx[k] / fs;
      b.lane_geo[k] = std::clamp(
          static_cast<int>(std::floor(b.y[k] / w)) + 1, 1, cfg.lane_count);
    }
  }

  // Ground truth from the construction: first threshold crossing away from
  // the departure centerline, first frame whose geometric lane differs.
  std::vector<LaneChangeEvent> events;
  for (int i = 0; i < n_tracks; ++i) {
    const TrackBuild& b = builds[i];
    if (!b.maneuver) continue;
    const double center = (b.origin_lane - 0.5) * w;
    std::int64_t start = -1, end = -1;
    for (std::int64_t k = 1; k < frames; ++k) {
      const double rel = std::abs(b.y[k] - center);
      const double prev = std::abs(b.y[k - 1] - center);
      if (start < 0 && rel >= 0.2 && prev < 0.2) start = k;
      if (b.lane_geo[k] != b.origin_lane) {
        end = k;
        break;
      }
    }
    if (start < 0 || end < 0) {
      throw Error(ErrorCode::InfeasibleConfig,
                  "synthesized maneuver failed to cross lanes");
    }
    LaneChangeEvent ev;
    ev.track_id = location_id * 1000000 + i + 1;
    ev.start_frame = b.entry + start;
    ev.end_frame = b.entry + end;
    ev.direction = b.dir_sign > 0 ? Direction::Left : Direction::Right;
    ev.lane_before = b.origin_lane;
    ev.lane_after = b.lane_geo[end];
    events.push_back(ev);
  }

  // Per-frame neighbor topology over the whole recording.
  struct ActiveRef {
    int lane;
    double x;
    double vx;
    int track;
    std::int64_t local;
  };
  std::vector<std::vector<ActiveRef>> active(static_cast<std::size_t>(span));
  for (int i = 0; i < n_tracks; ++i) {
    const TrackBuild& b = builds[i];
    for (std::int64_t k = 0; k < frames; ++k) {
      active[static_cast<std::size_t>(b.entry + k)].push_back(
          ActiveRef{b.lane_geo[k], b.x[k], b.vx[k], i, k});
    }
  }

  Recording rec;
  rec.recording_id = recording_id;
  rec.location_id = location_id;
  rec.sampling_rate = fs;
  rec.dataset_kind = ramp_kind ? DatasetKind::Ramp : DatasetKind::Straight;
  rec.speed_limit = cfg.speed_limit;
  rec.tracks.resize(n_tracks);
  for (int i = 0; i < n_tracks; ++i) {
    Track& track = rec.tracks[i];
    track.track_id = location_id * 1000000 + i + 1;
    track.vehicle_class = builds[i].vclass;
    track.frames.resize(frames);
  }

  const auto lane_display = [&](int geo) -> std::int32_t {
    if (!ramp_kind) return geo;
    if (geo >= 1 && geo <= static_cast<int>(std::size(kRampLaneIds))) {
      return kRampLaneIds[geo - 1];
    }
    return 100 + geo;
  };

  for (std::int64_t f = 0; f < span; ++f) {
    auto& refs = active[static_cast<std::size_t>(f)];
    if (refs.empty()) continue;
    std::sort(refs.begin(), refs.end(), [](const ActiveRef& a, const ActiveRef& r) {
      if (a.lane != r.lane) return a.lane < r.lane;
      if (a.x != r.x) return a.x < r.x;
      return a.track < r.track;
    });
    // Lane boundaries inside the sorted array.
    const auto lane_range = [&](int lane) {
      auto lo = std::lower_bound(refs.begin(), refs.end(), lane,
                                 [](const ActiveRef& a, int l) { return a.lane < l; });
      auto hi = std::upper_bound(refs.begin(), refs.end(), lane,
                                 [](int l, const ActiveRef& a) { return l < a.lane; });
      return std::pair{lo, hi};
    };

    for (auto it = refs.begin(); it != refs.end(); ++it) {
      const ActiveRef& me = *it;
      const TrackBuild& b = builds[me.track];
      Frame& frame = rec.tracks[me.track].frames[static_cast<std::size_t>(me.local)];

      const auto set_neighbor = [&](NeighborPos pos, const ActiveRef* other) {
        if (other) {
          frame.neighbor_ids[static_cast<int>(pos)] =
              rec.tracks[other->track].track_id;
        }
      };

      // Same-lane lead/rear are the sorted-order neighbors.
      const ActiveRef* lead = nullptr;
      const ActiveRef* rear = nullptr;
      {
        auto [lo, hi] = lane_range(me.lane);
        if (it + 1 != hi) lead = &*(it + 1);
        if (it != lo) rear = &*(it - 1);
      }
      set_neighbor(NeighborPos::Lead, lead);
      set_neighbor(NeighborPos::Rear, rear);

      const auto adjacent = [&](int lane, NeighborPos lead_pos, NeighborPos along_pos,
                                NeighborPos rear_pos) {
        if (lane < 1 || lane > cfg.lane_count) return;
        auto [lo, hi] = lane_range(lane);
        const ActiveRef* a_lead = nullptr;
        const ActiveRef* a_along = nullptr;
        const ActiveRef* a_rear = nullptr;
        double best_along = kAlongsideHalf;
        for (auto jt = lo; jt != hi; ++jt) {
          const double dx = jt->x - me.x;
          if (std::abs(dx) <= kAlongsideHalf) {
            if (std::abs(dx) <= best_along) {
              best_along = std::abs(dx);
              a_along = &*jt;
            }
          } else if (dx > 0.0) {
            if (!a_lead || jt->x < a_lead->x) a_lead = &*jt;
          } else {
            if (!a_rear || jt->x > a_rear->x) a_rear = &*jt;
          }
        }
        set_neighbor(lead_pos, a_lead);
        set_neighbor(along_pos, a_along);
        set_neighbor(rear_pos, a_rear);
      };
      adjacent(me.lane + 1, NeighborPos::LeftLead, NeighborPos::LeftAlong,
               NeighborPos::LeftRear);
      adjacent(me.lane - 1, NeighborPos::RightLead, NeighborPos::RightAlong,
               NeighborPos::RightRear);

      if (lead) {
        const double dhw = std::max(0.0, lead->x - me.x - kCarLength);
        frame.dhw = dhw;
        frame.thw = dhw / std::max(me.vx, 0.1);
        const double closing = me.vx - lead->vx;
        if (closing > 0.1) frame.ttc = dhw / closing;
      }
      (void)b;
    }
  }

  // Fill kinematic fields; velocities/accelerations by forward differences
  // of the smooth construction.
  for (int i = 0; i < n_tracks; ++i) {
    const TrackBuild& b = builds[i];
    Track& track = rec.tracks[i];
    std::vector<double> vy(frames);
    for (std::int64_t k = 0; k + 1 < frames; ++k) vy[k] = (b.y[k + 1] - b.y[k]) * fs;
    if (frames >= 2) vy[frames - 1] = vy[frames - 2];
    for (std::int64_t k = 0; k < frames; ++k) {
      Frame& fr = track.frames[static_cast<std::size_t>(k)];
      fr.frame_index = b.entry + k;
      fr.x = b.x[k];
      fr.y = b.y[k];
      fr.x_velocity = b.vx[k];
      fr.y_velocity = vy[k];
      fr.lat_velocity = vy[k];
      fr.x_acceleration =
          k + 1 < frames ? (b.vx[k + 1] - b.vx[k]) * fs
                         : (frames >= 2 ? (b.vx[k] - b.vx[k - 1]) * fs : 0.0);
      fr.y_acceleration =
          k + 1 < frames ? (vy[k + 1] - vy[k]) * fs
                         : (frames >= 2 ? (vy[k] - vy[k - 1]) * fs : 0.0);
      const int lane = b.lane_geo[k];
      fr.lane_id = lane_display(lane);
      const double center = (lane - 0.5) * w;
      fr.lateral_lane_offset = b.y[k] - center;
      fr.dist_left_boundary = std::max(0.0, 0.5 * w - fr.lateral_lane_offset);
      fr.dist_right_boundary = std::max(0.0, 0.5 * w + fr.lateral_lane_offset);
      if (ramp_kind) {
        RampMeta meta;
        meta.dist_to_entry = std::max(0.0, fr.x - kRampEntryX);
        meta.dist_to_exit = std::max(0.0, kRampExitX - fr.x);
        meta.eta_exit = meta.dist_to_exit / std::max(fr.x_velocity, 0.1);
        fr.ramp_meta = meta;
      }
    }
  }

  // Remap ground-truth lane ids to display ids.
  for (auto& ev : events) {
    ev.lane_before = lane_display(ev.lane_before);
    ev.lane_after = lane_display(ev.lane_after);
  }

  validate_recording(rec);
  return SynthResult{std::move(rec), std::move(events)};
}

std::vector<SynthResult> synthesize_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<SynthResult> out;
  out.reserve(cfg.n_locations);
  for (int loc = 0; loc < cfg.n_locations; ++loc) {
    out.push_back(synthesize_recording(cfg, loc, loc));
  }
  return out;
}

}  // namespace lci
