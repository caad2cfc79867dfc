#include "lci/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lci/error.hpp"

namespace lci {
namespace {

constexpr double kMinYawRate = 1e-6;      // rad/s, below this curvature is missing
constexpr double kMinLatVelocity = 1e-3;  // m/s, time-to-boundary cutoff
constexpr double kMinEgoSpeed = 0.1;      // m/s, time-gap cutoff

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  m.min = v[0];
  m.max = v[0];
  for (double x : v) {
    m.mean += x;
    m.min = std::min(m.min, x);
    m.max = std::max(m.max, x);
  }
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size());
  return m;
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

// Heading/yaw-rate series derived from velocities; yaw rate uses wrapped
// finite differences (first entry repeats the second).
std::vector<double> heading_series(std::span<const Frame> w) {
  std::vector<double> h(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    h[k] = std::atan2(w[k].y_velocity, w[k].x_velocity);
  }
  return h;
}

std::vector<double> yaw_rate_series(const std::vector<double>& heading, double f_s) {
  std::vector<double> yr(heading.size(), 0.0);
  for (std::size_t k = 1; k < heading.size(); ++k) {
    yr[k] = wrap_angle(heading[k] - heading[k - 1]) * f_s;
  }
  if (heading.size() > 1) yr[0] = yr[1];
  return yr;
}

}  // namespace

void kinematics_features(std::span<const Frame> window, double f_s,
                         FeatureVector& out) {
  if (window.size() < 2) {
    throw Error(ErrorCode::TooFewFrames, "kinematics needs at least 2 frames");
  }
  const auto& schema = *out.schema();
  const Frame& anchor = window.back();

  const auto heading = heading_series(window);
  const auto yaw = yaw_rate_series(heading, f_s);

  const double speed = anchor.speed();
  const double yaw_rate = yaw.back();
  out.set(schema.index("kin.speed"), speed);
  out.set(schema.index("kin.accel_mag"), anchor.accel_magnitude());
  out.set(schema.index("kin.heading"), heading.back());
  out.set(schema.index("kin.yaw_rate"), yaw_rate);
  if (std::abs(yaw_rate) >= kMinYawRate) {
    out.set(schema.index("kin.curvature_radius"), speed / std::abs(yaw_rate));
  } else {
    out.set_missing(schema.index("kin.curvature_radius"));
  }

  const std::size_t roll =
      std::min<std::size_t>(window.size(), static_cast<std::size_t>(std::llround(f_s)));
  std::vector<double> speed_s(roll), acc_s(roll), head_s(roll);
  for (std::size_t i = 0; i < roll; ++i) {
    const Frame& f = window[window.size() - roll + i];
    speed_s[i] = f.speed();
    acc_s[i] = f.accel_magnitude();
    head_s[i] = heading[window.size() - roll + i];
  }
  const auto write_roll = [&](const char* name, std::span<const double> v) {
    const Moments m = moments(v);
    out.set(schema.index(std::string("kin.roll1s.") + name + ".mean"), m.mean);
    out.set(schema.index(std::string("kin.roll1s.") + name + ".std"), std::sqrt(m.var));
    out.set(schema.index(std::string("kin.roll1s.") + name + ".min"), m.min);
    out.set(schema.index(std::string("kin.roll1s.") + name + ".max"), m.max);
  };
  write_roll("speed", speed_s);
  write_roll("accel_mag", acc_s);
  write_roll("heading", head_s);
}

void temporal_descriptors(std::span<const double> series, double f_s,
                          const std::string& series_name, FeatureVector& out) {
  const auto& schema = *out.schema();
  const std::string prefix = "td." + series_name + ".";
  const auto idx = [&](const char* d) { return schema.index(prefix + d); };
  const auto n = static_cast<std::int64_t>(series.size());
  if (n == 0) {
    for (const char* d : {"lag_diff_0500ms", "lag_diff_1000ms", "lag_diff_1500ms",
                          "lag_diff_2000ms", "ema_hl500ms", "ema_slope",
                          "autocorr_250ms", "spectral_above_1hz", "zero_cross_rate",
                          "linear_r2", "linear_slope", "longest_run_s"}) {
      out.set_missing(idx(d));
    }
    return;
  }

  // Lagged differences.
  const struct {
    const char* name;
    double lag_s;
  } lags[] = {{"lag_diff_0500ms", 0.5},
              {"lag_diff_1000ms", 1.0},
              {"lag_diff_1500ms", 1.5},
              {"lag_diff_2000ms", 2.0}};
  for (const auto& lag : lags) {
    const auto steps = static_cast<std::int64_t>(std::llround(lag.lag_s * f_s));
    if (n > steps) {
      out.set(idx(lag.name), series[n - 1] - series[n - 1 - steps]);
    } else {
      out.set_missing(idx(lag.name));
    }
  }

  // EMA with half-life 0.5 s, plus its per-second slope.
  const double alpha = 1.0 - std::exp2(-1.0 / (0.5 * f_s));
  std::vector<double> ema(n);
  ema[0] = series[0];
  for (std::int64_t k = 1; k < n; ++k) {
    ema[k] = ema[k - 1] + alpha * (series[k] - ema[k - 1]);
  }
  out.set(idx("ema_hl500ms"), ema[n - 1]);
  const auto sec = static_cast<std::int64_t>(std::llround(f_s));
  if (n > sec) {
    out.set(idx("ema_slope"), ema[n - 1] - ema[n - 1 - sec]);
  } else {
    out.set_missing(idx("ema_slope"));
  }

  // Autocorrelation at 0.25 s.
  const auto ac_lag = std::max<std::int64_t>(1, std::llround(0.25 * f_s));
  if (n >= ac_lag + 2) {
    const std::int64_t m = n - ac_lag;
    double mean_a = 0.0, mean_b = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
      mean_a += series[k];
      mean_b += series[k + ac_lag];
    }
    mean_a /= m;
    mean_b /= m;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
      const double da = series[k] - mean_a;
      const double db = series[k + ac_lag] - mean_b;
      cov += da * db;
      var_a += da * da;
      var_b += db * db;
    }
    out.set(idx("autocorr_250ms"),
            var_a < 1e-12 || var_b < 1e-12 ? 0.0 : cov / std::sqrt(var_a * var_b));
  } else {
    out.set_missing(idx("autocorr_250ms"));
  }

  // Spectral energy ratio above 1 Hz (direct DFT of the mean-removed series).
  if (n >= 4) {
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;
    double total = 0.0, high = 0.0;
    for (std::int64_t m = 1; m <= n / 2; ++m) {
      double re = 0.0, im = 0.0;
      for (std::int64_t k = 0; k < n; ++k) {
        const double phase = 2.0 * M_PI * m * k / static_cast<double>(n);
        re += (series[k] - mean) * std::cos(phase);
        im -= (series[k] - mean) * std::sin(phase);
      }
      const double energy = re * re + im * im;
      total += energy;
      if (m * f_s / static_cast<double>(n) > 1.0) high += energy;
    }
    out.set(idx("spectral_above_1hz"), total < 1e-18 ? 0.0 : high / total);
  } else {
    out.set_missing(idx("spectral_above_1hz"));
  }

  // Zero crossings of the mean-removed series.
  if (n >= 2) {
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;
    int crossings = 0;
    for (std::int64_t k = 1; k < n; ++k) {
      if ((series[k] - mean) * (series[k - 1] - mean) < 0.0) ++crossings;
    }
    out.set(idx("zero_cross_rate"), static_cast<double>(crossings) / (n - 1));
  } else {
    out.set_missing(idx("zero_cross_rate"));
  }

  // Least-squares line over time; R^2 = 0 for constant series.
  if (n >= 2) {
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / f_s;
      st += t;
      sx += series[k];
      stt += t * t;
      stx += t * series[k];
    }
    const double denom = n * stt - st * st;
    const double slope = denom > 1e-12 ? (n * stx - st * sx) / denom : 0.0;
    const double intercept = (sx - slope * st) / n;
    double ss_tot = 0.0, ss_res = 0.0;
    const double mean = sx / n;
    for (std::int64_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / f_s;
      ss_tot += (series[k] - mean) * (series[k] - mean);
      const double r = series[k] - (slope * t + intercept);
      ss_res += r * r;
    }
    out.set(idx("linear_slope"), slope);
    out.set(idx("linear_r2"), ss_tot < 1e-12 ? 0.0 : 1.0 - ss_res / ss_tot);
  } else {
    out.set_missing(idx("linear_slope"));
    out.set_missing(idx("linear_r2"));
  }

  // Longest run of same-sign first differences, in seconds.
  if (n >= 2) {
    int best = 0, run = 0, sign = 0;
    for (std::int64_t k = 1; k < n; ++k) {
      const double d = series[k] - series[k - 1];
      const int s = d > 0.0 ? 1 : d < 0.0 ? -1 : 0;
      if (s != 0 && s == sign) {
        ++run;
      } else {
        run = s != 0 ? 1 : 0;
        sign = s;
      }
      best = std::max(best, run);
    }
    out.set(idx("longest_run_s"), static_cast<double>(best) / f_s);
  } else {
    out.set_missing(idx("longest_run_s"));
  }
}

void window_statistics(std::span<const Frame> window, double f_s,
                       FeatureVector& out) {
  const auto& schema = *out.schema();

  const auto episode_stats = [&](double threshold, const char* count_name,
                                 const char* total_name) {
    int episodes = 0;
    std::int64_t below = 0;
    bool in_episode = false;
    for (const Frame& f : window) {
      const bool hit = f.ttc && *f.ttc < threshold;
      if (hit) {
        ++below;
        if (!in_episode) ++episodes;
      }
      in_episode = hit;
    }
    out.set(schema.index(std::string("win.") + count_name), episodes);
    out.set(schema.index(std::string("win.") + total_name),
            static_cast<double>(below) / f_s);
  };
  episode_stats(3.0, "ttc_below3.count", "ttc_below3.total_s");
  episode_stats(5.0, "ttc_below5.count", "ttc_below5.total_s");

  double lat_energy = 0.0;
  for (const Frame& f : window) lat_energy += f.lat_velocity * f.lat_velocity;
  out.set(schema.index("win.cum_lat_energy"), lat_energy / f_s);

  const Frame& anchor = window.back();
  if (anchor.lat_velocity > kMinLatVelocity) {
    out.set(schema.index("win.ttb_left"), anchor.dist_left_boundary / anchor.lat_velocity);
  } else {
    out.set_missing(schema.index("win.ttb_left"));
  }
  if (anchor.lat_velocity < -kMinLatVelocity) {
    out.set(schema.index("win.ttb_right"),
            anchor.dist_right_boundary / -anchor.lat_velocity);
  } else {
    out.set_missing(schema.index("win.ttb_right"));
  }
}

void lane_features(std::span<const Frame> window, double f_s, FeatureVector& out) {
  const auto& schema = *out.schema();
  const Frame& anchor = window.back();
  out.set(schema.index("lane.lat_offset"), anchor.lateral_lane_offset);
  out.set(schema.index("lane.dist_left"), anchor.dist_left_boundary);
  out.set(schema.index("lane.dist_right"), anchor.dist_right_boundary);

  if (window.size() >= 2) {
    const Frame& prev = window[window.size() - 2];
    out.set(schema.index("lane.d_lat_offset"),
            (anchor.lateral_lane_offset - prev.lateral_lane_offset) * f_s);
    out.set(schema.index("lane.d_dist_left"),
            (anchor.dist_left_boundary - prev.dist_left_boundary) * f_s);
    out.set(schema.index("lane.d_dist_right"),
            (anchor.dist_right_boundary - prev.dist_right_boundary) * f_s);
  } else {
    out.set_missing(schema.index("lane.d_lat_offset"));
    out.set_missing(schema.index("lane.d_dist_left"));
    out.set_missing(schema.index("lane.d_dist_right"));
  }

  const std::size_t roll =
      std::min<std::size_t>(window.size(), static_cast<std::size_t>(std::llround(f_s)));
  double mo = 0.0, ml = 0.0, mr = 0.0;
  for (std::size_t i = window.size() - roll; i < window.size(); ++i) {
    mo += window[i].lateral_lane_offset;
    ml += window[i].dist_left_boundary;
    mr += window[i].dist_right_boundary;
  }
  out.set(schema.index("lane.roll1s_lat_offset"), mo / roll);
  out.set(schema.index("lane.roll1s_dist_left"), ml / roll);
  out.set(schema.index("lane.roll1s_dist_right"), mr / roll);

  double disp = 0.0;
  for (const Frame& f : window) disp += std::abs(f.lat_velocity);
  out.set(schema.index("lane.cum_abs_lat_disp"), disp / f_s);
}

NeighborStats fit_neighbor_stats(
    const std::vector<std::pair<const Recording*, const std::vector<LaneChangeEvent>*>>&
        train_corpus) {
  std::array<std::vector<double>, kNumNeighborPos> gaps;
  std::array<std::vector<double>, kNumNeighborPos> time_gaps;

  for (const auto& [rec, events] : train_corpus) {
    const TrackIndex index(*rec);
    for (const auto& ev : *events) {
      const Frame* ego = index.frame_of(ev.track_id, ev.start_frame);
      if (!ego) continue;
      const double v_ego = ego->speed();
      for (int p = 0; p < kNumNeighborPos; ++p) {
        const auto nbr_id = ego->neighbor_ids[p];
        if (!nbr_id) continue;
        const Frame* nbr = index.frame_of(*nbr_id, ev.start_frame);
        if (!nbr) continue;
        const double d = std::hypot(nbr->x - ego->x, nbr->y - ego->y);
        gaps[p].push_back(d);
        if (v_ego >= kMinEgoSpeed) time_gaps[p].push_back(d / v_ego);
      }
    }
  }

  NeighborStats stats;
  for (int p = 0; p < kNumNeighborPos; ++p) {
    PositionStats& ps = stats.positions[p];
    if (!gaps[p].empty()) {
      const Moments m = moments(gaps[p]);
      ps.mu = m.mean;
      ps.sigma = std::sqrt(m.var);
      ps.count = static_cast<std::int64_t>(gaps[p].size());
    }
    if (!time_gaps[p].empty()) {
      const Moments m = moments(time_gaps[p]);
      ps.t_mu = m.mean;
      ps.t_sigma = std::sqrt(m.var);
      ps.t_count = static_cast<std::int64_t>(time_gaps[p].size());
    }
  }
  return stats;
}

void interaction_features(const Frame& ego, const TrackIndex& index,
                          const NeighborStats& stats, double eps,
                          FeatureVector& out) {
  if (eps <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "cgt epsilon must be positive");
  }
  const auto& schema = *out.schema();
  const double v_ego = ego.speed();

  int present = 0;
  double safe_count = 0.0;
  // Longitudinal gap magnitudes for the lane-advantage block.
  std::array<std::optional<double>, kNumNeighborPos> lon_gap;

  for (int p = 0; p < kNumNeighborPos; ++p) {
    const std::string prefix =
        std::string("nbr.") + neighbor_pos_name(static_cast<NeighborPos>(p)) + ".";
    const auto idx = [&](const char* n) { return schema.index(prefix + n); };
    const auto miss_all = [&] {
      for (const char* n : {"gap_lon", "gap_lat", "dv_lon", "dv_lat", "da_lon",
                            "approach_rate", "z", "s", "safe_gap", "time_gap",
                            "time_gap_z", "cgt"}) {
        out.set_missing(idx(n));
      }
    };

    const auto nbr_id = ego.neighbor_ids[p];
    const Frame* nbr = nbr_id ? index.frame_of(*nbr_id, ego.frame_index) : nullptr;
    if (!nbr) {
      miss_all();
      continue;
    }
    ++present;

    const double dx = nbr->x - ego.x;
    const double dy = nbr->y - ego.y;
    const double d = std::hypot(dx, dy);
    const double dv_lon = nbr->x_velocity - ego.x_velocity;
    const double dv_lat = nbr->y_velocity - ego.y_velocity;
    out.set(idx("gap_lon"), dx);
    out.set(idx("gap_lat"), dy);
    out.set(idx("dv_lon"), dv_lon);
    out.set(idx("dv_lat"), dv_lat);
    out.set(idx("da_lon"), nbr->x_acceleration - ego.x_acceleration);
    if (d > 1e-9) {
      out.set(idx("approach_rate"), -(dx * dv_lon + dy * dv_lat) / d);
    } else {
      out.set_missing(idx("approach_rate"));
    }
    lon_gap[p] = std::abs(dx);

    const PositionStats& ps = stats.at(static_cast<NeighborPos>(p));
    if (ps.present() && ps.sigma > 0.0) {
      out.set(idx("z"), (d - ps.mu) / ps.sigma);
    } else {
      out.set_missing(idx("z"));
    }
    if (ps.present() && ps.mu > 0.0) {
      out.set(idx("s"), d / ps.mu);
    } else {
      out.set_missing(idx("s"));
    }
    if (ps.present()) {
      const double g = d > ps.mu + 2.0 * ps.sigma ? 1.0 : 0.0;
      out.set(idx("safe_gap"), g);
      safe_count += g;
    } else {
      out.set_missing(idx("safe_gap"));
    }

    if (v_ego >= kMinEgoSpeed) {
      const double t = d / v_ego;
      out.set(idx("time_gap"), t);
      if (ps.t_count > 0 && ps.t_sigma > 0.0) {
        out.set(idx("time_gap_z"), (t - ps.t_mu) / ps.t_sigma);
      } else {
        out.set_missing(idx("time_gap_z"));
      }
    } else {
      out.set_missing(idx("time_gap"));
      out.set_missing(idx("time_gap_z"));
    }
    out.set(idx("cgt"), d / (std::abs(dv_lon) + eps));
  }

  const auto side_advantage = [&](const char* side, NeighborPos lead_pos,
                                  NeighborPos rear_pos) {
    const auto idx = [&](const char* n) {
      return schema.index(std::string("adv.") + side + "." + n);
    };
    const auto& adj_lead = lon_gap[static_cast<int>(lead_pos)];
    const auto& adj_rear = lon_gap[static_cast<int>(rear_pos)];
    const auto& ego_lead = lon_gap[static_cast<int>(NeighborPos::Lead)];
    const auto& ego_rear = lon_gap[static_cast<int>(NeighborPos::Rear)];
    std::optional<double> delta_lead, delta_rear;
    if (adj_lead && ego_lead) delta_lead = *adj_lead - *ego_lead;
    if (adj_rear && ego_rear) delta_rear = *adj_rear - *ego_rear;
    if (delta_lead) out.set(idx("delta_lead"), *delta_lead);
    else out.set_missing(idx("delta_lead"));
    if (delta_rear) out.set(idx("delta_rear"), *delta_rear);
    else out.set_missing(idx("delta_rear"));
    if (delta_lead && delta_rear) out.set(idx("score"), std::min(*delta_lead, *delta_rear));
    else out.set_missing(idx("score"));
  };
  side_advantage("left", NeighborPos::LeftLead, NeighborPos::LeftRear);
  side_advantage("right", NeighborPos::RightLead, NeighborPos::RightRear);

  out.set(schema.index("adv.safe_gap_count"), safe_count);
  out.set(schema.index("adv.occupancy_ratio"),
          static_cast<double>(present) / kNumNeighborPos);
}

void safety_features(std::span<const Frame> window, FeatureVector& out) {
  const auto& schema = *out.schema();
  const auto write_min = [&](const char* name, auto getter) {
    std::optional<double> best;
    for (const Frame& f : window) {
      const auto v = getter(f);
      if (v && (!best || *v < *best)) best = *v;
    }
    if (best) out.set(schema.index(std::string("safety.") + name), *best);
    else out.set_missing(schema.index(std::string("safety.") + name));
  };
  write_min("min_dhw", [](const Frame& f) { return f.dhw; });
  write_min("min_thw", [](const Frame& f) { return f.thw; });
  write_min("min_ttc", [](const Frame& f) { return f.ttc; });
}

void behavioral_features(const Track& track, const Recording& rec,
                         const std::vector<LaneChangeEvent>& track_events,
                         std::span<const Frame> window, double f_s,
                         FeatureVector& out) {
  const auto& schema = *out.schema();
  const Frame& anchor = window.back();

  out.set(schema.index("beh.class_car"),
          track.vehicle_class == VehicleClass::Car ? 1.0 : 0.0);
  out.set(schema.index("beh.class_truck"),
          track.vehicle_class == VehicleClass::Truck ? 1.0 : 0.0);

  // Only maneuvers completed by the anchor count: features must not read
  // past the anchor frame.
  int completed = 0;
  for (const auto& ev : track_events) {
    if (ev.end_frame <= anchor.frame_index) ++completed;
  }
  const double elapsed_s =
      static_cast<double>(anchor.frame_index - track.first_frame() + 1) / f_s;
  out.set(schema.index("beh.lc_frequency"), completed / elapsed_s);

  const double speed = anchor.speed();
  if (rec.speed_limit && *rec.speed_limit > 0.0) {
    out.set(schema.index("beh.speed_limit_ratio"), speed / *rec.speed_limit);
  } else {
    out.set_missing(schema.index("beh.speed_limit_ratio"));
  }

  const std::size_t roll =
      std::min<std::size_t>(window.size(), static_cast<std::size_t>(std::llround(f_s)));
  double max_acc = 0.0, max_speed = 0.0;
  for (std::size_t i = window.size() - roll; i < window.size(); ++i) {
    max_acc = std::max(max_acc, window[i].accel_magnitude());
    max_speed = std::max(max_speed, window[i].speed());
  }
  if (max_acc > 1e-9) {
    out.set(schema.index("beh.accel_rollmax_ratio"), anchor.accel_magnitude() / max_acc);
  } else {
    out.set_missing(schema.index("beh.accel_rollmax_ratio"));
  }
  if (max_speed > 1e-9) {
    out.set(schema.index("beh.speed_rollmax_ratio"), speed / max_speed);
  } else {
    out.set_missing(schema.index("beh.speed_rollmax_ratio"));
  }
}

void ramp_features(std::span<const Frame> window, double f_s, FeatureVector& out) {
  const auto& schema = *out.schema();
  if (schema.kind() != DatasetKind::Ramp) {
    throw Error(ErrorCode::SchemaMismatch, "ramp features need the ramp schema");
  }
  const auto idx = [&](const char* n) { return schema.index(std::string("ramp.") + n); };
  const Frame& anchor = window.back();

  const char* const scalar_names[] = {"dist_to_entry", "dist_to_exit", "eta_exit",
                                      "d_dist_to_entry", "d_dist_to_exit", "d_eta_exit",
                                      "reach_5s", "reach_15s", "reach_30s"};
  if (!anchor.ramp_meta) {
    for (const char* n : scalar_names) out.set_missing(idx(n));
    temporal_descriptors({}, f_s, "ramp_dist_to_exit", out);
    return;
  }
  const RampMeta& meta = *anchor.ramp_meta;
  out.set(idx("dist_to_entry"), meta.dist_to_entry);
  out.set(idx("dist_to_exit"), meta.dist_to_exit);
  out.set(idx("eta_exit"), meta.eta_exit);

  if (window.size() >= 2 && window[window.size() - 2].ramp_meta) {
    const RampMeta& prev = *window[window.size() - 2].ramp_meta;
    out.set(idx("d_dist_to_entry"), (meta.dist_to_entry - prev.dist_to_entry) * f_s);
    out.set(idx("d_dist_to_exit"), (meta.dist_to_exit - prev.dist_to_exit) * f_s);
    out.set(idx("d_eta_exit"), (meta.eta_exit - prev.eta_exit) * f_s);
  } else {
    out.set_missing(idx("d_dist_to_entry"));
    out.set_missing(idx("d_dist_to_exit"));
    out.set_missing(idx("d_eta_exit"));
  }
  out.set(idx("reach_5s"), meta.eta_exit <= 5.0 ? 1.0 : 0.0);
  out.set(idx("reach_15s"), meta.eta_exit <= 15.0 ? 1.0 : 0.0);
  out.set(idx("reach_30s"), meta.eta_exit <= 30.0 ? 1.0 : 0.0);

  std::vector<double> exit_series;
  exit_series.reserve(window.size());
  bool complete = true;
  for (const Frame& f : window) {
    if (!f.ramp_meta) {
      complete = false;
      break;
    }
    exit_series.push_back(f.ramp_meta->dist_to_exit);
  }
  temporal_descriptors(complete ? std::span<const double>(exit_series)
                                : std::span<const double>(),
                       f_s, "ramp_dist_to_exit", out);
}

FeatureVector assemble(const Recording& rec, const TrackIndex& index,
                       const Track& track,
                       const std::vector<LaneChangeEvent>& track_events,
                       std::int64_t anchor_frame, int history_steps,
                       const NeighborStats& stats, double eps) {
  const Frame* anchor = track.frame_at(anchor_frame);
  if (!anchor) {
    throw Error(ErrorCode::OutOfRange, "anchor frame outside track");
  }
  const std::int64_t local = anchor_frame - track.first_frame();
  if (local + 1 < history_steps) {
    throw Error(ErrorCode::TooFewFrames, "history window exceeds track start");
  }
  const std::span<const Frame> window(track.frames.data() + (local + 1 - history_steps),
                                      static_cast<std::size_t>(history_steps));
  const double f_s = rec.sampling_rate;

  FeatureVector out(FeatureSchema::for_kind(rec.dataset_kind));
  kinematics_features(window, f_s, out);

  const auto heading = heading_series(window);
  const auto yaw = yaw_rate_series(heading, f_s);
  std::vector<double> series(window.size());
  const auto run_series = [&](const char* name, auto getter) {
    for (std::size_t k = 0; k < window.size(); ++k) series[k] = getter(window[k], k);
    temporal_descriptors(series, f_s, name, out);
  };
  run_series("speed", [](const Frame& f, std::size_t) { return f.speed(); });
  run_series("lon_vel", [](const Frame& f, std::size_t) { return f.x_velocity; });
  run_series("lat_vel", [](const Frame& f, std::size_t) { return f.lat_velocity; });
  run_series("lon_acc", [](const Frame& f, std::size_t) { return f.x_acceleration; });
  run_series("lat_acc", [](const Frame& f, std::size_t) { return f.y_acceleration; });
  run_series("accel_mag", [](const Frame& f, std::size_t) { return f.accel_magnitude(); });
  run_series("yaw_rate", [&](const Frame&, std::size_t k) { return yaw[k]; });
  run_series("lat_offset",
             [](const Frame& f, std::size_t) { return f.lateral_lane_offset; });

  window_statistics(window, f_s, out);
  lane_features(window, f_s, out);
  interaction_features(*anchor, index, stats, eps, out);
  safety_features(window, out);
  behavioral_features(track, rec, track_events, window, f_s, out);
  if (rec.dataset_kind == DatasetKind::Ramp) {
    ramp_features(window, f_s, out);
  }
  return out;
}

void write_feature_csv(const std::vector<LabeledWindow>& windows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
  if (windows.empty()) {
    out << "label\n";
    return;
  }
  const FeatureSchema* schema = windows.front().physics.schema();
  if (!schema) {
    throw Error(ErrorCode::SchemaMismatch, "windows carry no physics features");
  }
  out << "label";
  for (const auto& name : schema->names()) out << ',' << name;
  out << '\n';
  char buf[40];
  for (const auto& w : windows) {
    if (w.physics.schema() != schema) {
      throw Error(ErrorCode::SchemaMismatch, "mixed schemas in feature export");
    }
    out << lc_class_name(w.label);
    for (std::size_t i = 0; i < w.physics.size(); ++i) {
      out << ',';
      if (w.physics.present(i)) {
        std::snprintf(buf, sizeof(buf), "%.17g", w.physics.value(i));
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

void write_neighbor_stats(const NeighborStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
  char buf[40];
  const auto emit = [&](const std::string& key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << key << ' ' << buf << '\n';
  };
  for (int p = 0; p < kNumNeighborPos; ++p) {
    const auto name = neighbor_pos_name(static_cast<NeighborPos>(p));
    const PositionStats& ps = stats.positions[p];
    out << name << ".count " << ps.count << '\n';
    out << name << ".t_count " << ps.t_count << '\n';
    emit(std::string(name) + ".mu", ps.mu);
    emit(std::string(name) + ".sigma", ps.sigma);
    emit(std::string(name) + ".t_mu", ps.t_mu);
    emit(std::string(name) + ".t_sigma", ps.t_sigma);
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

NeighborStats load_neighbor_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open stats file: " + path);
  NeighborStats stats;
  std::string key;
  std::string value;
  while (in >> key >> value) {
    const auto dot = key.rfind('.');
    if (dot == std::string::npos) continue;
    const std::string pos_name = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    int p = -1;
    for (int i = 0; i < kNumNeighborPos; ++i) {
      if (pos_name == neighbor_pos_name(static_cast<NeighborPos>(i))) p = i;
    }
    if (p < 0) continue;
    PositionStats& ps = stats.positions[p];
    double v = 0.0;
    std::from_chars(value.data(), value.data() + value.size(), v);
    if (field == "count") ps.count = static_cast<std::int64_t>(v);
    else if (field == "t_count") ps.t_count = static_cast<std::int64_t>(v);
    else if (field == "mu") ps.mu = v;
    else if (field == "sigma") ps.sigma = v;
    else if (field == "t_mu") ps.t_mu = v;
    else if (field == "t_sigma") ps.t_sigma = v;
  }
  return stats;
}

}  // namespace lci
