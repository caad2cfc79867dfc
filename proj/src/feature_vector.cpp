#include "lci/feature_vector.hpp"

#include <cmath>
#include <unordered_map>

#include "lci/error.hpp"

namespace lci {
namespace {

const char* const kSeriesNames[] = {
    "speed", "lon_vel", "lat_vel", "lon_acc",
    "lat_acc", "accel_mag", "yaw_rate", "lat_offset",
};

const char* const kDescriptorNames[] = {
    "lag_diff_0500ms", "lag_diff_1000ms", "lag_diff_1500ms", "lag_diff_2000ms",
    "ema_hl500ms",     "ema_slope",       "autocorr_250ms",  "spectral_above_1hz",
    "zero_cross_rate", "linear_r2",       "linear_slope",    "longest_run_s",
};

}  // namespace

FeatureSchema::FeatureSchema(DatasetKind kind) : kind_(kind) {
  auto add = [&](const std::string& name) { names_.push_back(name); };

  // Instantaneous kinematics (5).
  for (const char* n : {"speed", "accel_mag", "heading", "yaw_rate", "curvature_radius"}) {
    add(std::string("kin.") + n);
  }
  // Rolling 1 s statistics (12).
  for (const char* series : {"speed", "accel_mag", "heading"}) {
    for (const char* stat : {"mean", "std", "min", "max"}) {
      add(std::string("kin.roll1s.") + series + "." + stat);
    }
  }
  // Temporal descriptor blocks (8 x 12 = 96).
  for (const char* series : kSeriesNames) {
    for (const char* d : kDescriptorNames) {
      add(std::string("td.") + series + "." + d);
    }
  }
  // Window one-offs (7).
  for (const char* n : {"ttc_below3.count", "ttc_below3.total_s", "ttc_below5.count",
                        "ttc_below5.total_s", "cum_lat_energy", "ttb_left", "ttb_right"}) {
    add(std::string("win.") + n);
  }
  // Lane geometry (10).
  for (const char* n : {"lat_offset", "dist_left", "dist_right", "d_lat_offset",
                        "d_dist_left", "d_dist_right", "roll1s_lat_offset",
                        "roll1s_dist_left", "roll1s_dist_right", "cum_abs_lat_disp"}) {
    add(std::string("lane.") + n);
  }
  // Interaction blocks (8 x 12 = 96).
  for (int p = 0; p < kNumNeighborPos; ++p) {
    const std::string prefix =
        std::string("nbr.") + neighbor_pos_name(static_cast<NeighborPos>(p)) + ".";
    for (const char* n : {"gap_lon", "gap_lat", "dv_lon", "dv_lat", "da_lon",
                          "approach_rate", "z", "s", "safe_gap", "time_gap",
                          "time_gap_z", "cgt"}) {
      add(prefix + n);
    }
  }
  // Lane advantage, safe-gap count, occupancy (8).
  for (const char* side : {"left", "right"}) {
    for (const char* n : {"delta_lead", "delta_rear", "score"}) {
      add(std::string("adv.") + side + "." + n);
    }
  }
  add("adv.safe_gap_count");
  add("adv.occupancy_ratio");
  // Longitudinal safety minima (3).
  for (const char* n : {"min_dhw", "min_thw", "min_ttc"}) {
    add(std::string("safety.") + n);
  }
  // Behavioral semantics (6).
  for (const char* n : {"class_car", "class_truck", "lc_frequency", "speed_limit_ratio",
                        "accel_rollmax_ratio", "speed_rollmax_ratio"}) {
    add(std::string("beh.") + n);
  }

  if (kind == DatasetKind::Ramp) {
    // Ramp scalars and reachability indicators (9).
    for (const char* n : {"dist_to_entry", "dist_to_exit", "eta_exit", "d_dist_to_entry",
                          "d_dist_to_exit", "d_eta_exit", "reach_5s", "reach_15s",
                          "reach_30s"}) {
      add(std::string("ramp.") + n);
    }
    // Temporal descriptor block on the exit distance series (12).
    for (const char* d : kDescriptorNames) {
      add(std::string("td.ramp_dist_to_exit.") + d);
    }
  }
}

const FeatureSchema& FeatureSchema::straight() {
  static const FeatureSchema schema(DatasetKind::Straight);
  return schema;
}

const FeatureSchema& FeatureSchema::ramp() {
  static const FeatureSchema schema(DatasetKind::Ramp);
  return schema;
}

const FeatureSchema& FeatureSchema::for_kind(DatasetKind kind) {
  return kind == DatasetKind::Straight ? straight() : ramp();
}

std::size_t FeatureSchema::index(const std::string& name) const {
  // Lazily built name->index map per schema instance.
  static thread_local const FeatureSchema* cached_schema = nullptr;
  static thread_local std::unordered_map<std::string, std::size_t> cache;
  if (cached_schema != this) {
    cache.clear();
    for (std::size_t i = 0; i < names_.size(); ++i) cache[names_[i]] = i;
    cached_schema = this;
  }
  auto it = cache.find(name);
  if (it == cache.end()) {
    throw Error(ErrorCode::SchemaMismatch, "unknown feature name: " + name);
  }
  return it->second;
}

FeatureVector::FeatureVector(const FeatureSchema& schema)
    : schema_(&schema), values_(schema.size(), 0.0), mask_(schema.size(), 0) {}

void FeatureVector::set(std::size_t i, double value) {
  if (i >= values_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "feature index out of range");
  }
  if (!std::isfinite(value)) {
    // Contract: slots are finite or missing; non-finite inputs become missing.
    mask_[i] = 0;
    values_[i] = 0.0;
    return;
  }
  values_[i] = value;
  mask_[i] = 1;
}

void FeatureVector::set_missing(std::size_t i) {
  if (i >= values_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "feature index out of range");
  }
  values_[i] = 0.0;
  mask_[i] = 0;
}

}  // namespace lci
