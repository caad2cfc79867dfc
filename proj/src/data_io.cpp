#include "lci/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "lci/error.hpp"

namespace lci {
namespace {

const char* const kRequiredColumns[] = {
    "frame",          "id",
    "x",              "y",
    "xVelocity",      "yVelocity",
    "xAcceleration",  "yAcceleration",
    "latVelocity",    "laneId",
    "latLaneCenterOffset", "distLeftBoundary",
    "distRightBoundary",   "dhw",
    "thw",            "ttc",
    "leadId",         "rearId",
    "leftLeadId",     "leftAlongsideId",
    "leftRearId",     "rightLeadId",
    "rightAlongsideId", "rightRearId",
    "vehicleClass",
};

const char* const kRampColumns[] = {"distToEntry", "distToExit", "etaExit"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot parse number '" + s + "' in " + context);
  }
  return value;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot parse integer '" + s + "' in " + context);
  }
  return value;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::optional<double> optional_field(const std::string& s, const std::string& ctx) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, ctx);
}

std::optional<std::int32_t> neighbor_field(const std::string& s, const std::string& ctx) {
  if (s.empty()) return std::nullopt;
  const std::int64_t id = parse_int(s, ctx);
  if (id <= 0) return std::nullopt;  // highD convention: 0 = no vehicle
  return static_cast<std::int32_t>(id);
}

VehicleClass parse_vehicle_class(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  if (s == "car") return VehicleClass::Car;
  if (s == "truck") return VehicleClass::Truck;
  throw Error(ErrorCode::InvalidArgument, "unknown vehicleClass '" + s + "'");
}

struct MetaFields {
  std::int32_t recording_id = 0;
  std::int32_t location_id = 0;
  double sampling_rate = 25.0;
  std::optional<DatasetKind> kind;
  std::optional<double> speed_limit;
};

MetaFields load_meta(const std::string& path) {
  MetaFields meta;
  std::ifstream in(path);
  if (!in) return meta;  // sidecar optional
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw Error(ErrorCode::IoFailure, "metadata file truncated: " + path);
  }
  auto names = split_csv_line(header);
  auto values = split_csv_line(row);
  if (values.size() != names.size()) {
    throw Error(ErrorCode::IoFailure, "metadata column count mismatch: " + path);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& name = names[i];
    const auto& v = values[i];
    if (name == "recordingId") {
      meta.recording_id = static_cast<std::int32_t>(parse_int(v, path));
    } else if (name == "locationId") {
      meta.location_id = static_cast<std::int32_t>(parse_int(v, path));
    } else if (name == "samplingRate") {
      meta.sampling_rate = parse_double(v, path);
    } else if (name == "datasetKind") {
      if (v == "straight") meta.kind = DatasetKind::Straight;
      else if (v == "ramp") meta.kind = DatasetKind::Ramp;
      else throw Error(ErrorCode::IoFailure, "unknown datasetKind '" + v + "'");
    } else if (name == "speedLimit") {
      meta.speed_limit = optional_field(v, path);
    }
  }
  return meta;
}

}  // namespace

std::string meta_path_for(const std::string& tracks_path) {
  const std::string suffix = "_tracks.csv";
  if (tracks_path.size() > suffix.size() &&
      tracks_path.compare(tracks_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return tracks_path.substr(0, tracks_path.size() - suffix.size()) + "_meta.csv";
  }
  return tracks_path + ".meta.csv";
}

Recording load_recording(const std::string& path, DatasetKind kind) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open tracks file: " + path);
  }

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw Error(ErrorCode::IoFailure, "tracks file has no header row: " + path);
  }
  const auto header = split_csv_line(header_line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  for (const char* name : kRequiredColumns) {
    if (!col.count(name)) {
      throw Error(ErrorCode::MissingColumn, std::string(name) + " in " + path);
    }
  }
  int ramp_cols = 0;
  for (const char* name : kRampColumns) ramp_cols += col.count(name) ? 1 : 0;
  if (ramp_cols != 0 && ramp_cols != 3) {
    throw Error(ErrorCode::MissingColumn,
                "ramp columns must appear together (distToEntry,distToExit,etaExit)");
  }
  const bool has_ramp_cols = ramp_cols == 3;

  Recording rec;
  rec.dataset_kind = kind;

  const MetaFields meta = load_meta(meta_path_for(path));
  rec.recording_id = meta.recording_id;
  rec.location_id = meta.location_id;
  rec.sampling_rate = meta.sampling_rate;
  rec.speed_limit = meta.speed_limit;
  if (meta.kind && *meta.kind != kind) {
    throw Error(ErrorCode::InvalidArgument,
                "dataset kind argument conflicts with metadata in " + path);
  }

  std::map<std::int32_t, std::size_t> track_slot;  // id -> index into rec.tracks
  std::string line;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() < header.size()) {
      throw Error(ErrorCode::IoFailure,
                  "row " + std::to_string(row_no) + " has too few fields in " + path);
    }
    const std::string ctx = path + ":" + std::to_string(row_no);

    Frame frame;
    frame.frame_index = parse_int(f[col["frame"]], ctx);
    const auto track_id = static_cast<std::int32_t>(parse_int(f[col["id"]], ctx));
    frame.x = parse_double(f[col["x"]], ctx);
    frame.y = parse_double(f[col["y"]], ctx);
    frame.x_velocity = parse_double(f[col["xVelocity"]], ctx);
    frame.y_velocity = parse_double(f[col["yVelocity"]], ctx);
    frame.x_acceleration = parse_double(f[col["xAcceleration"]], ctx);
    frame.y_acceleration = parse_double(f[col["yAcceleration"]], ctx);
    frame.lat_velocity = parse_double(f[col["latVelocity"]], ctx);
    frame.lane_id = static_cast<std::int32_t>(parse_int(f[col["laneId"]], ctx));
    frame.lateral_lane_offset = parse_double(f[col["latLaneCenterOffset"]], ctx);
    frame.dist_left_boundary = parse_double(f[col["distLeftBoundary"]], ctx);
    frame.dist_right_boundary = parse_double(f[col["distRightBoundary"]], ctx);
    frame.dhw = optional_field(f[col["dhw"]], ctx);
    frame.thw = optional_field(f[col["thw"]], ctx);
    frame.ttc = optional_field(f[col["ttc"]], ctx);
    // Negative surrogate-safety values are no-value sentinels.
    if (frame.dhw && *frame.dhw < 0.0) frame.dhw.reset();
    if (frame.thw && *frame.thw < 0.0) frame.thw.reset();
    if (frame.ttc && *frame.ttc < 0.0) frame.ttc.reset();

    static const char* const kNeighborCols[kNumNeighborPos] = {
        "leadId",     "rearId",      "leftLeadId",  "leftAlongsideId",
        "leftRearId", "rightLeadId", "rightAlongsideId", "rightRearId",
    };
    for (int p = 0; p < kNumNeighborPos; ++p) {
      frame.neighbor_ids[p] = neighbor_field(f[col[kNeighborCols[p]]], ctx);
    }

    if (has_ramp_cols) {
      const auto entry = optional_field(f[col["distToEntry"]], ctx);
      const auto exit = optional_field(f[col["distToExit"]], ctx);
      const auto eta = optional_field(f[col["etaExit"]], ctx);
      if (entry && exit && eta) {
        frame.ramp_meta = RampMeta{*entry, *exit, *eta};
      }
    }

    const auto vclass = parse_vehicle_class(f[col["vehicleClass"]]);
    auto it = track_slot.find(track_id);
    if (it == track_slot.end()) {
      track_slot.emplace(track_id, rec.tracks.size());
      Track track;
      track.track_id = track_id;
      track.vehicle_class = vclass;
      track.frames.push_back(frame);
      rec.tracks.push_back(std::move(track));
    } else {
      Track& track = rec.tracks[it->second];
      if (frame.frame_index != track.frames.back().frame_index + 1) {
        throw Error(ErrorCode::NonMonotonicFrames,
                    "track " + std::to_string(track_id) + " in " + path);
      }
      track.frames.push_back(frame);
    }
  }

  if (rec.tracks.empty()) {
    throw Error(ErrorCode::EmptyRecording, path);
  }
  validate_recording(rec);
  return rec;
}

void write_recording(const Recording& rec, const std::string& path) {
  validate_recording(rec);
  const bool ramp = rec.dataset_kind == DatasetKind::Ramp;

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
  }

  std::ostringstream header;
  for (std::size_t i = 0; i < std::size(kRequiredColumns); ++i) {
    if (i) header << ',';
    header << kRequiredColumns[i];
  }
  if (ramp) {
    for (const char* name : kRampColumns) header << ',' << name;
  }
  out << header.str() << '\n';

  for (const auto& track : rec.tracks) {
    for (const auto& f : track.frames) {
      out << f.frame_index << ',' << track.track_id << ',' << format_double(f.x)
          << ',' << format_double(f.y) << ',' << format_double(f.x_velocity)
          << ',' << format_double(f.y_velocity) << ','
          << format_double(f.x_acceleration) << ','
          << format_double(f.y_acceleration) << ','
          << format_double(f.lat_velocity) << ',' << f.lane_id << ','
          << format_double(f.lateral_lane_offset) << ','
          << format_double(f.dist_left_boundary) << ','
          << format_double(f.dist_right_boundary);
      for (const auto& opt : {f.dhw, f.thw, f.ttc}) {
        out << ',';
        if (opt) out << format_double(*opt);
      }
      for (int p = 0; p < kNumNeighborPos; ++p) {
        out << ',';
        if (f.neighbor_ids[p]) out << *f.neighbor_ids[p];
      }
      out << ',' << vehicle_class_name(track.vehicle_class);
      if (ramp) {
        if (f.ramp_meta) {
          out << ',' << format_double(f.ramp_meta->dist_to_entry) << ','
              << format_double(f.ramp_meta->dist_to_exit) << ','
              << format_double(f.ramp_meta->eta_exit);
        } else {
          out << ",,,";
        }
      }
      out << '\n';
    }
  }
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write failed: " + path);
  }

  std::ofstream meta(meta_path_for(path), std::ios::binary);
  if (!meta) {
    throw Error(ErrorCode::IoFailure, "cannot open for writing: " + meta_path_for(path));
  }
  meta << "recordingId,locationId,samplingRate,datasetKind,speedLimit\n";
  meta << rec.recording_id << ',' << rec.location_id << ','
       << format_double(rec.sampling_rate) << ','
       << dataset_kind_name(rec.dataset_kind) << ',';
  if (rec.speed_limit) meta << format_double(*rec.speed_limit);
  meta << '\n';
  if (!meta) {
    throw Error(ErrorCode::IoFailure, "write failed: " + meta_path_for(path));
  }
}

}  // namespace lci
