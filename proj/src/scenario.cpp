#include "privsim/scenario.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace privsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key) {
  if (!obj.contains(key)) fail(where, "missing field '" + key + "'");
  if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& where,
                     const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key) {
  if (!obj.contains(key)) fail(where, "missing field '" + key + "'");
  if (!obj[key].is_string()) fail(where + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

Vec3 parse_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected [x, y, z]");
  for (const auto& c : v)
    if (!c.is_number()) fail(where, "expected numeric components");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Modality parse_modality(const std::string& s, const std::string& where) {
  if (s == "gesture") return Modality::Gesture;
  if (s == "vlc") return Modality::Vlc;
  if (s == "uwb") return Modality::Uwb;
  fail(where, "unknown modality '" + s + "'");
}

Command parse_command(const std::string& s, const std::string& where) {
  if (s == "blur") return Command::Blur;
  if (s == "unblur") return Command::Unblur;
  fail(where, "unknown command '" + s + "'");
}

CameraModel parse_camera(const json& obj) {
  require_keys(obj, "camera",
               {"width_px", "height_px", "hfov_deg", "vfov_deg",
                "frame_rate_hz"});
  CameraModel cam;
  cam.width_px = static_cast<int>(get_number_or(obj, "camera", "width_px", cam.width_px));
  cam.height_px =
      static_cast<int>(get_number_or(obj, "camera", "height_px", cam.height_px));
  cam.hfov_deg = get_number_or(obj, "camera", "hfov_deg", cam.hfov_deg);
  cam.vfov_deg = get_number_or(obj, "camera", "vfov_deg", cam.vfov_deg);
  cam.frame_rate_hz =
      get_number_or(obj, "camera", "frame_rate_hz", cam.frame_rate_hz);
  if (cam.width_px <= 0 || cam.height_px <= 0)
    fail("camera", "frame dimensions must be positive");
  if (cam.frame_rate_hz <= 0) fail("camera", "frame_rate_hz must be positive");
  return cam;
}

NoiseModel parse_noise(const json& obj) {
  require_keys(obj, "noise",
               {"face_dropout_prob", "bbox_jitter_sigma", "hand_dropout_prob",
                "blob_dropout_prob", "false_blob_rate", "uwb_angle_sigma_deg",
                "uwb_distance_sigma_m", "rng_seed"});
  NoiseModel n;
  n.face_dropout_prob = get_number_or(obj, "noise", "face_dropout_prob", 0);
  n.bbox_jitter_sigma = get_number_or(obj, "noise", "bbox_jitter_sigma", 0);
  n.hand_dropout_prob = get_number_or(obj, "noise", "hand_dropout_prob", 0);
  n.blob_dropout_prob = get_number_or(obj, "noise", "blob_dropout_prob", 0);
  n.false_blob_rate = get_number_or(obj, "noise", "false_blob_rate", 0);
  n.uwb_angle_sigma_deg = get_number_or(obj, "noise", "uwb_angle_sigma_deg", 0);
  n.uwb_distance_sigma_m =
      get_number_or(obj, "noise", "uwb_distance_sigma_m", 0);
  n.rng_seed = static_cast<uint64_t>(get_number_or(obj, "noise", "rng_seed", 1));
  for (const double p :
       {n.face_dropout_prob, n.hand_dropout_prob, n.blob_dropout_prob}) {
    if (p < 0 || p > 1) fail("noise", "probabilities must lie in [0, 1]");
  }
  if (n.false_blob_rate < 0) fail("noise", "false_blob_rate must be >= 0");
  return n;
}

Actor parse_actor(const json& obj, size_t index) {
  const std::string where = "actors[" + std::to_string(index) + "]";
  require_keys(obj, where,
               {"actor_id", "position_m", "trajectory", "face_height_m",
                "emit_face", "devices", "hand_target"});
  Actor actor;
  actor.actor_id = get_string(obj, where, "actor_id");
  if (actor.actor_id.empty()) fail(where, "actor_id must not be empty");

  const bool has_pos = obj.contains("position_m");
  const bool has_traj = obj.contains("trajectory");
  if (has_pos == has_traj)
    fail(where, "exactly one of 'position_m' or 'trajectory' is required");
  if (has_pos) {
    actor.trajectory.points.push_back(
        {0.0, parse_vec3(obj["position_m"], where + ".position_m")});
  } else {
    const json& traj = obj["trajectory"];
    if (!traj.is_array() || traj.empty())
      fail(where + ".trajectory", "expected a non-empty array");
    double prev_t = -1;
    for (size_t i = 0; i < traj.size(); ++i) {
      const std::string pw = where + ".trajectory[" + std::to_string(i) + "]";
      require_keys(traj[i], pw, {"t_ms", "pos_m"});
      TrajectoryPoint pt;
      pt.t_ms = get_number(traj[i], pw, "t_ms");
      pt.pos = parse_vec3(traj[i]["pos_m"], pw + ".pos_m");
      if (pt.t_ms <= prev_t) fail(pw, "trajectory times must be increasing");
      prev_t = pt.t_ms;
      actor.trajectory.points.push_back(pt);
    }
  }

  actor.face_height_m = get_number_or(obj, where, "face_height_m", 0.244);
  if (obj.contains("emit_face")) {
    if (!obj["emit_face"].is_boolean())
      fail(where + ".emit_face", "expected a boolean");
    actor.emit_face = obj["emit_face"].get<bool>();
  }
  if (obj.contains("hand_target"))
    actor.hand_target_actor_id = get_string(obj, where, "hand_target");

  if (obj.contains("devices")) {
    const json& dev = obj["devices"];
    require_keys(dev, where + ".devices", {"led_beacon", "uwb_mac"});
    if (dev.contains("led_beacon")) {
      if (!dev["led_beacon"].is_boolean())
        fail(where + ".devices.led_beacon", "expected a boolean");
      actor.devices.led_beacon = dev["led_beacon"].get<bool>();
    }
    if (dev.contains("uwb_mac")) {
      actor.devices.uwb_tag = true;
      actor.devices.uwb_mac =
          parse_mac(get_string(dev, where + ".devices", "uwb_mac"));
    }
  }
  return actor;
}

SignalEvent parse_event(const json& obj, size_t index, const Scenario& sc) {
  const std::string where = "events[" + std::to_string(index) + "]";
  require_keys(obj, where,
               {"time_ms", "actor_id", "modality", "command",
                "gesture_duration_ms"});
  SignalEvent ev;
  ev.time_ms = get_number(obj, where, "time_ms");
  if (ev.time_ms < 0) fail(where, "time_ms must be >= 0");
  ev.actor_id = get_string(obj, where, "actor_id");
  const int actor = sc.actor_index(ev.actor_id);
  if (actor < 0) fail(where, "unknown actor '" + ev.actor_id + "'");
  ev.modality = parse_modality(get_string(obj, where, "modality"), where);
  ev.command = parse_command(get_string(obj, where, "command"), where);
  if (ev.modality != sc.active_modality)
    fail(where, "event modality does not match active_modality; scenarios use "
                "one signaling modality at a time");

  const Actor& a = sc.actors[actor];
  switch (ev.modality) {
    case Modality::Gesture:
      ev.gesture_duration_ms = get_number(obj, where, "gesture_duration_ms");
      if (ev.gesture_duration_ms <= 0)
        fail(where, "gesture_duration_ms must be positive");
      break;
    case Modality::Vlc:
      if (!a.devices.led_beacon)
        fail(where, "actor '" + ev.actor_id + "' has no led_beacon");
      break;
    case Modality::Uwb:
      if (!a.devices.uwb_tag)
        fail(where, "actor '" + ev.actor_id + "' has no uwb_mac");
      break;
  }
  if (obj.contains("gesture_duration_ms") && ev.modality != Modality::Gesture)
    fail(where, "gesture_duration_ms only applies to gesture events");
  return ev;
}

CheckThresholds parse_check(const json& obj) {
  require_keys(obj, "check",
               {"min_accuracy", "max_fp_rate", "max_fn_rate", "min_latency_ms",
                "max_latency_ms", "max_ranging_sessions"});
  CheckThresholds c;
  if (obj.contains("min_accuracy"))
    c.min_accuracy = get_number(obj, "check", "min_accuracy");
  if (obj.contains("max_fp_rate"))
    c.max_fp_rate = get_number(obj, "check", "max_fp_rate");
  if (obj.contains("max_fn_rate"))
    c.max_fn_rate = get_number(obj, "check", "max_fn_rate");
  if (obj.contains("min_latency_ms"))
    c.min_latency_ms = get_number(obj, "check", "min_latency_ms");
  if (obj.contains("max_latency_ms"))
    c.max_latency_ms = get_number(obj, "check", "max_latency_ms");
  if (obj.contains("max_ranging_sessions"))
    c.max_ranging_sessions =
        static_cast<int>(get_number(obj, "check", "max_ranging_sessions"));
  return c;
}

}  // namespace

uint64_t parse_mac(const std::string& s) {
  if (s.size() != 12) fail("uwb_mac", "expected 12 hex digits");
  uint64_t mac = 0;
  for (const char c : s) {
    if (!std::isxdigit(static_cast<unsigned char>(c)))
      fail("uwb_mac", "expected 12 hex digits");
    mac = (mac << 4) |
          static_cast<uint64_t>(std::isdigit(static_cast<unsigned char>(c))
                                    ? c - '0'
                                    : std::tolower(c) - 'a' + 10);
  }
  return mac;
}

std::string format_mac(uint64_t mac) {
  char buf[13];
  std::snprintf(buf, sizeof(buf), "%012llx",
                static_cast<unsigned long long>(mac));
  return buf;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  require_keys(root, "scenario",
               {"schema_version", "camera", "actors", "events", "noise",
                "duration_ms", "active_modality", "packet_bits", "label",
                "repetitions", "check"});

  Scenario sc;
  sc.schema_version =
      static_cast<int>(get_number_or(root, "scenario", "schema_version", 1));
  if (sc.schema_version != 1) fail("schema_version", "unsupported version");
  if (root.contains("camera")) sc.camera = parse_camera(root["camera"]);
  if (root.contains("noise")) sc.noise = parse_noise(root["noise"]);
  sc.duration_ms = get_number(root, "scenario", "duration_ms");
  if (sc.duration_ms <= 0) fail("duration_ms", "must be positive");
  sc.active_modality = parse_modality(
      get_string(root, "scenario", "active_modality"), "active_modality");
  sc.packet_bits =
      static_cast<int>(get_number_or(root, "scenario", "packet_bits", 18));
  if (sc.packet_bits < 14 || sc.packet_bits > 26)
    fail("packet_bits", "must lie in [14, 26]");
  if (root.contains("label")) sc.label = get_string(root, "scenario", "label");
  sc.repetitions =
      static_cast<int>(get_number_or(root, "scenario", "repetitions", 1));
  if (sc.repetitions < 1) fail("repetitions", "must be >= 1");

  if (!root.contains("actors") || !root["actors"].is_array())
    fail("actors", "expected an array");
  for (size_t i = 0; i < root["actors"].size(); ++i) {
    Actor actor = parse_actor(root["actors"][i], i);
    if (sc.actor_index(actor.actor_id) >= 0)
      fail("actors[" + std::to_string(i) + "]",
           "duplicate actor_id '" + actor.actor_id + "'");
    sc.actors.push_back(std::move(actor));
  }
  for (size_t i = 0; i < sc.actors.size(); ++i) {
    const std::string& target = sc.actors[i].hand_target_actor_id;
    if (!target.empty() && sc.actor_index(target) < 0)
      fail("actors[" + std::to_string(i) + "].hand_target",
           "unknown actor '" + target + "'");
  }

  if (root.contains("events")) {
    if (!root["events"].is_array()) fail("events", "expected an array");
    double prev_t = -1;
    for (size_t i = 0; i < root["events"].size(); ++i) {
      SignalEvent ev = parse_event(root["events"][i], i, sc);
      if (ev.time_ms < prev_t)
        fail("events[" + std::to_string(i) + "]",
             "events must be sorted by time");
      prev_t = ev.time_ms;
      sc.events.push_back(ev);
    }
  }

  if (root.contains("check")) sc.check = parse_check(root["check"]);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace privsim
