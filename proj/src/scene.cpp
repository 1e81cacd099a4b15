#include "privsim/scene.hpp"

#include <algorithm>
#include <cmath>

namespace privsim {

Vec3 Trajectory::at(double t_ms) const {
  if (points.empty()) return {};
  if (t_ms <= points.front().t_ms) return points.front().pos;
  if (t_ms >= points.back().t_ms) return points.back().pos;
  for (size_t i = 1; i < points.size(); ++i) {
    if (t_ms > points[i].t_ms) continue;
    const TrajectoryPoint& a = points[i - 1];
    const TrajectoryPoint& b = points[i];
    const double span = b.t_ms - a.t_ms;
    const double u = span > 0 ? (t_ms - a.t_ms) / span : 0.0;
    return {a.pos.x + u * (b.pos.x - a.pos.x),
            a.pos.y + u * (b.pos.y - a.pos.y),
            a.pos.z + u * (b.pos.z - a.pos.z)};
  }
  return points.back().pos;
}

int Scenario::actor_index(const std::string& id) const {
  for (size_t i = 0; i < actors.size(); ++i)
    if (actors[i].actor_id == id) return static_cast<int>(i);
  return -1;
}

namespace {
constexpr uint64_t kUwbStreamSalt = 0x7577625f73696ull;  // independent stream
}

SceneSimulator::SceneSimulator(const Scenario& scenario, uint64_t seed)
    : scenario_(&scenario), seed_(seed) {
  // Lay out VLC transmissions on the frame grid, queued per actor so they
  // never overlap on one beacon.
  VlcConfig codec;
  codec.packet_bits = scenario.packet_bits;
  std::vector<int> next_free_frame(scenario.actors.size(), 0);
  for (const SignalEvent& ev : scenario.events) {
    const int actor = scenario.actor_index(ev.actor_id);
    if (actor < 0) continue;
    switch (ev.modality) {
      case Modality::Vlc: {
        Transmission tx;
        tx.actor_index = actor;
        tx.start_frame = std::max(frame_for_time(ev.time_ms),
                                  next_free_frame[actor]);
        tx.bits = encode_packet(ev.command, codec);
        next_free_frame[actor] = tx.start_frame + tx.bits.size;
        transmissions_.push_back(tx);
        break;
      }
      case Modality::Gesture: {
        HandScript script;
        script.actor_index = actor;
        const std::string& target = scenario.actors[actor].hand_target_actor_id;
        script.target_index =
            target.empty() ? actor : scenario.actor_index(target);
        script.t0_ms = ev.time_ms;
        script.duration_ms = ev.gesture_duration_ms;
        script.direction = ev.command == Command::Blur ? 1.0 : -1.0;
        hand_scripts_.push_back(script);
        break;
      }
      case Modality::Uwb:
        break;  // delivered as BLE triggers straight from the event list
    }
  }
}

int SceneSimulator::frame_for_time(double t_ms) const {
  const double period = scenario_->camera.frame_period_ms();
  return static_cast<int>(std::ceil(t_ms / period));
}

Vec3 SceneSimulator::actor_position(int actor_index, double t_ms) const {
  return scenario_->actors[actor_index].trajectory.at(t_ms);
}

std::optional<PixelPoint> SceneSimulator::actor_face_px(int actor_index,
                                                        double t_ms) const {
  const auto proj =
      project_point(scenario_->camera, actor_position(actor_index, t_ms));
  if (!proj) return std::nullopt;
  return proj->px;
}

int SceneSimulator::actor_index_for_mac(uint64_t mac) const {
  for (size_t i = 0; i < scenario_->actors.size(); ++i) {
    const DeviceSet& d = scenario_->actors[i].devices;
    if (d.uwb_tag && d.uwb_mac == mac) return static_cast<int>(i);
  }
  return -1;
}

std::optional<NormRect> SceneSimulator::true_face_bbox(int actor_index,
                                                       double t_ms) const {
  const CameraModel& cam = scenario_->camera;
  const auto proj = project_point(cam, actor_position(actor_index, t_ms));
  if (!proj) return std::nullopt;
  const double h = face_pixel_height(proj->depth_m) / cam.height_px;
  const double w = kFaceAspect * face_pixel_height(proj->depth_m) / cam.width_px;
  NormRect bbox{proj->px.x / cam.width_px - w / 2.0,
                proj->px.y / cam.height_px - h / 2.0, w, h};
  return bbox;
}

FrameObservation SceneSimulator::synthesize_frame(int frame_index) const {
  const Scenario& sc = *scenario_;
  const CameraModel& cam = sc.camera;
  const double t = frame_index * cam.frame_period_ms();
  Rng rng(Rng::mix(seed_, static_cast<uint64_t>(frame_index)));

  FrameObservation obs;
  obs.t_ms = t;

  // Faces, in actor order.
  for (size_t ai = 0; ai < sc.actors.size(); ++ai) {
    const Actor& actor = sc.actors[ai];
    if (!actor.emit_face) continue;
    auto bbox = true_face_bbox(static_cast<int>(ai), t);
    if (!bbox) continue;
    if (rng.next_coin(sc.noise.face_dropout_prob)) continue;
    NormRect r = *bbox;
    if (sc.noise.bbox_jitter_sigma > 0) {
      r.x += rng.next_gaussian(0, sc.noise.bbox_jitter_sigma);
      r.y += rng.next_gaussian(0, sc.noise.bbox_jitter_sigma);
    }
    const double x1 = std::min(r.right(), 1.0);
    const double y1 = std::min(r.bottom(), 1.0);
    r.x = std::max(r.x, 0.0);
    r.y = std::max(r.y, 0.0);
    r.w = x1 - r.x;
    r.h = y1 - r.y;
    if (r.w <= 0 || r.h <= 0) continue;
    obs.faces.push_back({r, 1.0});
  }

  // Scripted hands.
  for (const HandScript& script : hand_scripts_) {
    if (t < script.t0_ms || t > script.t0_ms + script.duration_ms) continue;
    const Vec3 owner_pos = actor_position(script.actor_index, t);
    if (owner_pos.norm() > kHandDetectionMaxRangeM) continue;  // range limit
    if (script.target_index < 0) continue;
    const auto target_bbox = true_face_bbox(script.target_index, t);
    if (!target_bbox) continue;
    if (rng.next_coin(sc.noise.hand_dropout_prob)) continue;

    const double progress =
        script.duration_ms > 0 ? (t - script.t0_ms) / script.duration_ms : 1.0;
    const NormPoint face_c = target_bbox->center();
    const double travel = kGestureSwipeFaceWidths * target_bbox->w;
    const double palm_x =
        face_c.x + script.direction * travel * (progress - 0.5);
    const double palm_y = face_c.y;

    const double span_px = hand_keypoint_span(owner_pos.norm());
    const double half_span = span_px / cam.width_px / 2.0;
    HandObservation hand;
    hand.wrist = {palm_x, palm_y};
    hand.index_mcp = {palm_x, palm_y};
    hand.pinky_mcp = {palm_x, palm_y};
    hand.index_tip = {palm_x - half_span, palm_y};
    hand.pinky_tip = {palm_x + half_span, palm_y};
    obs.hands.push_back(hand);
  }

  // Lit LED blobs for the active transmission bit.
  for (const Transmission& tx : transmissions_) {
    const int bit_idx = frame_index - tx.start_frame;
    if (bit_idx < 0 || bit_idx >= tx.bits.size) continue;
    if (tx.bits.bit(bit_idx) == 0) continue;
    Vec3 torso = actor_position(tx.actor_index, t);
    torso.y += kLedTorsoDropM;
    const auto proj = project_point(cam, torso);
    if (!proj) continue;
    if (rng.next_coin(sc.noise.blob_dropout_prob)) continue;
    obs.luminance_blobs.push_back(
        {proj->px, led_blob_area(proj->depth_m), true});
  }

  // Spurious bright spots, scattered over each visible face's search region.
  if (sc.noise.false_blob_rate > 0) {
    for (size_t ai = 0; ai < sc.actors.size(); ++ai) {
      if (!sc.actors[ai].emit_face) continue;
      const auto bbox = true_face_bbox(static_cast<int>(ai), t);
      if (!bbox) continue;
      const int count = rng.next_poisson(sc.noise.false_blob_rate);
      if (count == 0) continue;
      TrackedFace proxy;
      proxy.bbox = *bbox;
      const SearchRegion region = search_region_for_face(proxy, cam);
      const double dist =
          estimate_distance_from_face(bbox->h * cam.height_px);
      const double nominal_area = led_blob_area(dist);
      for (int k = 0; k < count; ++k) {
        const double x = rng.next_uniform_in(region.rect.x, region.rect.right());
        const double y = rng.next_uniform_in(region.rect.y, region.rect.bottom());
        const double area =
            std::max(1.0, nominal_area * rng.next_uniform_in(0.5, 1.5));
        obs.luminance_blobs.push_back({{x, y}, area, false});
      }
    }
  }

  // BLE triggers scheduled for this frame.
  for (const SignalEvent& ev : sc.events) {
    if (ev.modality != Modality::Uwb) continue;
    if (frame_for_time(ev.time_ms) != frame_index) continue;
    const int actor = sc.actor_index(ev.actor_id);
    if (actor < 0) continue;
    const DeviceSet& dev = sc.actors[actor].devices;
    if (!dev.uwb_tag) continue;
    obs.ble_triggers.push_back({ev.time_ms, dev.uwb_mac, ev.command});
  }

  return obs;
}

RangingReading SceneSimulator::uwb_measurement(uint64_t mac,
                                               int reading_serial,
                                               double t_ms) const {
  const int actor = actor_index_for_mac(mac);
  RangingReading r;
  if (actor < 0) return r;
  // The tag rides at face height (handheld), so its angles line up with the
  // face the protocol binds it to.
  const Vec3 p = actor_position(actor, t_ms);
  r.distance_m = p.norm();
  r.azimuth_deg = rad2deg(std::atan2(p.x, p.z));
  r.elevation_deg = rad2deg(std::atan2(-p.y, std::hypot(p.x, p.z)));

  const NoiseModel& noise = scenario_->noise;
  if (noise.uwb_distance_sigma_m > 0 || noise.uwb_angle_sigma_deg > 0) {
    Rng rng(Rng::mix(Rng::mix(seed_, kUwbStreamSalt),
                     Rng::mix(mac, static_cast<uint64_t>(reading_serial))));
    r.distance_m =
        std::max(0.01, rng.next_gaussian(r.distance_m, noise.uwb_distance_sigma_m));
    r.azimuth_deg = rng.next_gaussian(r.azimuth_deg, noise.uwb_angle_sigma_deg);
    r.elevation_deg =
        rng.next_gaussian(r.elevation_deg, noise.uwb_angle_sigma_deg);
  }
  return r;
}

}  // namespace privsim
