#include "privsim/uwb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace privsim {

RangingReading smooth_burst(const std::vector<RangingReading>& readings,
                            const UwbConfig& cfg) {
  if (static_cast<int>(readings.size()) != cfg.total_reading_count)
    throw std::invalid_argument("burst must contain total_reading_count readings");
  RangingReading mean;
  const int n = cfg.readings_to_average;
  for (int i = cfg.total_reading_count - n; i < cfg.total_reading_count; ++i) {
    mean.distance_m += readings[i].distance_m;
    mean.azimuth_deg += readings[i].azimuth_deg;
    mean.elevation_deg += readings[i].elevation_deg;
  }
  mean.distance_m /= n;
  mean.azimuth_deg /= n;
  mean.elevation_deg /= n;
  return mean;
}

std::optional<PixelPoint> project_to_screen(const RangingReading& r,
                                            const CameraModel& cam) {
  const double half_h = cam.hfov_deg / 2.0;
  const double half_v = cam.vfov_deg / 2.0;
  if (std::abs(r.azimuth_deg) > half_h || std::abs(r.elevation_deg) > half_v)
    return std::nullopt;
  return PixelPoint{(r.azimuth_deg / half_h + 1.0) / 2.0 * cam.width_px,
                    (-r.elevation_deg / half_v + 1.0) / 2.0 * cam.height_px};
}

std::optional<int> bind_reading(PixelPoint point, const RangingReading& r,
                                const std::vector<TrackedFace>& faces,
                                const CameraModel& cam, const UwbConfig& cfg) {
  std::optional<int> best;
  double best_residual = 0;
  for (const TrackedFace& f : faces) {
    const double cx = f.bbox.center().x * cam.width_px;
    const double half_w =
        f.bbox.w * cam.width_px * cfg.bbox_width_expansion / 2.0;
    const double y0 = f.bbox.y * cam.height_px;
    const double y1 = f.bbox.bottom() * cam.height_px;
    if (point.x < cx - half_w || point.x > cx + half_w) continue;
    if (point.y < y0 || point.y > y1) continue;
    const double d_face = estimate_distance_from_face(f.height_px(cam));
    const double residual = std::abs(r.distance_m - d_face);
    if (residual / d_face > cfg.geo_tolerance) continue;
    if (!best || residual < best_residual) {
      best = f.face_id;
      best_residual = residual;
    }
  }
  return best;
}

bool UwbManager::face_live(const std::vector<TrackedFace>& faces, int id) {
  return std::any_of(faces.begin(), faces.end(),
                     [id](const TrackedFace& f) { return f.face_id == id; });
}

UwbManager::TriggerResult UwbManager::on_ble_trigger(
    const BleTrigger& trigger, const std::vector<TrackedFace>& faces,
    double now_ms) {
  TagState& tag = tags_[trigger.mac];

  if (tag.phase == Phase::Ranging)
    return {TriggerAction::Dropped};  // single session per tag

  if (tag.phase == Phase::Bound) {
    if (face_live(faces, tag.bound_face)) {
      ++fast_path_hits_;
      return {TriggerAction::FastPathToggle, tag.bound_face};
    }
    // Stale cache entry; purge and fall through to a full verification.
    bindings_.erase(trigger.mac);
    tag.phase = Phase::Unbound;
    tag.bound_face = -1;
  }

  tag.phase = Phase::Ranging;
  tag.pending = trigger.command;
  tag.trigger_ms = trigger.t_ms;
  tag.burst.clear();
  tag.next_reading_ms = now_ms + cfg_.ranging_interval_ms;
  ++ranging_sessions_started_;
  return {TriggerAction::BurstStarted};
}

std::vector<UwbManager::BurstCompletion> UwbManager::advance(
    double now_ms, const std::vector<TrackedFace>& faces,
    const CameraModel& cam,
    const std::function<RangingReading(uint64_t, int, double)>& reading_fn) {
  std::vector<BurstCompletion> completions;
  for (auto& [mac, tag] : tags_) {
    if (tag.phase != Phase::Ranging) continue;
    while (static_cast<int>(tag.burst.size()) < cfg_.total_reading_count &&
           tag.next_reading_ms <= now_ms) {
      tag.burst.push_back(
          reading_fn(mac, tag.reading_serial++, tag.next_reading_ms));
      tag.next_reading_ms += cfg_.ranging_interval_ms;
    }
    if (static_cast<int>(tag.burst.size()) < cfg_.total_reading_count)
      continue;

    const RangingReading smoothed = smooth_burst(tag.burst, cfg_);
    std::optional<int> face;
    if (const auto point = project_to_screen(smoothed, cam))
      face = bind_reading(*point, smoothed, faces, cam, cfg_);

    BurstCompletion done{mac, tag.pending, face.has_value(),
                         face.value_or(-1), tag.trigger_ms};
    if (face) {
      tag.phase = Phase::Bound;
      tag.bound_face = *face;
      bindings_[mac] = *face;
    } else {
      tag.phase = Phase::Unbound;  // no retry; the tag must trigger again
      tag.bound_face = -1;
    }
    tag.burst.clear();
    completions.push_back(done);
  }
  return completions;
}

void UwbManager::on_face_lost(int face_id) {
  for (auto it = bindings_.begin(); it != bindings_.end();) {
    if (it->second == face_id) {
      auto tag = tags_.find(it->first);
      if (tag != tags_.end() && tag->second.phase == Phase::Bound) {
        tag->second.phase = Phase::Unbound;
        tag->second.bound_face = -1;
      }
      it = bindings_.erase(it);
    } else {
      ++it;
    }
  }
}

bool UwbManager::burst_in_progress(uint64_t mac) const {
  const auto it = tags_.find(mac);
  return it != tags_.end() && it->second.phase == Phase::Ranging;
}

}  // namespace privsim
