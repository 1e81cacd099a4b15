#include "privsim/gesture.hpp"

#include <algorithm>
#include <cmath>

namespace privsim {

NormPoint palm_center(const HandObservation& obs) {
  return {(obs.wrist.x + obs.index_mcp.x + obs.pinky_mcp.x) / 3.0,
          (obs.wrist.y + obs.index_mcp.y + obs.pinky_mcp.y) / 3.0};
}

double hand_span_px(const HandObservation& obs, const CameraModel& cam) {
  const double dx = (obs.index_tip.x - obs.pinky_tip.x) * cam.width_px;
  const double dy = (obs.index_tip.y - obs.pinky_tip.y) * cam.height_px;
  return std::hypot(dx, dy);
}

void HandTracker::update(const std::vector<HandObservation>& observations,
                         double now_ms) {
  for (auto it = hands_.begin(); it != hands_.end();) {
    if (now_ms - it->last_seen_ms > cfg_.history_max_age_ms)
      it = hands_.erase(it);
    else
      ++it;
  }

  struct Candidate {
    double dist;
    int hand_idx;
    int obs_idx;
  };
  std::vector<Candidate> candidates;
  for (size_t hi = 0; hi < hands_.size(); ++hi) {
    for (size_t oi = 0; oi < observations.size(); ++oi) {
      const double d = distance(hands_[hi].wrist, observations[oi].wrist);
      if (d < cfg_.hand_match_max_distance)
        candidates.push_back({d, static_cast<int>(hi), static_cast<int>(oi)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [this](const Candidate& a, const Candidate& b) {
              if (a.dist != b.dist) return a.dist < b.dist;
              const int ida = hands_[a.hand_idx].hand_id;
              const int idb = hands_[b.hand_idx].hand_id;
              if (ida != idb) return ida < idb;
              return a.obs_idx < b.obs_idx;
            });

  std::vector<char> hand_used(hands_.size(), 0);
  std::vector<char> obs_used(observations.size(), 0);
  auto absorb = [&](TrackedHand& h, const HandObservation& obs) {
    h.wrist = obs.wrist;
    h.last_obs = obs;
    h.last_seen_ms = now_ms;
    const NormPoint palm = palm_center(obs);
    h.history.push_back({now_ms, palm.x, palm.y});
    while (!h.history.empty() &&
           now_ms - h.history.front().t_ms > cfg_.history_max_age_ms)
      h.history.erase(h.history.begin());
  };

  for (const auto& c : candidates) {
    if (hand_used[c.hand_idx] || obs_used[c.obs_idx]) continue;
    hand_used[c.hand_idx] = 1;
    obs_used[c.obs_idx] = 1;
    absorb(hands_[c.hand_idx], observations[c.obs_idx]);
  }
  for (size_t oi = 0; oi < observations.size(); ++oi) {
    if (obs_used[oi]) continue;
    TrackedHand h;
    h.hand_id = next_id_++;
    absorb(h, observations[oi]);
    hands_.push_back(std::move(h));
  }
}

const TrackedFace* associate_face(const TrackedHand& hand,
                                  const std::vector<TrackedFace>& faces) {
  const TrackedFace* best = nullptr;
  double best_dist = 0;
  for (const auto& f : faces) {
    const double d = distance(hand.wrist, f.centroid());
    if (!best || d < best_dist ||
        (d == best_dist && f.face_id < best->face_id)) {
      best = &f;
      best_dist = d;
    }
  }
  return best;
}

SwipeResult recognize_swipe(TrackedHand& hand, TrackedFace& face,
                            double now_ms, const CameraModel& cam,
                            const GestureConfig& cfg) {
  SwipeResult res;
  if (hand.history.empty() || hand.history.back().t_ms != now_ms)
    return res;  // no sample this frame
  if (now_ms < hand.hand_cooldown_until_ms ||
      now_ms < face.face_cooldown_until_ms)
    return res;

  const double zone_top =
      face.bbox.y - cfg.vertical_tolerance_factor * face.bbox.h;
  const double zone_bottom =
      face.bbox.bottom() + cfg.vertical_tolerance_factor * face.bbox.h;
  const auto in_zone = [&](const PalmSample& s) {
    return s.y >= zone_top && s.y <= zone_bottom;
  };

  const PalmSample& cur = hand.history.back();
  if (!in_zone(cur)) return res;

  // Walk backwards from the newest sample; the first out-of-zone sample ends
  // the usable window, since any older pair would span it.
  double best_dx = 0;
  for (auto it = hand.history.rbegin() + 1; it != hand.history.rend(); ++it) {
    if (!in_zone(*it)) break;
    const double dx = cur.x - it->x;
    if (std::abs(dx) > std::abs(best_dx)) best_dx = dx;
  }

  const double threshold = cfg.min_swipe_distance_factor * face.bbox.w;
  if (std::abs(best_dx) < threshold) return res;

  const double span = hand_span_px(hand.last_obs, cam);
  if (span <= 0) return res;
  res.hand_distance_m = kHandSpanPxAt1m / span;
  res.face_distance_m = estimate_distance_from_face(face.height_px(cam));
  if (std::abs(res.hand_distance_m - res.face_distance_m) /
          res.face_distance_m >
      cfg.geo_tolerance) {
    res.outcome = SwipeOutcome::RejectedDistance;
    return res;
  }

  bool positive = best_dx > 0;
  if (cfg.mirror_direction) positive = !positive;
  res.command = positive ? Command::Blur : Command::Unblur;
  res.outcome = SwipeOutcome::Fired;
  hand.hand_cooldown_until_ms = now_ms + cfg.cooldown_ms;
  face.face_cooldown_until_ms = now_ms + cfg.cooldown_ms;
  hand.history.clear();
  return res;
}

}  // namespace privsim
