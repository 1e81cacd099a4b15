#include "privsim/face_tracker.hpp"

#include <algorithm>
#include <cmath>

namespace privsim {

double estimate_distance_from_face(double bbox_height_px) {
  if (bbox_height_px <= 0)
    throw std::domain_error("face bbox height must be positive");
  return kFaceHeightPxAt1m / bbox_height_px;
}

std::vector<Annotation> render_annotations(
    const std::vector<TrackedFace>& tracks) {
  std::vector<Annotation> out;
  out.reserve(tracks.size());
  for (const auto& t : tracks)
    out.push_back({t.face_id, t.bbox, t.privacy_state});
  return out;
}

FaceTracker::Update FaceTracker::update(
    const std::vector<FaceDetection>& detections, double now_ms) {
  Update result;

  // Prune first: a track past its retention budget cannot claim a detection.
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (now_ms - it->last_seen_ms > cfg_.prune_after_ms) {
      result.lost_ids.push_back(it->face_id);
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }

  struct Candidate {
    double dist;
    int track_idx;
    int det_idx;
  };
  std::vector<Candidate> candidates;
  for (size_t ti = 0; ti < tracks_.size(); ++ti) {
    for (size_t di = 0; di < detections.size(); ++di) {
      const double d =
          distance(tracks_[ti].centroid(), detections[di].bbox.center());
      if (d < cfg_.match_threshold)
        candidates.push_back({d, static_cast<int>(ti), static_cast<int>(di)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [this](const Candidate& a, const Candidate& b) {
              if (a.dist != b.dist) return a.dist < b.dist;
              const int ida = tracks_[a.track_idx].face_id;
              const int idb = tracks_[b.track_idx].face_id;
              if (ida != idb) return ida < idb;
              return a.det_idx < b.det_idx;
            });

  std::vector<char> track_used(tracks_.size(), 0);
  std::vector<char> det_used(detections.size(), 0);
  for (const auto& c : candidates) {
    if (track_used[c.track_idx] || det_used[c.det_idx]) continue;
    track_used[c.track_idx] = 1;
    det_used[c.det_idx] = 1;
    TrackedFace& t = tracks_[c.track_idx];
    t.bbox = detections[c.det_idx].bbox;
    t.last_seen_ms = now_ms;
  }

  for (size_t di = 0; di < detections.size(); ++di) {
    if (det_used[di]) continue;
    TrackedFace t;
    t.face_id = next_id_++;
    t.bbox = detections[di].bbox;
    t.last_seen_ms = now_ms;
    tracks_.push_back(t);
    result.new_ids.push_back(t.face_id);
  }
  return result;
}

TrackedFace* FaceTracker::find(int face_id) {
  for (auto& t : tracks_)
    if (t.face_id == face_id) return &t;
  return nullptr;
}

bool FaceTracker::apply_privacy_command(int face_id, Command cmd,
                                        double /*now_ms*/) {
  TrackedFace* t = find(face_id);
  if (!t) return false;
  const PrivacyState next = target_state(cmd);
  if (t->privacy_state == next) return false;
  t->privacy_state = next;
  return true;
}

}  // namespace privsim
