#ifndef PRIVSIM_FACE_TRACKER_HPP
#define PRIVSIM_FACE_TRACKER_HPP

#include <vector>

#include "privsim/geometry.hpp"
#include "privsim/types.hpp"

namespace privsim {

// Stateless per-frame detection in normalized screen coordinates.
struct FaceDetection {
  NormRect bbox;
  double confidence = 1.0;
};

struct TrackedFace {
  int face_id = 0;
  NormRect bbox;
  double last_seen_ms = 0;
  PrivacyState privacy_state = PrivacyState::Clear;
  double face_cooldown_until_ms = 0;

  NormPoint centroid() const { return bbox.center(); }
  double height_px(const CameraModel& cam) const {
    return bbox.h * cam.height_px;
  }
};

struct TrackerConfig {
  double match_threshold = 0.25;  // normalized centroid distance
  double prune_after_ms = 1000.0;
};

// Inverse of the face size model: 215 px at 1 m.
double estimate_distance_from_face(double bbox_height_px);

struct Annotation {
  int face_id;
  NormRect bbox;
  PrivacyState privacy_state;
};

std::vector<Annotation> render_annotations(const std::vector<TrackedFace>&);

// Nearest-centroid tracker with persistent integer IDs. Matching is greedy in
// ascending pair distance; ties break toward the lower face_id so replays are
// order-stable. IDs are never recycled.
class FaceTracker {
 public:
  explicit FaceTracker(TrackerConfig cfg = {}) : cfg_(cfg) {}

  struct Update {
    std::vector<int> new_ids;
    std::vector<int> lost_ids;
  };

  Update update(const std::vector<FaceDetection>& detections, double now_ms);

  std::vector<TrackedFace>& tracks() { return tracks_; }
  const std::vector<TrackedFace>& tracks() const { return tracks_; }
  TrackedFace* find(int face_id);

  // Idempotent: Blur on an already-Blurred face changes nothing. Returns
  // whether the state actually flipped so callers can timestamp the change.
  bool apply_privacy_command(int face_id, Command cmd, double now_ms);

 private:
  TrackerConfig cfg_;
  std::vector<TrackedFace> tracks_;
  int next_id_ = 1;
};

}  // namespace privsim

#endif  // PRIVSIM_FACE_TRACKER_HPP
