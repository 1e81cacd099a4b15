#ifndef PRIVSIM_GESTURE_HPP
#define PRIVSIM_GESTURE_HPP

#include <optional>
#include <vector>

#include "privsim/face_tracker.hpp"
#include "privsim/geometry.hpp"
#include "privsim/types.hpp"

namespace privsim {

// The five landmarks the swipe logic consumes, normalized to [0,1]^2.
struct HandObservation {
  NormPoint wrist;
  NormPoint index_mcp;
  NormPoint pinky_mcp;
  NormPoint index_tip;
  NormPoint pinky_tip;
};

// Palm center = mean of wrist and the two MCP landmarks.
NormPoint palm_center(const HandObservation&);

struct PalmSample {
  double t_ms;
  double x;
  double y;  // kept alongside x: the vertical-zone check spans the window
};

struct TrackedHand {
  int hand_id = 0;
  NormPoint wrist;
  HandObservation last_obs;
  std::vector<PalmSample> history;  // ascending t, bounded by max age
  double last_seen_ms = 0;
  double hand_cooldown_until_ms = 0;
};

struct GestureConfig {
  double history_max_age_ms = 300.0;
  double min_swipe_distance_factor = 0.8;  // fraction of face bbox width
  double vertical_tolerance_factor = 0.5;  // fraction of face bbox height
  double cooldown_ms = 1500.0;
  double hand_match_max_distance = 0.1;  // normalized wrist distance
  double geo_tolerance = 0.10;
  bool mirror_direction = false;  // flip the left/right-to-command mapping
};

// Wrist-proximity tracker, same greedy scheme as the face tracker. Hands
// unseen for longer than the history window are dropped.
class HandTracker {
 public:
  explicit HandTracker(GestureConfig cfg = {}) : cfg_(cfg) {}

  void update(const std::vector<HandObservation>& observations, double now_ms);

  std::vector<TrackedHand>& hands() { return hands_; }
  const std::vector<TrackedHand>& hands() const { return hands_; }

 private:
  GestureConfig cfg_;
  std::vector<TrackedHand> hands_;
  int next_id_ = 1;
};

// Face whose bbox centroid is nearest the wrist; ties go to the lower id.
const TrackedFace* associate_face(const TrackedHand&,
                                  const std::vector<TrackedFace>&);

enum class SwipeOutcome {
  None,              // no qualifying swipe this frame
  Fired,             // command emitted, cooldowns armed, history cleared
  RejectedDistance,  // swipe was valid but hand/face distances disagree
};

struct SwipeResult {
  SwipeOutcome outcome = SwipeOutcome::None;
  Command command = Command::Blur;
  double hand_distance_m = 0;
  double face_distance_m = 0;
};

// Velocity-style swipe recognition over the palm history. Fires only when
// (a) some history point is at least min_swipe_distance_factor * face width
//     away horizontally from the current palm position,
// (b) every sample in that window stayed inside the vertical zone around the
//     face bbox,
// (c) neither the hand nor the face is cooling down, and
// (d) the hand-size and face-size distance estimates agree within tolerance.
// Positive displacement (image +x) requests Blur, negative Unblur.
SwipeResult recognize_swipe(TrackedHand& hand, TrackedFace& face,
                            double now_ms, const CameraModel& cam,
                            const GestureConfig& cfg);

// Pixel separation of the index and pinky fingertips.
double hand_span_px(const HandObservation&, const CameraModel&);

}  // namespace privsim

#endif  // PRIVSIM_GESTURE_HPP
