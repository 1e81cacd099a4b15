#ifndef PRIVSIM_SCENE_HPP
#define PRIVSIM_SCENE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privsim/face_tracker.hpp"
#include "privsim/geometry.hpp"
#include "privsim/gesture.hpp"
#include "privsim/rng.hpp"
#include "privsim/types.hpp"
#include "privsim/uwb.hpp"
#include "privsim/vlc.hpp"

namespace privsim {

// Hand landmarks are unavailable past this range (detector range limit).
inline constexpr double kHandDetectionMaxRangeM = 3.0;
// The LED beacon sits on the torso, below the face center.
inline constexpr double kLedTorsoDropM = 0.35;
// Total horizontal palm travel of a scripted swipe, in face widths. 1.2 face
// widths is 1.5x the default swipe threshold, so the threshold is crossed
// four frames into a five-frame swipe.
inline constexpr double kGestureSwipeFaceWidths = 1.2;

struct TrajectoryPoint {
  double t_ms = 0;
  Vec3 pos;
};

// Piecewise-linear position over time; clamps outside the defined range.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Vec3 at(double t_ms) const;
};

struct DeviceSet {
  bool led_beacon = false;
  bool uwb_tag = false;
  uint64_t uwb_mac = 0;
};

struct Actor {
  std::string actor_id;
  Trajectory trajectory;  // face-center path in the camera frame
  double face_height_m = 0.244;
  bool emit_face = true;  // false: face stays out of frame (hand/device only)
  DeviceSet devices;
  // When set, scripted hand motion overlays this actor's face on screen while
  // the hand's apparent size still follows the owner's distance.
  std::string hand_target_actor_id;
};

struct NoiseModel {
  double face_dropout_prob = 0;
  double bbox_jitter_sigma = 0;  // normalized, applied to the face centroid
  double hand_dropout_prob = 0;
  double blob_dropout_prob = 0;
  double false_blob_rate = 0;  // expected count per frame per search region
  double uwb_angle_sigma_deg = 0;
  double uwb_distance_sigma_m = 0;
  uint64_t rng_seed = 1;
};

struct SignalEvent {
  double time_ms = 0;
  std::string actor_id;
  Modality modality = Modality::Gesture;
  Command command = Command::Blur;
  double gesture_duration_ms = 0;  // gesture events only
};

struct CheckThresholds {
  std::optional<double> min_accuracy;
  std::optional<double> max_fp_rate;
  std::optional<double> max_fn_rate;
  std::optional<double> min_latency_ms;
  std::optional<double> max_latency_ms;
  std::optional<int> max_ranging_sessions;
};

struct Scenario {
  int schema_version = 1;
  CameraModel camera;
  std::vector<Actor> actors;
  std::vector<SignalEvent> events;  // ascending time
  NoiseModel noise;
  double duration_ms = 0;
  Modality active_modality = Modality::Gesture;
  int packet_bits = 18;
  std::string label;
  int repetitions = 1;
  std::optional<CheckThresholds> check;

  int actor_index(const std::string& id) const;
};

// Everything one frame of sensing produces.
struct FrameObservation {
  double t_ms = 0;
  std::vector<FaceDetection> faces;
  std::vector<HandObservation> hands;
  std::vector<LuminanceBlob> luminance_blobs;
  std::vector<BleTrigger> ble_triggers;
};

// Deterministic observation generator: pinhole projection of the scenario
// plus configured noise. Per-frame draws come from a substream keyed on
// (seed, frame), so identical (scenario, seed) pairs give bit-identical
// streams.
class SceneSimulator {
 public:
  SceneSimulator(const Scenario& scenario, uint64_t seed);

  FrameObservation synthesize_frame(int frame_index) const;

  // Noisy spherical measurement of a tag at time t_ms; noise is keyed on
  // (seed, mac, serial) so it is untouched by any optical noise parameter.
  RangingReading uwb_measurement(uint64_t mac, int reading_serial,
                                 double t_ms) const;

  // Ground truth, for harness attribution.
  Vec3 actor_position(int actor_index, double t_ms) const;
  std::optional<PixelPoint> actor_face_px(int actor_index, double t_ms) const;
  int actor_index_for_mac(uint64_t mac) const;
  int frame_for_time(double t_ms) const;

  const Scenario& scenario() const { return *scenario_; }

 private:
  struct Transmission {
    int actor_index;
    int start_frame;
    BitSeq bits;
  };
  struct HandScript {
    int actor_index;
    int target_index;  // actor whose face the swipe overlays
    double t0_ms;
    double duration_ms;
    double direction;  // +1 blur, -1 unblur
  };

  std::optional<NormRect> true_face_bbox(int actor_index, double t_ms) const;

  const Scenario* scenario_;
  uint64_t seed_;
  std::vector<Transmission> transmissions_;
  std::vector<HandScript> hand_scripts_;
};

}  // namespace privsim

#endif  // PRIVSIM_SCENE_HPP
