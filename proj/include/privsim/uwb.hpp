#ifndef PRIVSIM_UWB_HPP
#define PRIVSIM_UWB_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "privsim/face_tracker.hpp"
#include "privsim/geometry.hpp"
#include "privsim/types.hpp"

namespace privsim {

// GATT characteristic write carrying the privacy command. Transport is
// modeled as reliable and ordered.
struct BleTrigger {
  double t_ms = 0;
  uint64_t mac = 0;
  Command command = Command::Blur;
};

struct RangingReading {
  double distance_m = 0;
  double azimuth_deg = 0;    // +right
  double elevation_deg = 0;  // +up
};

struct UwbConfig {
  int total_reading_count = 15;
  int readings_to_average = 3;
  double ranging_interval_ms = 130.0;
  double bbox_width_expansion = 2.5;  // shoulder-breadth factor, width only
  double geo_tolerance = 0.10;
};

// Component-wise mean of the final readings_to_average measurements.
// Requires a complete burst.
RangingReading smooth_burst(const std::vector<RangingReading>&,
                            const UwbConfig&);

// Linear angle-to-screen mapping; nothing outside the camera FoV.
std::optional<PixelPoint> project_to_screen(const RangingReading&,
                                            const CameraModel&);

// Face whose width-expanded bbox contains the point and whose size-implied
// distance agrees with the measured range; smallest residual wins.
std::optional<int> bind_reading(PixelPoint point, const RangingReading&,
                                const std::vector<TrackedFace>&,
                                const CameraModel&, const UwbConfig&);

// Hybrid BLE+UWB protocol state machine. Each tag is Unbound, Ranging, or
// Bound; the mac->face_id map is the Fast Path authorization cache and is
// purged the moment the bound face disappears.
class UwbManager {
 public:
  explicit UwbManager(UwbConfig cfg = {}) : cfg_(cfg) {}

  enum class TriggerAction { FastPathToggle, BurstStarted, Dropped };
  struct TriggerResult {
    TriggerAction action;
    int face_id = -1;  // set for FastPathToggle
  };

  TriggerResult on_ble_trigger(const BleTrigger&,
                               const std::vector<TrackedFace>& faces,
                               double now_ms);

  struct BurstCompletion {
    uint64_t mac;
    Command command;
    bool bound;
    int face_id;        // valid when bound
    double trigger_ms;  // original trigger time, for latency accounting
  };

  // Collects readings that came due and finalizes completed bursts.
  // reading_fn(mac, serial, due_ms) supplies the measurement for that tag at
  // the scheduled ranging instant.
  std::vector<BurstCompletion> advance(
      double now_ms, const std::vector<TrackedFace>& faces,
      const CameraModel& cam,
      const std::function<RangingReading(uint64_t, int, double)>& reading_fn);

  void on_face_lost(int face_id);

  const std::map<uint64_t, int>& bindings() const { return bindings_; }
  bool burst_in_progress(uint64_t mac) const;
  int ranging_sessions_started() const { return ranging_sessions_started_; }
  int fast_path_hits() const { return fast_path_hits_; }

 private:
  enum class Phase { Unbound, Ranging, Bound };
  struct TagState {
    Phase phase = Phase::Unbound;
    int bound_face = -1;
    Command pending = Command::Blur;
    double trigger_ms = 0;
    double next_reading_ms = 0;
    int reading_serial = 0;  // unique per tag across the whole run
    std::vector<RangingReading> burst;
  };

  static bool face_live(const std::vector<TrackedFace>&, int face_id);

  UwbConfig cfg_;
  std::map<uint64_t, TagState> tags_;  // ordered for deterministic iteration
  std::map<uint64_t, int> bindings_;
  int ranging_sessions_started_ = 0;
  int fast_path_hits_ = 0;
};

}  // namespace privsim

#endif  // PRIVSIM_UWB_HPP
