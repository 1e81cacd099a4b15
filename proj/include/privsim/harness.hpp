#ifndef PRIVSIM_HARNESS_HPP
#define PRIVSIM_HARNESS_HPP

#include <cstdint>
#include <vector>

#include "privsim/gesture.hpp"
#include "privsim/scene.hpp"
#include "privsim/trace.hpp"
#include "privsim/uwb.hpp"
#include "privsim/vlc.hpp"

namespace privsim {

struct HarnessConfig {
  TrackerConfig tracker;
  GestureConfig gesture;
  VlcConfig vlc;
  UwbConfig uwb;
  // Attribution window per modality: a signal unanswered past its window is a
  // false negative; roughly twice the expected end-to-end latency.
  double gesture_window_ms = 1000.0;
  double vlc_window_ms = 2000.0;
  double uwb_window_ms = 4000.0;
};

struct TrialResult {
  int signals = 0;
  int correct = 0;
  int false_positive_count = 0;
  int false_negative_count = 0;
  double accuracy = 0;
  double fp_rate = 0;
  double fn_rate = 0;
  std::vector<double> latencies_ms;
  int ranging_sessions = 0;
  int fast_path_hits = 0;
  int state_changes = 0;
  int cross_face_toggles = 0;  // state changes landing on the wrong face
  double frame_p95_ms = 0;
  uint64_t trace_hash = 0;
};

// Steps the full pipeline over the scenario at frame cadence and scores the
// outcome. Deterministic for a given (scenario, seed).
TrialResult run_scenario(const Scenario&, uint64_t seed,
                         TraceLog* trace = nullptr,
                         const HarnessConfig& cfg = {});

struct BatchResult {
  TrialResult aggregate;  // rates from summed counts, latencies concatenated
  std::vector<uint64_t> trial_hashes;
};

// Trial i runs with seed base_seed + i. Workers only parallelize independent
// trials; merging is in index order, so the worker count cannot change the
// result.
BatchResult run_batch(const Scenario&, int repetitions, uint64_t base_seed,
                      int workers = 1, const HarnessConfig& cfg = {});

enum class MotionProfile { Static, Walking };

struct SweepPoint {
  int packet_bits;
  int trials;
  double success_rate;
};

// Decode success per packet length. Walking replaces every trajectory with a
// 1.2 m/s lateral crossing through the actor's start position.
std::vector<SweepPoint> message_length_sweep(const Scenario& base,
                                             const std::vector<int>& lengths,
                                             MotionProfile motion, int reps,
                                             uint64_t base_seed,
                                             int workers = 1,
                                             const HarnessConfig& cfg = {});

Scenario with_motion_profile(const Scenario&, MotionProfile);

}  // namespace privsim

#endif  // PRIVSIM_HARNESS_HPP
