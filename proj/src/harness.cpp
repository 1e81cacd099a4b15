#include "privsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "privsim/scenario.hpp"

namespace privsim {

namespace {

struct SignalWindow {
  int actor_index;
  Command command;
  double t0_ms;
  double deadline_ms;
  bool satisfied = false;
};

double window_for(Modality m, const HarnessConfig& cfg) {
  switch (m) {
    case Modality::Gesture: return cfg.gesture_window_ms;
    case Modality::Vlc: return cfg.vlc_window_ms;
    default: return cfg.uwb_window_ms;
  }
}

std::string fmt(double v) { return TraceLog::format_ms(v); }

}  // namespace

TrialResult run_scenario(const Scenario& sc, uint64_t seed, TraceLog* trace,
                         const HarnessConfig& cfg) {
  SceneSimulator sim(sc, seed);
  const CameraModel& cam = sc.camera;

  FaceTracker faces(cfg.tracker);
  HandTracker hands(cfg.gesture);
  VlcConfig vlc_cfg = cfg.vlc;
  vlc_cfg.packet_bits = sc.packet_bits;
  VlcModality vlc(vlc_cfg);
  UwbManager uwb(cfg.uwb);

  TraceLog local;
  TraceLog& log = trace ? *trace : local;

  TrialResult result;
  std::vector<SignalWindow> windows;
  size_t next_event = 0;

  // Ground-truth actor -> face_id map, refreshed every frame for attribution.
  std::vector<int> face_of_actor(sc.actors.size(), -1);
  std::vector<double> frame_times_ms;

  auto on_state_change = [&](int face_id, PrivacyState state, double t) {
    ++result.state_changes;
    bool matched = false;
    for (SignalWindow& w : windows) {
      if (w.satisfied || t > w.deadline_ms || t < w.t0_ms) continue;
      if (face_of_actor[w.actor_index] != face_id) continue;
      if (target_state(w.command) != state) continue;
      w.satisfied = true;
      ++result.correct;
      result.latencies_ms.push_back(t - w.t0_ms);
      matched = true;
      break;
    }
    if (!matched) ++result.false_positive_count;
  };

  auto apply = [&](int face_id, Command cmd, const char* cause, double t) {
    if (!faces.apply_privacy_command(face_id, cmd, t)) return;
    const TrackedFace* f = faces.find(face_id);
    log.emit(t, TraceKind::StateChanged,
             {{"face", std::to_string(face_id)},
              {"state", to_string(f->privacy_state)},
              {"cause", cause}});
    on_state_change(face_id, f->privacy_state, t);
  };

  const int total_frames =
      static_cast<int>(std::ceil(sc.duration_ms / cam.frame_period_ms()));
  for (int frame = 0; frame < total_frames; ++frame) {
    const double t = frame * cam.frame_period_ms();
    const FrameObservation obs = sim.synthesize_frame(frame);

    const auto wall_start = std::chrono::steady_clock::now();

    const FaceTracker::Update upd = faces.update(obs.faces, t);
    for (const int id : upd.new_ids)
      log.emit(t, TraceKind::FaceTracked, {{"face", std::to_string(id)}});
    for (const int id : upd.lost_ids) {
      log.emit(t, TraceKind::FaceLost, {{"face", std::to_string(id)}});
      uwb.on_face_lost(id);
    }

    // Refresh attribution: nearest live track to each actor's true center.
    for (size_t ai = 0; ai < sc.actors.size(); ++ai) {
      face_of_actor[ai] = -1;
      const auto px = sim.actor_face_px(static_cast<int>(ai), t);
      if (!px || !sc.actors[ai].emit_face) continue;
      const NormPoint truth{px->x / cam.width_px, px->y / cam.height_px};
      double best = 0.1;  // generous for jitter, tight enough across actors
      for (const TrackedFace& f : faces.tracks()) {
        const double d = distance(truth, f.centroid());
        if (d < best) {
          best = d;
          face_of_actor[ai] = f.face_id;
        }
      }
    }

    while (next_event < sc.events.size() &&
           sc.events[next_event].time_ms <= t) {
      const SignalEvent& ev = sc.events[next_event++];
      const int actor = sc.actor_index(ev.actor_id);
      windows.push_back({actor, ev.command, ev.time_ms,
                         ev.time_ms + window_for(ev.modality, cfg)});
      ++result.signals;
    }

    switch (sc.active_modality) {
      case Modality::Gesture: {
        hands.update(obs.hands, t);
        for (TrackedHand& hand : hands.hands()) {
          if (hand.last_seen_ms != t) continue;
          const TrackedFace* nearest = associate_face(hand, faces.tracks());
          if (!nearest) continue;
          TrackedFace* face = faces.find(nearest->face_id);
          const SwipeResult swipe =
              recognize_swipe(hand, *face, t, cam, cfg.gesture);
          if (swipe.outcome == SwipeOutcome::Fired) {
            log.emit(t, TraceKind::GestureFired,
                     {{"hand", std::to_string(hand.hand_id)},
                      {"face", std::to_string(face->face_id)},
                      {"command", to_string(swipe.command)}});
            apply(face->face_id, swipe.command, "gesture", t);
          } else if (swipe.outcome == SwipeOutcome::RejectedDistance) {
            log.emit(t, TraceKind::ValidationRejected,
                     {{"modality", "gesture"},
                      {"face", std::to_string(face->face_id)},
                      {"d_hand_m", fmt(swipe.hand_distance_m)},
                      {"d_face_m", fmt(swipe.face_distance_m)}});
          }
        }
        break;
      }
      case Modality::Vlc: {
        const VlcModality::FrameResult fr =
            vlc.on_frame(faces.tracks(), obs.luminance_blobs, cam);
        for (const auto& rej : fr.rejections) {
          if (rej.outcome == ResolveOutcome::BadGeometry) {
            log.emit(t, TraceKind::ValidationRejected,
                     {{"modality", "vlc"},
                      {"face", std::to_string(rej.face_id)},
                      {"d_blob_m", fmt(rej.blob_distance_m)},
                      {"d_face_m", fmt(rej.face_distance_m)}});
          } else {
            log.emit(t, TraceKind::PacketRejected,
                     {{"face", std::to_string(rej.face_id)}});
          }
        }
        std::vector<int> applied;
        for (const auto& dec : fr.decoded) {
          if (std::count(applied.begin(), applied.end(), dec.face_id)) continue;
          applied.push_back(dec.face_id);
          log.emit(t, TraceKind::PacketDecoded,
                   {{"face", std::to_string(dec.face_id)},
                    {"command", to_string(dec.command)}});
          apply(dec.face_id, dec.command, "vlc", t);
        }
        break;
      }
      case Modality::Uwb: {
        for (const BleTrigger& trig : obs.ble_triggers) {
          const auto r = uwb.on_ble_trigger(trig, faces.tracks(), t);
          switch (r.action) {
            case UwbManager::TriggerAction::FastPathToggle:
              log.emit(t, TraceKind::FastPath,
                       {{"mac", format_mac(trig.mac)},
                        {"face", std::to_string(r.face_id)}});
              apply(r.face_id, trig.command, "uwb_fast_path", t);
              break;
            case UwbManager::TriggerAction::BurstStarted:
              log.emit(t, TraceKind::BurstStarted,
                       {{"mac", format_mac(trig.mac)}});
              break;
            case UwbManager::TriggerAction::Dropped:
              log.emit(t, TraceKind::ValidationRejected,
                       {{"modality", "uwb"},
                        {"mac", format_mac(trig.mac)},
                        {"reason", "burst_in_progress"}});
              break;
          }
        }
        const auto completions = uwb.advance(
            t, faces.tracks(), cam,
            [&sim](uint64_t mac, int serial, double due_ms) {
              return sim.uwb_measurement(mac, serial, due_ms);
            });
        for (const auto& done : completions) {
          if (done.bound) {
            log.emit(t, TraceKind::Bound,
                     {{"mac", format_mac(done.mac)},
                      {"face", std::to_string(done.face_id)}});
            apply(done.face_id, done.command, "uwb", t);
          } else {
            log.emit(t, TraceKind::ValidationRejected,
                     {{"modality", "uwb"},
                      {"mac", format_mac(done.mac)},
                      {"reason", "bind_failed"}});
          }
        }
        break;
      }
    }

    const auto wall_end = std::chrono::steady_clock::now();
    frame_times_ms.push_back(
        std::chrono::duration<double, std::milli>(wall_end - wall_start)
            .count());
  }

  for (const SignalWindow& w : windows)
    if (!w.satisfied) ++result.false_negative_count;

  // Cross-face toggles: correct + false positives should cover every state
  // change; anything a window matched was on the right face by construction.
  result.cross_face_toggles = result.false_positive_count;

  const int denom = std::max(1, result.signals);
  result.accuracy = static_cast<double>(result.correct) / denom;
  result.fp_rate = static_cast<double>(result.false_positive_count) / denom;
  result.fn_rate = static_cast<double>(result.false_negative_count) / denom;
  result.ranging_sessions = uwb.ranging_sessions_started();
  result.fast_path_hits = uwb.fast_path_hits();

  if (!frame_times_ms.empty()) {
    std::sort(frame_times_ms.begin(), frame_times_ms.end());
    const size_t idx = static_cast<size_t>(
        std::ceil(0.95 * frame_times_ms.size())) - 1;
    result.frame_p95_ms = frame_times_ms[idx];
  }
  result.trace_hash = log.hash();
  return result;
}

BatchResult run_batch(const Scenario& sc, int repetitions, uint64_t base_seed,
                      int workers, const HarnessConfig& cfg) {
  std::vector<TrialResult> trials(repetitions);
  workers = std::max(1, workers);

  auto run_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i)
      trials[i] = run_scenario(sc, base_seed + static_cast<uint64_t>(i),
                               nullptr, cfg);
  };

  if (workers == 1 || repetitions <= 1) {
    run_range(0, repetitions);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (repetitions + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(repetitions, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  BatchResult batch;
  TrialResult& agg = batch.aggregate;
  double p95_max = 0;
  for (const TrialResult& t : trials) {
    agg.signals += t.signals;
    agg.correct += t.correct;
    agg.false_positive_count += t.false_positive_count;
    agg.false_negative_count += t.false_negative_count;
    agg.ranging_sessions += t.ranging_sessions;
    agg.fast_path_hits += t.fast_path_hits;
    agg.state_changes += t.state_changes;
    agg.cross_face_toggles += t.cross_face_toggles;
    agg.latencies_ms.insert(agg.latencies_ms.end(), t.latencies_ms.begin(),
                            t.latencies_ms.end());
    p95_max = std::max(p95_max, t.frame_p95_ms);
    batch.trial_hashes.push_back(t.trace_hash);
  }
  const int denom = std::max(1, agg.signals);
  agg.accuracy = static_cast<double>(agg.correct) / denom;
  agg.fp_rate = static_cast<double>(agg.false_positive_count) / denom;
  agg.fn_rate = static_cast<double>(agg.false_negative_count) / denom;
  agg.frame_p95_ms = p95_max;

  uint64_t h = 0xcbf29ce484222325ull;
  for (const uint64_t th : batch.trial_hashes) {
    for (int b = 0; b < 8; ++b) {
      h ^= (th >> (8 * b)) & 0xFF;
      h *= 0x00000100000001b3ull;
    }
  }
  agg.trace_hash = h;
  return batch;
}

Scenario with_motion_profile(const Scenario& base, MotionProfile motion) {
  Scenario sc = base;
  for (Actor& actor : sc.actors) {
    const Vec3 start = actor.trajectory.at(0);
    actor.trajectory.points.clear();
    if (motion == MotionProfile::Static) {
      actor.trajectory.points.push_back({0.0, start});
    } else {
      // 1.2 m/s lateral crossing centered on the start position.
      const double travel = 1.2 * sc.duration_ms / 1000.0;
      Vec3 from = start, to = start;
      from.x -= travel / 2.0;
      to.x += travel / 2.0;
      actor.trajectory.points.push_back({0.0, from});
      actor.trajectory.points.push_back({sc.duration_ms, to});
    }
  }
  return sc;
}

std::vector<SweepPoint> message_length_sweep(const Scenario& base,
                                             const std::vector<int>& lengths,
                                             MotionProfile motion, int reps,
                                             uint64_t base_seed, int workers,
                                             const HarnessConfig& cfg) {
  std::vector<SweepPoint> table;
  const Scenario moved = with_motion_profile(base, motion);
  for (const int bits : lengths) {
    if (bits < 14 || bits > 26)
      throw std::invalid_argument("packet length must lie in [14, 26]");
    Scenario sc = moved;
    sc.packet_bits = bits;
    const BatchResult batch = run_batch(sc, reps, base_seed, workers, cfg);
    table.push_back({bits, reps, batch.aggregate.accuracy});
  }
  return table;
}

}  // namespace privsim
