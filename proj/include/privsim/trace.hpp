#ifndef PRIVSIM_TRACE_HPP
#define PRIVSIM_TRACE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace privsim {

enum class TraceKind {
  FaceTracked,
  FaceLost,
  GestureFired,
  PacketDecoded,
  PacketRejected,
  BurstStarted,
  Bound,
  FastPath,
  StateChanged,
  ValidationRejected,
};

const char* to_string(TraceKind);

using TraceAttrs = std::vector<std::pair<std::string, std::string>>;

// Line-delimited structured log: one event per line, stable key order, so
// runs can be diffed and grepped. A rolling FNV-1a hash over the formatted
// lines doubles as the replay fingerprint.
class TraceLog {
 public:
  explicit TraceLog(bool keep_lines = false) : keep_lines_(keep_lines) {}

  void emit(double t_ms, TraceKind kind, const TraceAttrs& attrs);

  uint64_t hash() const { return hash_; }
  std::size_t event_count() const { return count_; }
  const std::vector<std::string>& lines() const { return lines_; }
  void write(std::ostream&) const;

  static std::string format_ms(double value);

 private:
  bool keep_lines_;
  uint64_t hash_ = 0xcbf29ce484222325ull;
  std::size_t count_ = 0;
  double last_t_ms_ = -1;
  std::vector<std::string> lines_;
};

}  // namespace privsim

#endif  // PRIVSIM_TRACE_HPP
