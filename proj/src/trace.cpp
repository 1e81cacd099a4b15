#include "privsim/trace.hpp"

#include <cassert>
#include <cstdio>

namespace privsim {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::FaceTracked: return "FaceTracked";
    case TraceKind::FaceLost: return "FaceLost";
    case TraceKind::GestureFired: return "GestureFired";
    case TraceKind::PacketDecoded: return "PacketDecoded";
    case TraceKind::PacketRejected: return "PacketRejected";
    case TraceKind::BurstStarted: return "BurstStarted";
    case TraceKind::Bound: return "Bound";
    case TraceKind::FastPath: return "FastPath";
    case TraceKind::StateChanged: return "StateChanged";
    default: return "ValidationRejected";
  }
}

std::string TraceLog::format_ms(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

void TraceLog::emit(double t_ms, TraceKind kind, const TraceAttrs& attrs) {
  assert(t_ms >= last_t_ms_ && "trace time must be monotone");
  last_t_ms_ = t_ms;

  std::string line = "t=" + format_ms(t_ms);
  line += " kind=";
  line += to_string(kind);
  for (const auto& [key, value] : attrs) {
    line += ' ';
    line += key;
    line += '=';
    line += value;
  }
  line += '\n';

  for (const char c : line) {
    hash_ ^= static_cast<unsigned char>(c);
    hash_ *= 0x00000100000001b3ull;
  }
  ++count_;
  if (keep_lines_) lines_.push_back(std::move(line));
}

void TraceLog::write(std::ostream& out) const {
  for (const std::string& line : lines_) out << line;
}

}  // namespace privsim
