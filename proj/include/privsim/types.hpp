#ifndef PRIVSIM_TYPES_HPP
#define PRIVSIM_TYPES_HPP

namespace privsim {

enum class Command { Blur, Unblur };
enum class PrivacyState { Clear, Blurred };
enum class Modality { Gesture, Vlc, Uwb };

inline const char* to_string(Command c) {
  return c == Command::Blur ? "blur" : "unblur";
}
inline const char* to_string(PrivacyState s) {
  return s == PrivacyState::Blurred ? "blurred" : "clear";
}
inline const char* to_string(Modality m) {
  switch (m) {
    case Modality::Gesture: return "gesture";
    case Modality::Vlc: return "vlc";
    default: return "uwb";
  }
}

// State a face should end up in after a command is applied.
inline PrivacyState target_state(Command c) {
  return c == Command::Blur ? PrivacyState::Blurred : PrivacyState::Clear;
}

}  // namespace privsim

#endif  // PRIVSIM_TYPES_HPP
