#ifndef PRIVSIM_VLC_HPP
#define PRIVSIM_VLC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "privsim/face_tracker.hpp"
#include "privsim/geometry.hpp"
#include "privsim/types.hpp"

namespace privsim {

// MSB-first bit sequence; packets never exceed 26 bits so one word suffices.
struct BitSeq {
  uint32_t word = 0;
  int size = 0;

  void append(int bit) {
    word = (word << 1) | static_cast<uint32_t>(bit & 1);
    ++size;
  }
  int bit(int i) const { return (word >> (size - 1 - i)) & 1; }
  bool operator==(const BitSeq& o) const {
    return size == o.size && word == o.word;
  }
};

// Remainder of payload * x^4 modulo x^4 + x + 1, MSB-first, zero init.
// Detects every single-bit error in payload plus checksum.
uint8_t crc4_bits(uint32_t payload, int nbits);
inline uint8_t crc4(uint8_t payload) { return crc4_bits(payload, 8); }

struct VlcConfig {
  int packet_bits = 18;  // preamble + payload + crc
  int preamble_bits = 6;
  int crc_bits = 4;
  uint8_t preamble = 0b101011;
  int bits_per_frame = 1;  // frame-locked OOK; only 1 is supported
  int max_active_paths = 8;
  double miss_penalty = 1.0;
  double association_gate_scale = 4.0;  // gate = scale * sqrt(expected area)
  double geo_tolerance = 0.10;

  int payload_bits() const { return packet_bits - preamble_bits - crc_bits; }
};

uint8_t command_byte(Command);  // Blur = 0x01, Unblur = 0x02

// Packet layout, MSB-first: [b17..b12] preamble 101011, [b11..b4] payload,
// [b3..b0] CRC-4 of the payload. Other packet_bits values resize the payload
// field only.
BitSeq encode_packet(Command cmd, const VlcConfig& cfg = {});

// Structural validation only: preamble, checksum, known command byte.
std::optional<Command> decode_packet(const BitSeq&, const VlcConfig& cfg = {});

struct SearchRegion {
  int owner_face_id = 0;
  PixelRect rect;  // clamped to the frame
  double expected_blob_area = 0;
};

// Rectangle under the face bbox: twice the face width, three times the face
// height, top edge at the bbox bottom.
SearchRegion search_region_for_face(const TrackedFace&, const CameraModel&);

// On-the-wire observation of one emitter (or a spurious bright spot) for a
// single frame, in frame pixel coordinates. `on` marks a real, lit emitter.
struct LuminanceBlob {
  PixelPoint centroid;
  double area = 0;
  bool on = false;
};

struct Blob {
  PixelPoint centroid;  // region-local pixel coordinates
  double area = 0;      // pixel count
};

// Binary pixel buffer for one search region, analogous to the per-region
// readback the pipeline operates on. Pixel (i, j) sits at frame position
// (x0 + i, y0 + j).
class RegionRaster {
 public:
  void reset(const PixelRect& region, const CameraModel& cam);
  // Marks roughly `area` pixels nearest the centroid (clipped to the region).
  void paint_disc(PixelPoint centroid_frame_px, double area);

  int width() const { return w_; }
  int height() const { return h_; }
  bool lit(int i, int j) const { return grid_[j * w_ + i] != 0; }
  const std::vector<int>& painted() const { return painted_; }

 private:
  int x0_ = 0, y0_ = 0, w_ = 0, h_ = 0;
  std::vector<uint8_t> grid_;
  std::vector<int> painted_;  // linear indices, deduplicated
};

// 4-connected components of lit pixels; centroid is the mean pixel position,
// area the pixel count.
std::vector<Blob> detect_blobs(const RegionRaster&);

struct ViterbiPath {
  BitSeq bits;
  double cost = 0;
  PixelPoint last_blob_pos;  // region-local
  double blob_area_sum = 0;
  int blob_count = 0;

  double mean_blob_area() const {
    return blob_count > 0 ? blob_area_sum / blob_count : 0.0;
  }
};

// One decoding step for one region. Paths take the nearest unclaimed blob
// within the gate (assignment in ascending cost order, then age), appending a
// 1; otherwise they append a 0 and pay the miss penalty. Every unclaimed blob
// seeds a new path. The set is then sorted by (cost, age descending) and
// truncated to max_active_paths.
void step_decoder(std::vector<ViterbiPath>& paths,
                  const std::vector<Blob>& blobs, double gate_px,
                  const VlcConfig& cfg);

enum class ResolveOutcome {
  Accepted,
  BadPacket,    // preamble, checksum, or command byte failed
  BadGeometry,  // packet fine, blob/face distance estimates disagree
};

struct ResolveResult {
  ResolveOutcome outcome = ResolveOutcome::BadPacket;
  Command command = Command::Blur;
  double blob_distance_m = 0;
  double face_distance_m = 0;
};

// Full packet validation for a path that reached packet_bits. Distance from
// the mean associated blob area must agree with the face-size estimate.
ResolveResult try_resolve(const ViterbiPath&, const VlcConfig&,
                          double face_height_px);

// Per-face decoding state over the frame stream.
class VlcModality {
 public:
  explicit VlcModality(VlcConfig cfg = {}) : cfg_(cfg) {}

  struct Decoded {
    int face_id;
    Command command;
  };
  struct Rejection {
    int face_id;
    ResolveOutcome outcome;  // BadPacket (preamble ok) or BadGeometry
    double blob_distance_m;
    double face_distance_m;
  };
  struct FrameResult {
    std::vector<Decoded> decoded;
    std::vector<Rejection> rejections;
  };

  FrameResult on_frame(const std::vector<TrackedFace>& faces,
                       const std::vector<LuminanceBlob>& luminance,
                       const CameraModel& cam);

  const VlcConfig& config() const { return cfg_; }
  std::size_t active_paths(int face_id) const;

 private:
  VlcConfig cfg_;
  std::map<int, std::vector<ViterbiPath>> paths_by_face_;
  RegionRaster raster_;
};

}  // namespace privsim

#endif  // PRIVSIM_VLC_HPP
