#include "privsim/vlc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace privsim {

uint8_t crc4_bits(uint32_t payload, int nbits) {
  uint8_t reg = 0;
  auto shift_in = [&reg](int bit) {
    const int top = (reg >> 3) & 1;
    reg = static_cast<uint8_t>(((reg << 1) | bit) & 0xF);
    if (top) reg ^= 0x3;  // x^4 == x + 1 (mod x^4 + x + 1)
  };
  for (int i = nbits - 1; i >= 0; --i) shift_in((payload >> i) & 1);
  for (int i = 0; i < 4; ++i) shift_in(0);
  return reg;
}

uint8_t command_byte(Command c) { return c == Command::Blur ? 0x01 : 0x02; }

BitSeq encode_packet(Command cmd, const VlcConfig& cfg) {
  const int pb = cfg.payload_bits();
  if (pb < 2 || pb > 16) throw std::invalid_argument("bad payload width");
  const uint32_t payload = command_byte(cmd);
  const uint8_t crc = crc4_bits(payload, pb);
  BitSeq out;
  for (int i = cfg.preamble_bits - 1; i >= 0; --i)
    out.append((cfg.preamble >> i) & 1);
  for (int i = pb - 1; i >= 0; --i) out.append((payload >> i) & 1);
  for (int i = cfg.crc_bits - 1; i >= 0; --i) out.append((crc >> i) & 1);
  return out;
}

std::optional<Command> decode_packet(const BitSeq& bits, const VlcConfig& cfg) {
  if (bits.size != cfg.packet_bits) return std::nullopt;
  const int pb = cfg.payload_bits();
  uint32_t preamble = 0, payload = 0, crc = 0;
  int pos = 0;
  for (int i = 0; i < cfg.preamble_bits; ++i)
    preamble = (preamble << 1) | bits.bit(pos++);
  for (int i = 0; i < pb; ++i) payload = (payload << 1) | bits.bit(pos++);
  for (int i = 0; i < cfg.crc_bits; ++i) crc = (crc << 1) | bits.bit(pos++);
  if (preamble != cfg.preamble) return std::nullopt;
  if (crc != crc4_bits(payload, pb)) return std::nullopt;
  if (payload == command_byte(Command::Blur)) return Command::Blur;
  if (payload == command_byte(Command::Unblur)) return Command::Unblur;
  return std::nullopt;
}

SearchRegion search_region_for_face(const TrackedFace& face,
                                    const CameraModel& cam) {
  const double face_w = face.bbox.w * cam.width_px;
  const double face_h = face.bbox.h * cam.height_px;
  const double cx = face.bbox.center().x * cam.width_px;

  PixelRect r;
  r.w = 2.0 * face_w;
  r.h = 3.0 * face_h;
  r.x = cx - r.w / 2.0;
  r.y = face.bbox.bottom() * cam.height_px;

  // Clamp to the frame.
  const double x1 = std::min(r.right(), static_cast<double>(cam.width_px));
  const double y1 = std::min(r.bottom(), static_cast<double>(cam.height_px));
  r.x = std::max(r.x, 0.0);
  r.y = std::max(r.y, 0.0);
  r.w = std::max(x1 - r.x, 0.0);
  r.h = std::max(y1 - r.y, 0.0);

  SearchRegion region;
  region.owner_face_id = face.face_id;
  region.rect = r;
  const double d = estimate_distance_from_face(face_h);
  region.expected_blob_area = led_blob_area(d);
  return region;
}

void RegionRaster::reset(const PixelRect& region, const CameraModel& cam) {
  x0_ = std::max(0, static_cast<int>(std::floor(region.x)));
  y0_ = std::max(0, static_cast<int>(std::floor(region.y)));
  const int x1 = std::min(cam.width_px, static_cast<int>(std::ceil(region.right())));
  const int y1 = std::min(cam.height_px, static_cast<int>(std::ceil(region.bottom())));
  w_ = std::max(0, x1 - x0_);
  h_ = std::max(0, y1 - y0_);
  if (grid_.size() < static_cast<size_t>(w_) * h_)
    grid_.resize(static_cast<size_t>(w_) * h_, 0);
  for (int idx : painted_) grid_[idx] = 0;
  painted_.clear();
}

void RegionRaster::paint_disc(PixelPoint centroid, double area) {
  if (w_ == 0 || h_ == 0) return;
  const int n = std::max(1, static_cast<int>(std::lround(area)));
  const double cx = centroid.x - x0_;
  const double cy = centroid.y - y0_;
  const int radius =
      static_cast<int>(std::ceil(std::sqrt(area / kPi))) + 2;

  struct Cell {
    double d2;
    int i, j;
  };
  std::vector<Cell> cells;
  const int i0 = std::max(0, static_cast<int>(std::floor(cx)) - radius);
  const int i1 = std::min(w_ - 1, static_cast<int>(std::ceil(cx)) + radius);
  const int j0 = std::max(0, static_cast<int>(std::floor(cy)) - radius);
  const int j1 = std::min(h_ - 1, static_cast<int>(std::ceil(cy)) + radius);
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const double dx = i - cx, dy = j - cy;
      cells.push_back({dx * dx + dy * dy, i, j});
    }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  });
  int marked = 0;
  for (const Cell& c : cells) {
    if (marked >= n) break;
    const int idx = c.j * w_ + c.i;
    ++marked;
    if (grid_[idx]) continue;  // overlapping discs merge
    grid_[idx] = 1;
    painted_.push_back(idx);
  }
}

std::vector<Blob> detect_blobs(const RegionRaster& raster) {
  std::vector<Blob> blobs;
  const int w = raster.width();
  if (w == 0) return blobs;
  std::vector<char> visited(static_cast<size_t>(w) * raster.height(), 0);
  std::deque<int> queue;

  for (int seed : raster.painted()) {
    if (visited[seed]) continue;
    visited[seed] = 1;
    queue.push_back(seed);
    double sum_x = 0, sum_y = 0;
    int count = 0;
    while (!queue.empty()) {
      const int idx = queue.front();
      queue.pop_front();
      const int i = idx % w;
      const int j = idx / w;
      sum_x += i;
      sum_y += j;
      ++count;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ni = i + di[k], nj = j + dj[k];
        if (ni < 0 || ni >= w || nj < 0 || nj >= raster.height()) continue;
        const int nidx = nj * w + ni;
        if (visited[nidx] || !raster.lit(ni, nj)) continue;
        visited[nidx] = 1;
        queue.push_back(nidx);
      }
    }
    blobs.push_back({{sum_x / count, sum_y / count}, static_cast<double>(count)});
  }
  return blobs;
}

void step_decoder(std::vector<ViterbiPath>& paths,
                  const std::vector<Blob>& blobs, double gate_px,
                  const VlcConfig& cfg) {
  // Assignment order: cheapest first, then oldest. Matches the final sort so
  // the ranking is consistent within a frame.
  std::vector<int> order(paths.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&paths](int a, int b) {
    if (paths[a].cost != paths[b].cost) return paths[a].cost < paths[b].cost;
    return paths[a].bits.size > paths[b].bits.size;
  });

  std::vector<char> consumed(blobs.size(), 0);
  for (int pi : order) {
    ViterbiPath& path = paths[pi];
    int best = -1;
    double best_d = 0;
    for (size_t bi = 0; bi < blobs.size(); ++bi) {
      if (consumed[bi]) continue;
      const double d = distance(path.last_blob_pos, blobs[bi].centroid);
      if (d > gate_px) continue;
      if (best < 0 || d < best_d) {
        best = static_cast<int>(bi);
        best_d = d;
      }
    }
    if (best >= 0) {
      consumed[best] = 1;
      path.bits.append(1);
      path.last_blob_pos = blobs[best].centroid;
      path.blob_area_sum += blobs[best].area;
      path.blob_count += 1;
    } else {
      path.bits.append(0);
      path.cost += cfg.miss_penalty;
    }
  }

  for (size_t bi = 0; bi < blobs.size(); ++bi) {
    if (consumed[bi]) continue;
    ViterbiPath fresh;
    fresh.bits.append(1);
    fresh.last_blob_pos = blobs[bi].centroid;
    fresh.blob_area_sum = blobs[bi].area;
    fresh.blob_count = 1;
    paths.push_back(fresh);
  }

  std::stable_sort(paths.begin(), paths.end(),
                   [](const ViterbiPath& a, const ViterbiPath& b) {
                     if (a.cost != b.cost) return a.cost < b.cost;
                     return a.bits.size > b.bits.size;
                   });
  if (paths.size() > static_cast<size_t>(cfg.max_active_paths))
    paths.resize(cfg.max_active_paths);
}

ResolveResult try_resolve(const ViterbiPath& path, const VlcConfig& cfg,
                          double face_height_px) {
  ResolveResult res;
  const auto cmd = decode_packet(path.bits, cfg);
  if (!cmd) return res;  // BadPacket
  res.command = *cmd;
  const double area = path.mean_blob_area();
  if (area <= 0) return res;
  res.blob_distance_m = std::sqrt(kLedBlobAreaAt1m / area);
  res.face_distance_m = estimate_distance_from_face(face_height_px);
  if (std::abs(res.blob_distance_m - res.face_distance_m) /
          res.face_distance_m >
      cfg.geo_tolerance) {
    res.outcome = ResolveOutcome::BadGeometry;
    return res;
  }
  res.outcome = ResolveOutcome::Accepted;
  return res;
}

VlcModality::FrameResult VlcModality::on_frame(
    const std::vector<TrackedFace>& faces,
    const std::vector<LuminanceBlob>& luminance, const CameraModel& cam) {
  FrameResult result;

  // Drop decoder state for faces that no longer exist.
  for (auto it = paths_by_face_.begin(); it != paths_by_face_.end();) {
    const int id = it->first;
    const bool live = std::any_of(faces.begin(), faces.end(),
                                  [id](const TrackedFace& f) {
                                    return f.face_id == id;
                                  });
    it = live ? std::next(it) : paths_by_face_.erase(it);
  }

  for (const TrackedFace& face : faces) {
    const SearchRegion region = search_region_for_face(face, cam);
    raster_.reset(region.rect, cam);
    for (const LuminanceBlob& lb : luminance) {
      const double r = std::sqrt(lb.area / kPi) + 1.0;
      if (lb.centroid.x + r < region.rect.x ||
          lb.centroid.x - r > region.rect.right() ||
          lb.centroid.y + r < region.rect.y ||
          lb.centroid.y - r > region.rect.bottom())
        continue;
      raster_.paint_disc(lb.centroid, lb.area);
    }
    const std::vector<Blob> blobs = detect_blobs(raster_);
    const double gate =
        cfg_.association_gate_scale * std::sqrt(region.expected_blob_area);

    std::vector<ViterbiPath>& paths = paths_by_face_[face.face_id];
    step_decoder(paths, blobs, gate, cfg_);

    for (auto it = paths.begin(); it != paths.end();) {
      if (it->bits.size < cfg_.packet_bits) {
        ++it;
        continue;
      }
      const ResolveResult r = try_resolve(*it, cfg_, face.height_px(cam));
      switch (r.outcome) {
        case ResolveOutcome::Accepted:
          result.decoded.push_back({face.face_id, r.command});
          break;
        case ResolveOutcome::BadGeometry:
          result.rejections.push_back({face.face_id, r.outcome,
                                       r.blob_distance_m, r.face_distance_m});
          break;
        case ResolveOutcome::BadPacket:
          // Report only sequences that looked like packets (preamble match);
          // silence paths resolve to garbage constantly and stay quiet.
          if (it->bits.size == cfg_.packet_bits) {
            uint32_t pre = 0;
            for (int i = 0; i < cfg_.preamble_bits; ++i)
              pre = (pre << 1) | it->bits.bit(i);
            if (pre == cfg_.preamble)
              result.rejections.push_back({face.face_id, r.outcome, 0, 0});
          }
          break;
      }
      it = paths.erase(it);  // resolution attempt always consumes the path
    }
  }
  return result;
}

std::size_t VlcModality::active_paths(int face_id) const {
  const auto it = paths_by_face_.find(face_id);
  return it == paths_by_face_.end() ? 0 : it->second.size();
}

}  // namespace privsim
