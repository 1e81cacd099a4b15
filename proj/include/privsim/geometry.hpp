#ifndef PRIVSIM_GEOMETRY_HPP
#define PRIVSIM_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

namespace privsim {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Camera-frame convention: +x right, +y down, +z forward, so image
// coordinates grow rightward/downward like screen pixels.
struct Vec3 {
  double x = 0, y = 0, z = 0;
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct PixelPoint {
  double x = 0, y = 0;
};

struct NormPoint {
  double x = 0, y = 0;
};

inline double distance(NormPoint a, NormPoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}
inline double distance(PixelPoint a, PixelPoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Rectangle with top-left origin, in units of the frame size ([0,1]).
struct NormRect {
  double x = 0, y = 0, w = 0, h = 0;
  NormPoint center() const { return {x + w / 2.0, y + h / 2.0}; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
};

struct PixelRect {
  double x = 0, y = 0, w = 0, h = 0;
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  bool contains(PixelPoint p) const {
    return p.x >= x && p.x <= right() && p.y >= y && p.y <= bottom();
  }
};

struct CameraModel {
  int width_px = 1280;
  int height_px = 960;
  double hfov_deg = 72.0;
  double vfov_deg = 57.6;
  double frame_rate_hz = 30.0;

  double frame_period_ms() const { return 1000.0 / frame_rate_hz; }
  double focal_x_px() const {
    return (width_px / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0);
  }
  double focal_y_px() const {
    return (height_px / 2.0) / std::tan(deg2rad(vfov_deg) / 2.0);
  }
  PixelPoint principal_point() const {
    return {width_px / 2.0, height_px / 2.0};
  }
};

struct Projection {
  PixelPoint px;
  double depth_m = 0;
};

// Pinhole projection. Returns nothing for points behind the camera or
// outside the frame; a point exactly on the FoV boundary maps to the edge.
inline std::optional<Projection> project_point(const CameraModel& cam,
                                               const Vec3& p) {
  if (p.z <= 0) return std::nullopt;
  const PixelPoint c = cam.principal_point();
  const double x = c.x + cam.focal_x_px() * p.x / p.z;
  const double y = c.y + cam.focal_y_px() * p.y / p.z;
  if (x < 0 || x > cam.width_px || y < 0 || y > cam.height_px)
    return std::nullopt;
  return Projection{{x, y}, p.z};
}

inline Vec3 unproject(const CameraModel& cam, PixelPoint px, double depth_m) {
  const PixelPoint c = cam.principal_point();
  return {(px.x - c.x) / cam.focal_x_px() * depth_m,
          (px.y - c.y) / cam.focal_y_px() * depth_m, depth_m};
}

// Size-distance models, calibrated at 1 m on the 1280x960 stream.
inline constexpr double kFaceHeightPxAt1m = 215.0;  // px * m
inline constexpr double kLedBlobAreaAt1m = 400.0;   // px^2 * m^2
inline constexpr double kHandSpanPxAt1m = 88.0;     // px * m
inline constexpr double kFaceAspect = 0.78;         // width/height, rendering only

inline double face_pixel_height(double distance_m) {
  if (distance_m <= 0) throw std::domain_error("distance must be positive");
  return kFaceHeightPxAt1m / distance_m;
}

inline double led_blob_area(double distance_m) {
  if (distance_m <= 0) throw std::domain_error("distance must be positive");
  return kLedBlobAreaAt1m / (distance_m * distance_m);
}

inline double hand_keypoint_span(double distance_m) {
  if (distance_m <= 0) throw std::domain_error("distance must be positive");
  return kHandSpanPxAt1m / distance_m;
}

}  // namespace privsim

#endif  // PRIVSIM_GEOMETRY_HPP
