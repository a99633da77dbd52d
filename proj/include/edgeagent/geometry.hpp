#pragma once

#include <compare>
#include <cstdint>

namespace edgeagent {

/// Fixed virtual screen of the simulated device, in pixels.
inline constexpr int kScreenWidth = 1080;
inline constexpr int kScreenHeight = 1920;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle. Containment is half-open: [x, x+w) x [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  bool degenerate() const { return w <= 0 || h <= 0; }
  Point center() const { return {x + w / 2, y + h / 2}; }

  bool contains(Point p) const {
    return p.x >= x && p.x < x + w && p.y >= y && p.y < y + h;
  }
  bool contains(const Rect& r) const {
    return r.x >= x && r.y >= y && r.right() <= right() && r.bottom() <= bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr Rect kScreenRect{0, 0, kScreenWidth, kScreenHeight};

}  // namespace edgeagent
