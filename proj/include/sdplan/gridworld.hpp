#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdplan/rng.hpp"

namespace sdplan {

using Vec2 = Eigen::Vector2d;

/// Boolean occupancy over a regular 2D grid. origin is the world position
/// of the lower-left corner of cell (0,0); cell centers sit at
/// origin + (i+0.5)*resolution.
struct OccupancyGrid {
  double resolution = 0.05;
  int width = 0;
  int height = 0;
  Vec2 origin = Vec2::Zero();
  std::vector<std::uint8_t> cells;  // row-major, 1 = occupied

  bool occupied(int ix, int iy) const {
    return cells[static_cast<size_t>(iy) * width + ix] != 0;
  }
  void set(int ix, int iy, bool value) {
    cells[static_cast<size_t>(iy) * width + ix] = value ? 1 : 0;
  }
  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && ix < width && iy >= 0 && iy < height;
  }
  Vec2 cell_center(int ix, int iy) const {
    return origin + Vec2((ix + 0.5) * resolution, (iy + 0.5) * resolution);
  }
  /// Cell indices containing a world position (no bounds check).
  std::pair<int, int> cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
            static_cast<int>(std::floor((p.y() - origin.y()) / resolution))};
  }
  double world_width() const { return width * resolution; }
  double world_height() const { return height * resolution; }
};

struct RobotState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // radians, in (-pi, pi]
  double radius = 0.2;   // disc robot, meters
};

struct NoiseParams {
  bool enabled = false;
  double axial_a = 0.005;    // sigma = axial_a * distance^2
  double dropout_prob = 0.1; // beam replaced by max_range
};

struct RangeScan {
  std::vector<double> beams;  // meters, beam 0 along robot heading, CCW
  double fov = 2.0 * M_PI;
  double max_range = 6.0;
  bool inside_obstacle = false;
};

struct WorldParams {
  double resolution = 0.05;
  double size_m = 12.0;
  double density = 0.15;       // target occupied fraction of the interior
  double robot_radius = 0.2;   // door gaps are >= 3 robot diameters
  bool boxes = true;
  bool discs = true;
  bool walls = true;
};

/// Procedural walled world: axis-aligned boxes, discs and wall segments
/// with door gaps. Deterministic in the seed; regenerates (up to 20 tries)
/// until opposite corner regions are flood-fill connected.
OccupancyGrid generate_world(std::uint64_t seed, const WorldParams& params);

/// Flood-fill reachability between two free cells (4-connected).
bool cells_connected(const OccupancyGrid& grid, int ax, int ay, int bx, int by);

/// First-hit DDA raycast per beam, optional distance-dependent Gaussian
/// noise plus dropouts. A scan from inside an obstacle is all-zero and
/// flagged.
RangeScan raycast_scan(const OccupancyGrid& grid, const RobotState& state,
                       int beam_count, double max_range,
                       const NoiseParams& noise, Rng& rng);

/// Disc-vs-cell-box overlap test at a world position.
bool disc_collides(const OccupancyGrid& grid, const Vec2& center, double radius);

struct StepResult {
  RobotState state;
  bool collided = false;
  double moved = 0.0;
};

/// Moves up to step_len straight toward target with a swept-disc check at
/// resolution/2 granularity; stops at the last free pose on contact.
StepResult step_robot(const OccupancyGrid& grid, const RobotState& state,
                      const Vec2& target, double step_len);

/// Versioned binary serialization (magic SDPW) and a text grid for humans.
void save_world(const OccupancyGrid& grid, const std::string& path);
OccupancyGrid load_world(const std::string& path);
std::string world_to_text(const OccupancyGrid& grid);

}  // namespace sdplan
