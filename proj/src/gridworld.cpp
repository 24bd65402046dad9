#include "sdplan/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <stdexcept>

namespace sdplan {

namespace {

constexpr char kWorldMagic[4] = {'S', 'D', 'P', 'W'};
constexpr std::uint32_t kWorldVersion = 1;

void fill_rect(OccupancyGrid& grid, double x0, double y0, double x1, double y1) {
  const int ix0 = std::max(0, static_cast<int>(std::floor((x0 - grid.origin.x()) / grid.resolution)));
  const int iy0 = std::max(0, static_cast<int>(std::floor((y0 - grid.origin.y()) / grid.resolution)));
  const int ix1 = std::min(grid.width - 1, static_cast<int>(std::floor((x1 - grid.origin.x()) / grid.resolution)));
  const int iy1 = std::min(grid.height - 1, static_cast<int>(std::floor((y1 - grid.origin.y()) / grid.resolution)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) grid.set(ix, iy, true);
  }
}

void fill_disc(OccupancyGrid& grid, const Vec2& c, double r) {
  const int ix0 = std::max(0, static_cast<int>(std::floor((c.x() - r - grid.origin.x()) / grid.resolution)));
  const int iy0 = std::max(0, static_cast<int>(std::floor((c.y() - r - grid.origin.y()) / grid.resolution)));
  const int ix1 = std::min(grid.width - 1, static_cast<int>(std::floor((c.x() + r - grid.origin.x()) / grid.resolution)));
  const int iy1 = std::min(grid.height - 1, static_cast<int>(std::floor((c.y() + r - grid.origin.y()) / grid.resolution)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if ((grid.cell_center(ix, iy) - c).norm() <= r) grid.set(ix, iy, true);
    }
  }
}

double occupied_interior_fraction(const OccupancyGrid& grid) {
  int occupied = 0;
  int interior = 0;
  for (int iy = 1; iy < grid.height - 1; ++iy) {
    for (int ix = 1; ix < grid.width - 1; ++ix) {
      ++interior;
      if (grid.occupied(ix, iy)) ++occupied;
    }
  }
  return interior > 0 ? static_cast<double>(occupied) / interior : 0.0;
}

OccupancyGrid generate_once(std::uint64_t seed, const WorldParams& p) {
  OccupancyGrid grid;
  grid.resolution = p.resolution;
  grid.width = static_cast<int>(std::lround(p.size_m / p.resolution));
  grid.height = grid.width;
  grid.origin = Vec2::Zero();
  grid.cells.assign(static_cast<size_t>(grid.width) * grid.height, 0);

  // walled boundary
  for (int ix = 0; ix < grid.width; ++ix) {
    grid.set(ix, 0, true);
    grid.set(ix, grid.height - 1, true);
  }
  for (int iy = 0; iy < grid.height; ++iy) {
    grid.set(0, iy, true);
    grid.set(grid.width - 1, iy, true);
  }

  Rng rng(seed);
  const double door = 6.0 * p.robot_radius;  // >= 3 robot diameters
  int guard = 0;
  while (occupied_interior_fraction(grid) < p.density && guard++ < 4000) {
    const int kind = rng.uniform_int(0, 2);
    if (kind == 0 && p.boxes) {
      const double w = rng.uniform(0.3, 1.5);
      const double h = rng.uniform(0.3, 1.5);
      const double x = rng.uniform(0.3, p.size_m - 0.3 - w);
      const double y = rng.uniform(0.3, p.size_m - 0.3 - h);
      fill_rect(grid, x, y, x + w, y + h);
    } else if (kind == 1 && p.discs) {
      const double r = rng.uniform(0.15, 0.75);
      const Vec2 c(rng.uniform(0.3 + r, p.size_m - 0.3 - r),
                   rng.uniform(0.3 + r, p.size_m - 0.3 - r));
      fill_disc(grid, c, r);
    } else if (kind == 2 && p.walls) {
      // wall across a random span, with a door gap
      const bool horizontal = rng.bernoulli(0.5);
      const double len = rng.uniform(2.0, 5.0);
      const double thick = rng.uniform(0.1, 0.2);
      const double a0 = rng.uniform(0.5, p.size_m - 0.5 - len);
      const double b0 = rng.uniform(0.5, p.size_m - 0.5 - thick);
      const double door_at = a0 + rng.uniform(0.2, std::max(0.21, len - door - 0.2));
      if (horizontal) {
        fill_rect(grid, a0, b0, door_at, b0 + thick);
        fill_rect(grid, std::min(door_at + door, a0 + len), b0, a0 + len, b0 + thick);
      } else {
        fill_rect(grid, b0, a0, b0 + thick, door_at);
        fill_rect(grid, b0, std::min(door_at + door, a0 + len), b0 + thick, a0 + len);
      }
    }
  }
  return grid;
}

}  // namespace

bool cells_connected(const OccupancyGrid& grid, int ax, int ay, int bx, int by) {
  if (!grid.in_bounds(ax, ay) || !grid.in_bounds(bx, by)) return false;
  if (grid.occupied(ax, ay) || grid.occupied(bx, by)) return false;
  std::vector<std::uint8_t> seen(grid.cells.size(), 0);
  std::deque<std::pair<int, int>> queue{{ax, ay}};
  seen[static_cast<size_t>(ay) * grid.width + ax] = 1;
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    if (x == bx && y == by) return true;
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k];
      const int ny = y + dy[k];
      if (!grid.in_bounds(nx, ny) || grid.occupied(nx, ny)) continue;
      std::uint8_t& mark = seen[static_cast<size_t>(ny) * grid.width + nx];
      if (!mark) {
        mark = 1;
        queue.emplace_back(nx, ny);
      }
    }
  }
  return false;
}

OccupancyGrid generate_world(std::uint64_t seed, const WorldParams& params) {
  if (params.density < 0.0 || params.density > 0.4) {
    throw std::invalid_argument("density must lie in [0, 0.4]");
  }
  for (int attempt = 0; attempt < 20; ++attempt) {
    OccupancyGrid grid = generate_once(Rng::splitmix(seed ^ (0xD1B54A32D192ED03ULL * attempt)), params);
    // opposite-corner probe regions must connect (also keeps them free)
    const int margin = static_cast<int>(std::lround(1.0 / params.resolution));
    const int ax = margin;
    const int ay = margin;
    const int bx = grid.width - 1 - margin;
    const int by = grid.height - 1 - margin;
    for (int oy = -2; oy <= 2; ++oy) {
      for (int ox = -2; ox <= 2; ++ox) {
        grid.set(ax + ox, ay + oy, false);
        grid.set(bx + ox, by + oy, false);
      }
    }
    if (cells_connected(grid, ax, ay, bx, by)) return grid;
  }
  throw std::runtime_error("world generation failed connectivity after 20 retries");
}

RangeScan raycast_scan(const OccupancyGrid& grid, const RobotState& state,
                       int beam_count, double max_range,
                       const NoiseParams& noise, Rng& rng) {
  RangeScan scan;
  scan.beams.assign(static_cast<size_t>(beam_count), 0.0);
  scan.max_range = max_range;
  scan.fov = 2.0 * M_PI;

  const auto [cx, cy] = grid.cell_of(state.position);
  if (!grid.in_bounds(cx, cy) || grid.occupied(cx, cy)) {
    scan.inside_obstacle = true;
    return scan;
  }

  for (int b = 0; b < beam_count; ++b) {
    const double angle = state.heading + scan.fov * b / beam_count;
    const Vec2 dir(std::cos(angle), std::sin(angle));

    // DDA traversal (Amanatides & Woo)
    int ix = cx;
    int iy = cy;
    const int step_x = dir.x() > 0 ? 1 : -1;
    const int step_y = dir.y() > 0 ? 1 : -1;
    const double inv_dx = dir.x() != 0.0 ? 1.0 / std::abs(dir.x()) : 1e30;
    const double inv_dy = dir.y() != 0.0 ? 1.0 / std::abs(dir.y()) : 1e30;
    const Vec2 local = state.position - grid.origin;
    const double fx = local.x() / grid.resolution - ix;
    const double fy = local.y() / grid.resolution - iy;
    double t_max_x = (dir.x() > 0 ? (1.0 - fx) : fx) * inv_dx * grid.resolution;
    double t_max_y = (dir.y() > 0 ? (1.0 - fy) : fy) * inv_dy * grid.resolution;
    const double t_delta_x = inv_dx * grid.resolution;
    const double t_delta_y = inv_dy * grid.resolution;

    double distance = max_range;
    double t = 0.0;
    while (t < max_range) {
      if (t_max_x < t_max_y) {
        t = t_max_x;
        t_max_x += t_delta_x;
        ix += step_x;
      } else {
        t = t_max_y;
        t_max_y += t_delta_y;
        iy += step_y;
      }
      if (!grid.in_bounds(ix, iy)) break;
      if (grid.occupied(ix, iy)) {
        distance = std::min(t, max_range);
        break;
      }
    }

    if (noise.enabled) {
      if (rng.bernoulli(noise.dropout_prob)) {
        distance = max_range;
      } else if (distance < max_range) {
        distance += rng.normal(0.0, noise.axial_a * distance * distance);
      }
    }
    scan.beams[static_cast<size_t>(b)] = std::clamp(distance, 0.0, max_range);
  }
  return scan;
}

bool disc_collides(const OccupancyGrid& grid, const Vec2& center, double radius) {
  const int ix0 = static_cast<int>(std::floor((center.x() - radius - grid.origin.x()) / grid.resolution));
  const int iy0 = static_cast<int>(std::floor((center.y() - radius - grid.origin.y()) / grid.resolution));
  const int ix1 = static_cast<int>(std::floor((center.x() + radius - grid.origin.x()) / grid.resolution));
  const int iy1 = static_cast<int>(std::floor((center.y() + radius - grid.origin.y()) / grid.resolution));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!grid.in_bounds(ix, iy)) return true;  // outside counts as solid
      if (!grid.occupied(ix, iy)) continue;
      // closest point of the cell box to the disc center
      const Vec2 lo = grid.origin + Vec2(ix * grid.resolution, iy * grid.resolution);
      const Vec2 hi = lo + Vec2(grid.resolution, grid.resolution);
      const double px = std::clamp(center.x(), lo.x(), hi.x());
      const double py = std::clamp(center.y(), lo.y(), hi.y());
      if ((center - Vec2(px, py)).norm() <= radius) return true;
    }
  }
  return false;
}

StepResult step_robot(const OccupancyGrid& grid, const RobotState& state,
                      const Vec2& target, double step_len) {
  if (step_len <= 0.0) throw std::invalid_argument("step_len must be positive");
  StepResult result{state, false, 0.0};
  const Vec2 delta = target - state.position;
  const double dist = delta.norm();
  if (dist < 1e-12) return result;

  const Vec2 dir = delta / dist;
  const double travel = std::min(step_len, dist);
  const double granularity = grid.resolution / 2.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(travel / granularity)));

  Vec2 last_free = state.position;
  double moved = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double d = travel * k / steps;
    const Vec2 probe = state.position + d * dir;
    if (disc_collides(grid, probe, state.radius)) {
      result.collided = true;
      break;
    }
    last_free = probe;
    moved = d;
  }
  result.state.position = last_free;
  result.moved = moved;
  if (moved > 0.0) {
    result.state.heading = std::atan2(dir.y(), dir.x());
  }
  return result;
}

void save_world(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kWorldMagic, 4);
  auto put_u32 = [&out](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_f64 = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u32(kWorldVersion);
  put_f64(grid.resolution);
  put_u32(static_cast<std::uint32_t>(grid.width));
  put_u32(static_cast<std::uint32_t>(grid.height));
  put_f64(grid.origin.x());
  put_f64(grid.origin.y());
  // bit-packed occupancy, row-major, LSB first
  std::vector<std::uint8_t> packed((grid.cells.size() + 7) / 8, 0);
  for (size_t i = 0; i < grid.cells.size(); ++i) {
    if (grid.cells[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  out.write(reinterpret_cast<const char*>(packed.data()),
            static_cast<std::streamsize>(packed.size()));
}

OccupancyGrid load_world(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kWorldMagic, 4) != 0) {
    throw std::runtime_error("not a world file: " + path);
  }
  auto get_u32 = [&in]() { std::uint32_t v; in.read(reinterpret_cast<char*>(&v), 4); return v; };
  auto get_f64 = [&in]() { double v; in.read(reinterpret_cast<char*>(&v), 8); return v; };
  const std::uint32_t version = get_u32();
  if (version != kWorldVersion) throw std::runtime_error("unsupported world version");
  OccupancyGrid grid;
  grid.resolution = get_f64();
  grid.width = static_cast<int>(get_u32());
  grid.height = static_cast<int>(get_u32());
  grid.origin.x() = get_f64();
  grid.origin.y() = get_f64();
  grid.cells.assign(static_cast<size_t>(grid.width) * grid.height, 0);
  std::vector<std::uint8_t> packed((grid.cells.size() + 7) / 8, 0);
  in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
  if (!in) throw std::runtime_error("truncated world file: " + path);
  for (size_t i = 0; i < grid.cells.size(); ++i) {
    grid.cells[i] = (packed[i / 8] >> (i % 8)) & 1u;
  }
  return grid;
}

std::string world_to_text(const OccupancyGrid& grid) {
  std::string out;
  out.reserve(static_cast<size_t>((grid.width + 1) * grid.height));
  for (int iy = grid.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      out.push_back(grid.occupied(ix, iy) ? '#' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace sdplan
