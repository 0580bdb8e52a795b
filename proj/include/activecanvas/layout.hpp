#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "activecanvas/mi.hpp"

namespace activecanvas {

/// Clamps a canvas coordinate into [0, 1]. NaN maps to 0.
double clamp_unit(double v) noexcept;

struct Placement {
  std::string id;
  double x = 0.5;
  double y = 0.5;
  bool touched = false;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Normalized canvas positions, one entry per workspace item, in manifest order.
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::vector<Placement> items);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const Placement& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  /// Moves an item (clamped). Does not touch it.
  void set_position(std::size_t i, double x, double y);
  /// User drag: moves and marks touched. Touched never unsets.
  void move(std::size_t i, double x, double y);

  std::vector<std::size_t> touched_indices() const;
  std::size_t touched_count() const noexcept;

  /// |rows| x 2 block of (x, y) for the given item indices.
  mi::SampleBlock positions(const std::vector<std::size_t>& rows) const;

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::vector<Placement> items_;
};

}  // namespace activecanvas
