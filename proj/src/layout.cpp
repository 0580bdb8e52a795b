#include "activecanvas/layout.hpp"

#include <algorithm>
#include <cmath>

namespace activecanvas {

double clamp_unit(double v) noexcept {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

Layout::Layout(std::vector<Placement> items) : items_(std::move(items)) {
  for (auto& p : items_) {
    p.x = clamp_unit(p.x);
    p.y = clamp_unit(p.y);
  }
}

void Layout::set_position(std::size_t i, double x, double y) {
  items_.at(i).x = clamp_unit(x);
  items_[i].y = clamp_unit(y);
}

void Layout::move(std::size_t i, double x, double y) {
  set_position(i, x, y);
  items_[i].touched = true;
}

std::vector<std::size_t> Layout::touched_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].touched) out.push_back(i);
  }
  return out;
}

std::size_t Layout::touched_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(), [](const Placement& p) { return p.touched; }));
}

mi::SampleBlock Layout::positions(const std::vector<std::size_t>& rows) const {
  mi::SampleBlock block(rows.size(), 2);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    block(r, 0) = items_.at(rows[r]).x;
    block(r, 1) = items_[rows[r]].y;
  }
  return block;
}

}  // namespace activecanvas
