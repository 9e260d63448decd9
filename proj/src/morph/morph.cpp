// SPDX-License-Identifier: Apache-2.0
#include "splicedet/morph/morph.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "splicedet/errors.hpp"

namespace splicedet::morph {

std::vector<std::pair<int, int>> StructuringElement::offsets() const {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (at(y, x)) out.emplace_back(y - anchor_y, x - anchor_x);
    }
  }
  return out;
}

StructuringElement StructuringElement::reflected() const {
  StructuringElement r;
  r.height = height;
  r.width = width;
  r.anchor_y = height - 1 - anchor_y;
  r.anchor_x = width - 1 - anchor_x;
  r.cells.resize(cells.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      r.cells[static_cast<std::size_t>(y) * width + x] =
          cells[static_cast<std::size_t>(height - 1 - y) * width +
                (width - 1 - x)];
    }
  }
  return r;
}

void StructuringElement::validate() const {
  if (height <= 0 || width <= 0 ||
      cells.size() != static_cast<std::size_t>(height) * width) {
    throw UsageError("structuring element: bad dimensions");
  }
  if (anchor_y < 0 || anchor_y >= height || anchor_x < 0 || anchor_x >= width) {
    throw UsageError("structuring element: anchor out of bounds");
  }
  for (auto c : cells) {
    if (c) return;
  }
  throw UsageError("structuring element: needs at least one true cell");
}

StructuringElement StructuringElement::square(int side) {
  if (side <= 0) throw UsageError("structuring element: side must be positive");
  StructuringElement se;
  se.height = se.width = side;
  se.anchor_y = se.anchor_x = (side - 1) / 2;
  se.cells.assign(static_cast<std::size_t>(side) * side, 1);
  return se;
}

StructuringElement StructuringElement::chebyshev_ring(int a, int b) {
  if (a < 0 || b <= a) {
    throw UsageError("erode-isolated element requires b > a >= 0");
  }
  const int side = 2 * b + 1;
  StructuringElement se;
  se.height = se.width = side;
  se.anchor_y = se.anchor_x = b;
  se.cells.assign(static_cast<std::size_t>(side) * side, 0);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int d = std::max(std::abs(y - b), std::abs(x - b));
      if (d > a && d <= b) {
        se.cells[static_cast<std::size_t>(y) * side + x] = 1;
      }
    }
  }
  return se;
}

BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
  se.validate();
  const auto offs = se.offsets();
  BinaryMask out(m.height, m.width);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      bool keep = true;
      for (const auto& [dy, dx] : offs) {
        const int yy = y + dy, xx = x + dx;
        if (!m.in_bounds(yy, xx) || !m.at(yy, xx)) {
          keep = false;
          break;
        }
      }
      out.set(y, x, keep);
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
  se.validate();
  const auto offs = se.reflected().offsets();
  BinaryMask out(m.height, m.width);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      bool hit = false;
      for (const auto& [dy, dx] : offs) {
        const int yy = y + dy, xx = x + dx;
        if (m.in_bounds(yy, xx) && m.at(yy, xx)) {
          hit = true;
          break;
        }
      }
      out.set(y, x, hit);
    }
  }
  return out;
}

BinaryMask open(const BinaryMask& m, const StructuringElement& se) {
  return dilate(erode(m, se), se);
}

BinaryMask close(const BinaryMask& m, const StructuringElement& se) {
  return erode(dilate(m, se), se);
}

BinaryMask fill_holes(const BinaryMask& m) {
  BinaryMask reached(m.height, m.width);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int y, int x) {
    if (!m.at(y, x) && !reached.at(y, x)) {
      reached.set(y, x, true);
      queue.emplace_back(y, x);
    }
  };
  for (int x = 0; x < m.width; ++x) {
    seed(0, x);
    seed(m.height - 1, x);
  }
  for (int y = 0; y < m.height; ++y) {
    seed(y, 0);
    seed(y, m.width - 1);
  }
  static constexpr int kDy[4] = {-1, 1, 0, 0};
  static constexpr int kDx[4] = {0, 0, -1, 1};
  while (!queue.empty()) {
    const auto [y, x] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int yy = y + kDy[k], xx = x + kDx[k];
      if (m.in_bounds(yy, xx) && !m.at(yy, xx) && !reached.at(yy, xx)) {
        reached.set(yy, xx, true);
        queue.emplace_back(yy, xx);
      }
    }
  }
  BinaryMask out(m.height, m.width);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = (m.data[i] || !reached.data[i]) ? 1 : 0;
  }
  return out;
}

Components connected_components(const BinaryMask& m) {
  Components comps;
  comps.labels.assign(m.size(), 0);
  std::deque<std::pair<int, int>> queue;
  std::int32_t next = 0;
  for (int sy = 0; sy < m.height; ++sy) {
    for (int sx = 0; sx < m.width; ++sx) {
      const std::size_t sidx = static_cast<std::size_t>(sy) * m.width + sx;
      if (!m.data[sidx] || comps.labels[sidx] != 0) continue;
      ++next;
      ComponentStats st;
      st.label = next;
      st.min_y = st.max_y = sy;
      st.min_x = st.max_x = sx;
      comps.labels[sidx] = next;
      queue.emplace_back(sy, sx);
      while (!queue.empty()) {
        const auto [y, x] = queue.front();
        queue.pop_front();
        ++st.area;
        st.min_y = std::min(st.min_y, y);
        st.max_y = std::max(st.max_y, y);
        st.min_x = std::min(st.min_x, x);
        st.max_x = std::max(st.max_x, x);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            const int yy = y + dy, xx = x + dx;
            if (!m.in_bounds(yy, xx)) continue;
            const std::size_t idx =
                static_cast<std::size_t>(yy) * m.width + xx;
            if (m.data[idx] && comps.labels[idx] == 0) {
              comps.labels[idx] = next;
              queue.emplace_back(yy, xx);
            }
          }
        }
      }
      comps.stats.push_back(st);
    }
  }
  return comps;
}

StructuringElement make_erode_isolated_element(int a, int b) {
  return StructuringElement::chebyshev_ring(a, b);
}

BinaryMask erode_isolated(const BinaryMask& m, int a, int b) {
  const BinaryMask support = dilate(m, make_erode_isolated_element(a, b));
  BinaryMask out(m.height, m.width);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = (m.data[i] && support.data[i]) ? 1 : 0;
  }
  return out;
}

BinaryMask postprocess_v1(const BinaryMask& m) {
  const StructuringElement se = StructuringElement::square(2);
  return fill_holes(close(open(m, se), se));
}

void PostProcessConfig::validate() const {
  closing.validate();
  if (schedule.empty()) {
    throw UsageError("post-process config: schedule must be non-empty");
  }
  for (const auto& s : schedule) {
    if (s.a < 0 || s.b <= s.a) {
      throw UsageError("post-process config: schedule entries need b > a >= 0");
    }
  }
}

PostProcessResult postprocess_v2(const BinaryMask& m,
                                 const PostProcessConfig& cfg) {
  cfg.validate();
  BinaryMask cur = close(m, cfg.closing);
  if (cfg.fill_holes) cur = morph::fill_holes(cur);
  const std::size_t cap = cfg.pass_cap();
  std::size_t passes = 0;
  while (passes < cap) {
    BinaryMask before = cur;
    for (const auto& spec : cfg.schedule) {
      cur = erode_isolated(cur, spec.a, spec.b);
    }
    ++passes;
    if (cur == before) break;
  }
  return {std::move(cur), passes};
}

}  // namespace splicedet::morph
