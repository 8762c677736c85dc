#include "kronlow/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "kronlow/errors.hpp"

namespace kronlow {

std::string_view to_string(BoxSide side) noexcept { return side == BoxSide::open ? "open" : "closed"; }

namespace detail {

std::vector<double> axis_grid(const PointSet& points, std::size_t j) {
  std::vector<double> grid;
  grid.reserve(points.size() + 1);
  for (std::size_t i = 0; i < points.size(); ++i) grid.push_back(points(i, j));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.back() < 1.0) grid.push_back(1.0);
  return grid;
}

}  // namespace detail

namespace {

void require_nonempty(const PointSet& points, const char* who) {
  if (points.size() == 0 || points.dim() == 0) throw InputError(std::string(who) + ": empty point set");
}

// Candidate maximum expressed in grid indices; lexicographic order on the
// indices equals lexicographic order on the corner coordinates.
struct Best {
  double value = -1.0;
  std::array<std::uint32_t, kExactMaxDim> index{};
  BoxSide side = BoxSide::open;

  bool improved_by(double v, const std::array<std::uint32_t, kExactMaxDim>& idx, BoxSide s,
                   std::size_t d) const noexcept {
    if (v != value) return v > value;
    for (std::size_t j = 0; j < d; ++j) {
      if (idx[j] != index[j]) return idx[j] < index[j];
    }
    return s == BoxSide::open && side == BoxSide::closed;
  }
};

DiscrepancyResult to_result(const Best& best, const std::vector<std::vector<double>>& grids) {
  DiscrepancyResult r;
  r.value = best.value;
  r.side = best.side;
  r.witness.resize(grids.size());
  for (std::size_t j = 0; j < grids.size(); ++j) r.witness[j] = grids[j][best.index[j]];
  return r;
}

std::vector<std::vector<double>> all_grids(const PointSet& points) {
  std::vector<std::vector<double>> grids(points.dim());
  for (std::size_t j = 0; j < points.dim(); ++j) grids[j] = detail::axis_grid(points, j);
  return grids;
}

// Rank of every coordinate within its axis grid.
std::vector<std::uint32_t> grid_ranks(const PointSet& points, const std::vector<std::vector<double>>& grids) {
  const std::size_t n = points.size(), d = points.dim();
  std::vector<std::uint32_t> ranks(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& g = grids[j];
      ranks[i * d + j] = static_cast<std::uint32_t>(std::lower_bound(g.begin(), g.end(), points(i, j)) - g.begin());
    }
  }
  return ranks;
}

DiscrepancyResult sweep_1d(const PointSet& points, const std::vector<std::vector<double>>& grids,
                           const std::vector<std::uint32_t>& ranks) {
  const std::size_t n = points.size();
  const auto& g = grids[0];
  std::vector<std::uint32_t> at(g.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++at[ranks[i]];

  const double nd = static_cast<double>(n);
  Best best;
  std::array<std::uint32_t, kExactMaxDim> idx{};
  std::uint32_t below = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    idx[0] = static_cast<std::uint32_t>(s);
    const double vol = 1.0 * g[s];
    const double open = detail::corner_value(vol, below / nd, BoxSide::open);
    if (best.improved_by(open, idx, BoxSide::open, 1)) best = {open, idx, BoxSide::open};
    below += at[s];
    const double closed = detail::corner_value(vol, below / nd, BoxSide::closed);
    if (best.improved_by(closed, idx, BoxSide::closed, 1)) best = {closed, idx, BoxSide::closed};
  }
  return to_result(best, grids);
}

// Sweep over the last axis. table[c] counts inserted points whose ranks on
// the first k = d-1 axes are all strictly below the cell index c, so the open
// count at corner index c is table[c] and the closed count is table[c + 1].
class DominanceSweep {
 public:
  DominanceSweep(const PointSet& points, const std::vector<std::vector<double>>& grids,
                 const std::vector<std::uint32_t>& ranks)
      : points_(points), grids_(grids), ranks_(ranks), d_(points.dim()), k_(d_ - 1) {
    double cells = 1.0;
    for (std::size_t j = 0; j < k_; ++j) {
      extent_[j] = grids_[j].size() + 1;
      cells *= static_cast<double>(extent_[j]);
    }
    if (cells > kMaxCells)
      throw ConfigError("star_discrepancy_exact: count table of " + std::to_string(cells) +
                        " cells exceeds the memory guard");
    stride_[k_ - 1] = 1;
    for (std::size_t j = k_ - 1; j-- > 0;) stride_[j] = stride_[j + 1] * extent_[j + 1];
    shift_ = 0;
    for (std::size_t j = 0; j < k_; ++j) shift_ += stride_[j];
    table_.assign(static_cast<std::size_t>(cells), 0);
  }

  DiscrepancyResult run() {
    const std::size_t n = points_.size();
    const auto& last = grids_[d_ - 1];
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rank(a, d_ - 1) < rank(b, d_ - 1); });

    std::size_t next = 0;
    for (std::size_t s = 0; s <= last.size(); ++s) {
      // table now holds points with last-axis rank < s: open boxes at level s
      // and closed boxes at level s - 1.
      scan(s < last.size() ? static_cast<long>(s) : -1, static_cast<long>(s) - 1);
      while (next < n && rank(order[next], d_ - 1) == s) insert(order[next++]);
    }
    return to_result(best_, grids_);
  }

 private:
  static constexpr double kMaxCells = 268435456.0;  // 1 GiB of counters

  std::uint32_t rank(std::size_t i, std::size_t j) const { return ranks_[i * d_ + j]; }

  void insert(std::size_t i) {
    // increment every cell whose index exceeds the point's rank on all k axes
    std::array<std::size_t, kExactMaxDim> lo{}, idx{};
    for (std::size_t j = 0; j < k_; ++j) lo[j] = rank(i, j) + 1;
    idx = lo;
    const std::size_t inner = k_ - 1;
    while (true) {
      std::size_t base = 0;
      for (std::size_t j = 0; j < inner; ++j) base += idx[j] * stride_[j];
      std::uint32_t* row = table_.data() + base;
      for (std::size_t b = lo[inner]; b < extent_[inner]; ++b) ++row[b];
      if (!advance(idx, lo, inner, [&](std::size_t j) { return extent_[j]; })) break;
    }
  }

  template <class End>
  static bool advance(std::array<std::size_t, kExactMaxDim>& idx, const std::array<std::size_t, kExactMaxDim>& lo,
                      std::size_t outer, End end) {
    for (std::size_t j = outer; j-- > 0;) {
      if (++idx[j] < end(j)) return true;
      idx[j] = lo[j];
    }
    return false;
  }

  void scan(long open_level, long closed_level) {
    const std::size_t inner = k_ - 1;
    const auto& g_inner = grids_[inner];
    const std::size_t m_inner = g_inner.size();
    const double nd = static_cast<double>(points_.size());
    const auto& last = grids_[d_ - 1];
    const double g_open = open_level >= 0 ? last[open_level] : 0.0;
    const double g_closed = closed_level >= 0 ? last[closed_level] : 0.0;
    const bool do_open = open_level >= 0, do_closed = closed_level >= 0;

    std::array<std::size_t, kExactMaxDim> idx{}, zero{};
    while (true) {
      std::size_t base = 0;
      double prefix = 1.0;
      for (std::size_t j = 0; j < inner; ++j) {
        base += idx[j] * stride_[j];
        prefix *= grids_[j][idx[j]];
      }
      const std::uint32_t* open_row = table_.data() + base;
      const std::uint32_t* closed_row = table_.data() + base + shift_;

      double row_max = -1.0;
      if (do_open) {
        for (std::size_t b = 0; b < m_inner; ++b) {
          const double v = detail::corner_value((prefix * g_inner[b]) * g_open, open_row[b] / nd, BoxSide::open);
          row_max = std::max(row_max, v);
        }
      }
      if (do_closed) {
        for (std::size_t b = 0; b < m_inner; ++b) {
          const double v =
              detail::corner_value((prefix * g_inner[b]) * g_closed, closed_row[b] / nd, BoxSide::closed);
          row_max = std::max(row_max, v);
        }
      }
      if (row_max >= best_.value) refine_row(idx, prefix, open_row, closed_row, open_level, closed_level);

      if (!advance(idx, zero, inner, [&](std::size_t j) { return grids_[j].size(); })) break;
    }
  }

  void refine_row(const std::array<std::size_t, kExactMaxDim>& outer, double prefix, const std::uint32_t* open_row,
                  const std::uint32_t* closed_row, long open_level, long closed_level) {
    const std::size_t inner = k_ - 1;
    const auto& g_inner = grids_[inner];
    const double nd = static_cast<double>(points_.size());
    const auto& last = grids_[d_ - 1];
    std::array<std::uint32_t, kExactMaxDim> idx{};
    for (std::size_t j = 0; j < inner; ++j) idx[j] = static_cast<std::uint32_t>(outer[j]);
    for (std::size_t b = 0; b < g_inner.size(); ++b) {
      idx[inner] = static_cast<std::uint32_t>(b);
      if (open_level >= 0) {
        idx[d_ - 1] = static_cast<std::uint32_t>(open_level);
        const double v =
            detail::corner_value((prefix * g_inner[b]) * last[open_level], open_row[b] / nd, BoxSide::open);
        if (best_.improved_by(v, idx, BoxSide::open, d_)) best_ = {v, idx, BoxSide::open};
      }
      if (closed_level >= 0) {
        idx[d_ - 1] = static_cast<std::uint32_t>(closed_level);
        const double v =
            detail::corner_value((prefix * g_inner[b]) * last[closed_level], closed_row[b] / nd, BoxSide::closed);
        if (best_.improved_by(v, idx, BoxSide::closed, d_)) best_ = {v, idx, BoxSide::closed};
      }
    }
  }

  const PointSet& points_;
  const std::vector<std::vector<double>>& grids_;
  const std::vector<std::uint32_t>& ranks_;
  std::size_t d_, k_;
  std::array<std::size_t, kExactMaxDim> extent_{}, stride_{};
  std::size_t shift_ = 0;
  std::vector<std::uint32_t> table_;
  Best best_;
};

}  // namespace

double local_discrepancy(const PointSet& points, std::span<const double> q, BoxSide side) {
  require_nonempty(points, "local_discrepancy");
  const std::size_t d = points.dim();
  if (q.size() != d) throw InputError("local_discrepancy: corner has wrong dimension");
  double volume = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!(q[j] >= 0.0 && q[j] <= 1.0)) throw InputError("local_discrepancy: corner component outside [0,1]");
    volume *= q[j];
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool inside = true;
    for (std::size_t j = 0; j < d && inside; ++j) {
      inside = side == BoxSide::open ? points(i, j) < q[j] : points(i, j) <= q[j];
    }
    count += inside;
  }
  return detail::corner_value(volume, static_cast<double>(count) / static_cast<double>(points.size()), side);
}

DiscrepancyResult star_discrepancy_oracle(const PointSet& points) {
  require_nonempty(points, "star_discrepancy_oracle");
  const std::size_t n = points.size(), d = points.dim();
  if (std::pow(static_cast<double>(n), static_cast<double>(d)) > kOracleGridLimit)
    throw ConfigError("star_discrepancy_oracle: n^d = " + std::to_string(n) + "^" + std::to_string(d) +
                      " exceeds the 1e8 enumeration guard");
  if (d > kExactMaxDim) {
    // Best stores at most kExactMaxDim indices; keep the oracle in the same range.
    throw UnsupportedDimension("star_discrepancy_oracle: dimension above " + std::to_string(kExactMaxDim));
  }
  const auto grids = all_grids(points);
  const double nd = static_cast<double>(n);

  Best best;
  std::array<std::uint32_t, kExactMaxDim> idx{};
  std::vector<double> q(d);
  while (true) {
    double volume = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      q[j] = grids[j][idx[j]];
      volume *= q[j];
    }
    std::size_t open = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in_open = true, in_closed = true;
      for (std::size_t j = 0; j < d; ++j) {
        in_open = in_open && points(i, j) < q[j];
        in_closed = in_closed && points(i, j) <= q[j];
      }
      open += in_open;
      closed += in_closed;
    }
    const double vo = detail::corner_value(volume, static_cast<double>(open) / nd, BoxSide::open);
    if (best.improved_by(vo, idx, BoxSide::open, d)) best = {vo, idx, BoxSide::open};
    const double vc = detail::corner_value(volume, static_cast<double>(closed) / nd, BoxSide::closed);
    if (best.improved_by(vc, idx, BoxSide::closed, d)) best = {vc, idx, BoxSide::closed};

    std::size_t j = d;
    while (j-- > 0) {
      if (++idx[j] < grids[j].size()) break;
      idx[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return to_result(best, grids);
}

DiscrepancyResult star_discrepancy_exact(const PointSet& points) {
  require_nonempty(points, "star_discrepancy_exact");
  const std::size_t d = points.dim();
  if (d > kExactMaxDim)
    throw UnsupportedDimension("star_discrepancy_exact supports d <= " + std::to_string(kExactMaxDim) + ", got d=" +
                               std::to_string(d) + "; use star_discrepancy_oracle for small sets");
  const auto grids = all_grids(points);
  const auto ranks = grid_ranks(points, grids);
  if (d == 1) return sweep_1d(points, grids, ranks);
  return DominanceSweep(points, grids, ranks).run();
}

}  // namespace kronlow
