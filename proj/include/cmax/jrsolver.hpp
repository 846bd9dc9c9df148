#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "cmax/convolution.hpp"
#include "cmax/errors.hpp"
#include "cmax/rational.hpp"

namespace cmax {

// Doubling-and-convolution feasibility solver for A x = b, x >= 0 integer.
//
// Levels K down to 0 track which right-hand sides are attainable using at
// most 2^(K-k) columns, but only inside a small lattice hypercube around the
// proportionally scaled target b/2^k. The hypercube's side depends only on
// the largest column l1-norm; each level is the clipped self-convolution of
// the one above it.

using IpSolution = std::vector<long long>;

// Smallest odd lattice side that the splitting guarantee needs for columns
// of l1-norm at most t. The discrepancy-based bound kicks in from t=3; below
// that a conservative bound applies. Both are odd, so boxes are symmetric.
inline int side_length(int t) {
  if (t < 1) throw ContractViolation("side_length: t must be >= 1");
  return t >= 3 ? 4 * t - 7 : 4 * t - 1;
}

// Integer lattice box: per-dimension ranges [floor(b_j/2^k) - r, ceil(b_j/2^k) + r].
// That is every integer strictly within distance r+1 of the scaled target:
// exactly S points when the target is integral, S+1 when it is fractional.
// The narrower all-round-inward form drops attainable points at fractional
// centers because the split drift bound is strict but accumulates across
// levels; see the regression case in the solver tests.
struct HypercubeBox {
  std::vector<long long> lo, hi;  // inclusive

  int dims() const { return static_cast<int>(lo.size()); }

  unsigned long long volume() const {
    unsigned __int128 v = 1;
    for (int j = 0; j < dims(); ++j) {
      if (hi[j] < lo[j]) return 0;
      v *= static_cast<unsigned long long>(hi[j] - lo[j] + 1);
      if (v > (static_cast<unsigned __int128>(1) << 62))
        throw ResourceLimitError("hypercube box volume exceeds 2^62 lattice points");
    }
    return static_cast<unsigned long long>(v);
  }

  bool contains(const std::vector<long long>& p) const {
    for (int j = 0; j < dims(); ++j)
      if (p[j] < lo[j] || p[j] > hi[j]) return false;
    return true;
  }

  // Mixed-radix index, last axis fastest.
  unsigned long long pack(const std::vector<long long>& p) const {
    unsigned long long idx = 0;
    for (int j = 0; j < dims(); ++j)
      idx = idx * static_cast<unsigned long long>(hi[j] - lo[j] + 1) +
            static_cast<unsigned long long>(p[j] - lo[j]);
    return idx;
  }

  std::vector<long long> unpack(unsigned long long idx) const {
    std::vector<long long> p(dims());
    for (int j = dims() - 1; j >= 0; --j) {
      unsigned long long len = static_cast<unsigned long long>(hi[j] - lo[j] + 1);
      p[j] = lo[j] + static_cast<long long>(idx % len);
      idx /= len;
    }
    return p;
  }
};

inline HypercubeBox box_at_level(const std::vector<long long>& b, int level, int radius) {
  HypercubeBox box;
  long long scale = 1ll << level;
  for (long long bj : b) {
    long long fl = bj >= 0 ? bj / scale : -((-bj + scale - 1) / scale);
    long long ce = bj >= 0 ? (bj + scale - 1) / scale : -((-bj) / scale);
    box.lo.push_back(fl - radius);
    box.hi.push_back(ce + radius);
  }
  return box;
}

// Attainable right-hand sides at one doubling level. Points built pairwise
// carry their parent pair; points built by convolution leave `parents` empty
// and the unwind recovers a pair by scanning the level above (slower, but no
// witness memory). Seed-level points carry the generating column instead.
struct LevelTable {
  HypercubeBox box;
  std::vector<unsigned long long> points;  // sorted packed indices
  struct Parent {
    unsigned long long u, v;  // packed in the level above
  };
  std::vector<Parent> parents;  // parallel to points, or empty
  std::vector<int> seed_col;    // seed level only: column index, -1 = origin

  long long find(unsigned long long packed) const {
    auto it = std::lower_bound(points.begin(), points.end(), packed);
    if (it == points.end() || *it != packed) return -1;
    return it - points.begin();
  }
};

enum class CombineMode { automatic, pairwise, fft };

struct JrOptions {
  CombineMode combine = CombineMode::automatic;
  int max_l1 = 0;  // column l1 bound t; 0 = compute from the matrix
  unsigned long long max_box_volume = 1ull << 22;  // dense array cells for one fft combine
  unsigned long long max_pair_work = 1ull << 27;   // point pairs for one pairwise combine
  unsigned long long max_table_points = 1ull << 23;
  // Per-column usage bounds, empty = unbounded. When the caller can promise
  // that a solution with x <= col_upper exists whenever any solution does,
  // every level box shrinks to the interval of row values reachable by
  // sub-solutions, which is what keeps the tables sparse.
  std::vector<long long> col_upper;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct JrLevelInfo {
  int level = 0;
  unsigned long long box_volume = 0;
  std::size_t points = 0;
  char strategy = '?';  // 's' seed, 'p' pairwise, 'f' fft
};

struct JrResult {
  std::optional<IpSolution> x;
  std::vector<JrLevelInfo> levels;
  int t = 0;     // column l1 bound used
  int side = 0;  // lattice side length
  int k = 0;     // doubling depth; k+1 tables were built
};

namespace detail {

inline void check_deadline(const JrOptions& opt) {
  if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline)
    throw ResourceLimitError("ip solve exceeded its time limit");
}

inline std::vector<long long> column_of(const std::vector<std::vector<long long>>& a, int c) {
  std::vector<long long> col(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) col[r] = a[r][c];
  return col;
}

// Pairwise combine: sums of all point pairs (with repetition), clipped.
inline void combine_pairwise(const LevelTable& prev, LevelTable& next,
                             const JrOptions& opt) {
  std::size_t n = prev.points.size();
  unsigned long long work = static_cast<unsigned long long>(n) * (n + 1) / 2;
  if (work > opt.max_pair_work)
    throw ResourceLimitError("pairwise combine work exceeds the configured cap");
  struct Entry {
    unsigned long long packed, u, v;
  };
  std::vector<Entry> entries;
  std::vector<std::vector<long long>> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = prev.box.unpack(prev.points[i]);
  std::vector<long long> sum(prev.box.dims());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      for (int d = 0; d < prev.box.dims(); ++d) sum[d] = coords[i][d] + coords[j][d];
      if (!next.box.contains(sum)) continue;
      entries.push_back({next.box.pack(sum), prev.points[i], prev.points[j]});
    }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.packed < b.packed; });
  for (const Entry& e : entries) {
    if (!next.points.empty() && next.points.back() == e.packed) continue;  // keep first pair
    next.points.push_back(e.packed);
    next.parents.push_back({e.u, e.v});
  }
  if (next.points.size() > opt.max_table_points)
    throw ResourceLimitError("level table exceeds the configured point cap");
}

// Convolution combine: indicator array over the previous box, squared via
// fft, thresholded at 1/2 (counts are integers, so anything >= 0.5 is a real
// hit), clipped to the next box. No parents are recorded.
inline void combine_fft(const LevelTable& prev, LevelTable& next, const JrOptions& opt) {
  int dims = prev.box.dims();
  std::vector<int> len(dims);
  unsigned __int128 out_vol = 1;
  for (int j = 0; j < dims; ++j) {
    len[j] = static_cast<int>(prev.box.hi[j] - prev.box.lo[j] + 1);
    out_vol *= static_cast<unsigned long long>(2 * len[j] - 1);
  }
  if (out_vol > opt.max_box_volume)
    throw ResourceLimitError("fft combine volume exceeds the configured cap");
  MultiArray ind = MultiArray::zeros(len);
  for (unsigned long long packed : prev.points) {
    auto p = prev.box.unpack(packed);
    std::vector<int> idx(dims);
    for (int j = 0; j < dims; ++j) idx[j] = static_cast<int>(p[j] - prev.box.lo[j]);
    ind.at(idx) = Cplx(1.0, 0.0);
  }
  MultiArray conv = fft_autoconvolve(ind);
  std::vector<int> idx(dims, 0);
  std::vector<long long> point(dims);
  for (std::size_t flat = 0; flat < conv.data.size(); ++flat) {
    if (conv.data[flat].real() >= 0.5) {
      std::size_t rest = flat;
      for (int j = dims - 1; j >= 0; --j) {
        idx[j] = static_cast<int>(rest % conv.dims[j]);
        rest /= conv.dims[j];
      }
      for (int j = 0; j < dims; ++j) point[j] = 2 * prev.box.lo[j] + idx[j];
      if (next.box.contains(point)) next.points.push_back(next.box.pack(point));
    }
  }
  std::sort(next.points.begin(), next.points.end());
  next.points.erase(std::unique(next.points.begin(), next.points.end()), next.points.end());
  if (next.points.size() > opt.max_table_points)
    throw ResourceLimitError("level table exceeds the configured point cap");
}

inline bool fft_viable(const LevelTable& prev, const JrOptions& opt,
                       double* cost_out = nullptr) {
  unsigned __int128 out_vol = 1;
  double passes = 0;
  for (int j = 0; j < prev.box.dims(); ++j) {
    unsigned long long l = 2 * static_cast<unsigned long long>(prev.box.hi[j] - prev.box.lo[j] + 1) - 1;
    out_vol *= l;
    if (out_vol > (static_cast<unsigned __int128>(1) << 62)) return false;
    passes += static_cast<double>(ceil_log2(l) + 1);
  }
  if (out_vol > opt.max_box_volume) return false;
  if (cost_out) *cost_out = static_cast<double>(static_cast<unsigned long long>(out_vol)) * passes * 8.0;
  return true;
}

}  // namespace detail

// Feasibility of A x = b over non-negative integer x with ||x||_1 <= u_bound,
// with a witness on success. Throws ResourceLimitError when a combine
// exceeds the configured caps, ContractViolation on malformed input.
inline JrResult solve_ip(const std::vector<std::vector<long long>>& a,
                         const std::vector<long long>& b, unsigned long long u_bound,
                         JrOptions opt = {}) {
  int rows = static_cast<int>(a.size());
  if (rows == 0) throw ContractViolation("solve_ip: matrix needs at least one row");
  int cols = static_cast<int>(a[0].size());
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != cols)
      throw ContractViolation("solve_ip: ragged matrix");
  if (static_cast<int>(b.size()) != rows)
    throw ContractViolation("solve_ip: rhs length mismatch");
  for (long long bj : b)
    if (bj < 0) throw ContractViolation("solve_ip: rhs must be non-negative");
  if (!opt.col_upper.empty() && static_cast<int>(opt.col_upper.size()) != cols)
    throw ContractViolation("solve_ip: col_upper length mismatch");
  for (long long ub : opt.col_upper)
    if (ub < 0) throw ContractViolation("solve_ip: col_upper must be non-negative");
  if (u_bound == 0) u_bound = 1;

  JrResult res;
  bool bounded = !opt.col_upper.empty();
  auto usable = [&](int c) { return !bounded || opt.col_upper[c] > 0; };
  int t = opt.max_l1;
  for (int c = 0; c < cols; ++c) {
    if (!usable(c)) continue;
    long long l1 = 0;
    for (int r = 0; r < rows; ++r) l1 += std::abs(a[r][c]);
    if (opt.max_l1 > 0 && l1 > opt.max_l1)
      throw ContractViolation("solve_ip: column l1-norm exceeds the declared bound");
    if (opt.max_l1 == 0) t = std::max<long long>(t, l1);
  }
  if (t < 1) t = 1;
  res.t = t;
  res.side = side_length(t);
  int radius = (res.side - 1) / 2;
  int levels = static_cast<int>(ceil_log2(u_bound));  // doubling depth K
  res.k = levels;

  // With usage bounds, any sub-solution z of a bounded solution x satisfies
  // z <= x <= col_upper componentwise, so row r of A z lies both in the
  // direct interval [neg, pos] and in b - [neg, pos]. Intersecting each
  // level box with these intervals is lossless for bounded solutions.
  std::vector<long long> row_lo(rows), row_hi(rows);
  if (bounded) {
    for (int r = 0; r < rows; ++r) {
      long long pos = 0, neg = 0;
      for (int c = 0; c < cols; ++c) {
        long long v = a[r][c] * opt.col_upper[c];
        if (v > 0) pos += v;
        if (v < 0) neg += v;
      }
      if (b[r] > pos || b[r] < neg) return res;  // target out of reach
      row_lo[r] = std::max(neg, b[r] - pos);
      row_hi[r] = std::min(pos, b[r] - neg);
    }
  }
  // Entry range per row over usable columns: a level-k point sums at most
  // ceil(u_bound / 2^k) columns, so its rows obey count-scaled entry bounds.
  // These bite at deep levels, where the discrepancy box is widest relative
  // to what so few columns can reach.
  std::vector<long long> ent_lo(rows, 0), ent_hi(rows, 0);
  for (int c = 0; c < cols; ++c) {
    if (!usable(c)) continue;
    for (int r = 0; r < rows; ++r) {
      ent_lo[r] = std::min(ent_lo[r], a[r][c]);
      ent_hi[r] = std::max(ent_hi[r], a[r][c]);
    }
  }
  auto level_box = [&](int k) {
    HypercubeBox box = box_at_level(b, k, radius);
    unsigned long long parts = k >= 62 ? 1 : (u_bound + (1ull << k) - 1) >> k;
    long long s = static_cast<long long>(parts);
    for (int r = 0; r < rows; ++r) {
      box.lo[r] = std::max(box.lo[r], s * ent_lo[r]);
      box.hi[r] = std::min(box.hi[r], s * ent_hi[r]);
      if (bounded) {
        box.lo[r] = std::max(box.lo[r], row_lo[r]);
        box.hi[r] = std::min(box.hi[r], row_hi[r]);
      }
    }
    return box;
  };

  std::vector<LevelTable> table(levels + 1);

  // seed level: origin and single columns, clipped to the box around b/2^K
  LevelTable& seed = table[levels];
  seed.box = level_box(levels);
  seed.box.volume();  // overflow guard
  {
    struct SeedEntry {
      unsigned long long packed;
      int col;
    };
    std::vector<SeedEntry> entries;
    std::vector<long long> zero(rows, 0);
    if (seed.box.contains(zero)) entries.push_back({seed.box.pack(zero), -1});
    for (int c = 0; c < cols; ++c) {
      if (!usable(c)) continue;
      auto col = detail::column_of(a, c);
      if (seed.box.contains(col)) entries.push_back({seed.box.pack(col), c});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SeedEntry& x, const SeedEntry& y) { return x.packed < y.packed; });
    for (const auto& e : entries) {
      if (!seed.points.empty() && seed.points.back() == e.packed) continue;
      seed.points.push_back(e.packed);
      seed.seed_col.push_back(e.col);
    }
  }
  res.levels.push_back({levels, seed.box.volume(), seed.points.size(), 's'});

  for (int k = levels - 1; k >= 0; --k) {
    detail::check_deadline(opt);
    LevelTable& prev = table[k + 1];
    LevelTable& next = table[k];
    next.box = level_box(k);
    next.box.volume();
    char strategy;
    if (prev.points.empty()) {
      strategy = 'p';  // nothing to combine; table stays empty
    } else if (opt.combine == CombineMode::pairwise) {
      detail::combine_pairwise(prev, next, opt);
      strategy = 'p';
    } else if (opt.combine == CombineMode::fft) {
      if (!detail::fft_viable(prev, opt))
        throw ResourceLimitError("fft combine volume exceeds the configured cap");
      detail::combine_fft(prev, next, opt);
      strategy = 'f';
    } else {
      std::size_t n = prev.points.size();
      unsigned long long pair_work = static_cast<unsigned long long>(n) * (n + 1) / 2;
      double fft_cost = 0;
      bool fft_ok = detail::fft_viable(prev, opt, &fft_cost);
      bool pair_ok = pair_work <= opt.max_pair_work;
      bool prefer_fft =
          fft_ok && (!pair_ok || fft_cost < static_cast<double>(pair_work) * rows);
      if (prefer_fft) {
        detail::combine_fft(prev, next, opt);
        strategy = 'f';
      } else if (pair_ok) {
        detail::combine_pairwise(prev, next, opt);
        strategy = 'p';
      } else {
        throw ResourceLimitError("both combine strategies exceed their caps");
      }
    }
    res.levels.push_back({k, next.box.volume(), next.points.size(), strategy});
    if (next.points.empty()) return res;  // infeasible: nothing attainable
  }

  if (!table[0].box.contains(b)) return res;
  long long hit = table[0].find(table[0].box.pack(b));
  if (hit < 0) return res;

  // Unwind the witness chain: each point splits into two points one level
  // up; stored parents are used when available, otherwise the level above is
  // scanned in packed order for the first valid split.
  IpSolution x(cols, 0);
  struct Frame {
    std::vector<long long> point;
    int level;
  };
  std::vector<Frame> stack;
  stack.push_back({b, 0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const LevelTable& tab = table[f.level];
    long long idx = tab.find(tab.box.pack(f.point));
    if (idx < 0) throw ContractViolation("solve_ip: witness point missing from its level");
    if (f.level == levels) {
      int col = tab.seed_col[idx];
      if (col >= 0) x[col]++;
      continue;
    }
    const LevelTable& up = table[f.level + 1];
    std::vector<long long> u, v(rows);
    if (!tab.parents.empty()) {
      u = up.box.unpack(tab.parents[idx].u);
      for (int r = 0; r < rows; ++r) v[r] = f.point[r] - u[r];
    } else {
      bool found = false;
      for (unsigned long long packed : up.points) {
        u = up.box.unpack(packed);
        for (int r = 0; r < rows; ++r) v[r] = f.point[r] - u[r];
        if (up.box.contains(v) && up.find(up.box.pack(v)) >= 0) {
          found = true;
          break;
        }
      }
      if (!found) throw ContractViolation("solve_ip: no split found for witness point");
    }
    stack.push_back({u, f.level + 1});
    stack.push_back({v, f.level + 1});
  }

  // audit the witness before handing it out
  for (int r = 0; r < rows; ++r) {
    long long s = 0;
    for (int c = 0; c < cols; ++c) s += a[r][c] * x[c];
    if (s != b[r]) throw ContractViolation("solve_ip: witness does not solve the system");
  }
  res.x = std::move(x);
  return res;
}

// Exhaustive oracle: smallest solution in lexicographic order by column
// index among all x >= 0 with ||x||_1 <= l1_cap, or infeasible.
inline std::optional<IpSolution> brute_force_ip(const std::vector<std::vector<long long>>& a,
                                                const std::vector<long long>& b,
                                                long long l1_cap) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<long long> residual = b;
  std::vector<long long> x(cols, 0);
  // rows that no column at index >= c can still change
  std::vector<std::vector<bool>> frozen(cols + 1, std::vector<bool>(rows, true));
  for (int c = cols - 1; c >= 0; --c)
    for (int r = 0; r < rows; ++r) frozen[c][r] = frozen[c + 1][r] && a[r][c] == 0;

  std::optional<IpSolution> best;
  auto rec = [&](auto&& self, int c, long long budget) -> bool {
    for (int r = 0; r < rows; ++r)
      if (frozen[c][r] && residual[r] != 0) return false;
    if (c == cols) {
      for (int r = 0; r < rows; ++r)
        if (residual[r] != 0) return false;
      best = x;
      return true;
    }
    for (long long k = 0; k <= budget; ++k) {
      if (k > 0) {
        x[c] = k;
        for (int r = 0; r < rows; ++r) residual[r] -= a[r][c];
      }
      if (self(self, c + 1, budget - k)) {
        for (int r = 0; r < rows; ++r) residual[r] += k * a[r][c];
        x[c] = 0;
        return true;
      }
    }
    for (int r = 0; r < rows; ++r) residual[r] += x[c] * a[r][c];
    x[c] = 0;
    return false;
  };
  rec(rec, 0, l1_cap);
  return best;
}

}  // namespace cmax
