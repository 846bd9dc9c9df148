#pragma once

#include <vector>

#include "cmax/errors.hpp"
#include "cmax/rational.hpp"

namespace cmax::detail {

// Dense two-phase simplex over exact rationals, Bland's rule throughout, so
// results are deterministic and cycling is impossible. Small systems only:
// everything the scheme optimizer asks fits in tens of rows and columns.

enum class LpStatus { optimal, infeasible, unbounded };

enum class LpRel { le, eq, ge };

struct LpRow {
  std::vector<Rat> a;
  LpRel rel = LpRel::le;
  Rat rhs;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rat objective;
  std::vector<Rat> x;
};

// Maximize c.x subject to the rows and x >= 0.
class Simplex {
 public:
  Simplex(std::vector<LpRow> rows, std::vector<Rat> c) : rows_(std::move(rows)), c_(std::move(c)) {
    n_ = static_cast<int>(c_.size());
    m_ = static_cast<int>(rows_.size());
    for (const auto& r : rows_)
      if (static_cast<int>(r.a.size()) != n_) throw ContractViolation("lp: ragged row");
  }

  LpResult solve() {
    build();
    if (!phase1()) return {LpStatus::infeasible, Rat(0), {}};
    return phase2();
  }

 private:
  std::vector<LpRow> rows_;
  std::vector<Rat> c_;
  int n_ = 0, m_ = 0, total_ = 0;
  std::vector<std::vector<Rat>> t_;  // m_ rows x (total_ + 1), rhs last
  std::vector<int> basis_;
  std::vector<bool> artificial_;

  void build() {
    // Normalize to b >= 0, then: slack for <=, surplus+artificial for >=,
    // artificial for =. Slacks/artificials give the obvious starting basis.
    for (auto& r : rows_) {
      if (r.rhs < 0) {
        for (auto& v : r.a) v = -v;
        r.rhs = -r.rhs;
        r.rel = r.rel == LpRel::le ? LpRel::ge : r.rel == LpRel::ge ? LpRel::le : LpRel::eq;
      }
    }
    int extra = 0;
    for (const auto& r : rows_) extra += r.rel == LpRel::ge ? 2 : 1;
    total_ = n_ + extra;
    t_.assign(m_, std::vector<Rat>(total_ + 1, Rat(0)));
    basis_.assign(m_, -1);
    artificial_.assign(total_, false);
    int next = n_;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) t_[i][j] = rows_[i].a[j];
      t_[i][total_] = rows_[i].rhs;
      switch (rows_[i].rel) {
        case LpRel::le:
          t_[i][next] = 1;
          basis_[i] = next++;
          break;
        case LpRel::ge:
          t_[i][next++] = -1;  // surplus
          t_[i][next] = 1;
          artificial_[next] = true;
          basis_[i] = next++;
          break;
        case LpRel::eq:
          t_[i][next] = 1;
          artificial_[next] = true;
          basis_[i] = next++;
          break;
      }
    }
  }

  void pivot(int row, int col) {
    Rat p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      Rat f = t_[i][col];
      if (f == 0) continue;
      for (int j = 0; j <= total_; ++j) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  // Maximize obj (length total_) with Bland's rule on the current basis.
  // Returns false when unbounded.
  bool run(std::vector<Rat> obj, const std::vector<bool>& allowed) {
    // reduced costs require the objective expressed off the basis
    std::vector<Rat> z(total_ + 1, Rat(0));
    for (int j = 0; j <= total_; ++j) z[j] = j < total_ ? obj[j] : Rat(0);
    for (int i = 0; i < m_; ++i) {
      Rat coef = z[basis_[i]];
      if (coef == 0) continue;
      for (int j = 0; j <= total_; ++j) z[j] -= coef * t_[i][j];
    }
    for (;;) {
      int col = -1;
      for (int j = 0; j < total_; ++j)
        if (allowed[j] && z[j] > 0) {
          col = j;
          break;  // Bland: smallest index with positive reduced cost
        }
      if (col < 0) return true;
      int row = -1;
      for (int i = 0; i < m_; ++i) {
        if (t_[i][col] <= 0) continue;
        if (row < 0) {
          row = i;
          continue;
        }
        Rat cur = t_[i][total_] / t_[i][col];
        Rat best = t_[row][total_] / t_[row][col];
        if (cur < best || (cur == best && basis_[i] < basis_[row])) row = i;
      }
      if (row < 0) return false;  // unbounded direction
      pivot(row, col);
      Rat coef = z[col];
      for (int j = 0; j <= total_; ++j) z[j] -= coef * t_[row][j];
    }
  }

  bool phase1() {
    bool any = false;
    for (int j = 0; j < total_; ++j) any = any || artificial_[j];
    if (!any) return true;
    std::vector<Rat> obj(total_, Rat(0));
    for (int j = 0; j < total_; ++j)
      if (artificial_[j]) obj[j] = Rat(-1);  // maximize -(sum of artificials)
    std::vector<bool> allowed(total_, true);
    if (!run(obj, allowed)) throw ContractViolation("lp: phase 1 unbounded");
    Rat infeas = 0;
    for (int i = 0; i < m_; ++i)
      if (artificial_[basis_[i]]) infeas += t_[i][total_];
    if (infeas != 0) return false;
    // pivot leftover zero-valued artificials out of the basis when possible
    for (int i = 0; i < m_; ++i) {
      if (!artificial_[basis_[i]]) continue;
      int col = -1;
      for (int j = 0; j < total_ && col < 0; ++j)
        if (!artificial_[j] && t_[i][j] != 0) col = j;
      if (col >= 0) pivot(i, col);
      // otherwise the row is redundant; the artificial stays basic at zero
    }
    return true;
  }

  LpResult phase2() {
    std::vector<Rat> obj(total_, Rat(0));
    for (int j = 0; j < n_; ++j) obj[j] = c_[j];
    std::vector<bool> allowed(total_, true);
    for (int j = 0; j < total_; ++j)
      if (artificial_[j]) allowed[j] = false;
    if (!run(obj, allowed)) return {LpStatus::unbounded, Rat(0), {}};
    LpResult res;
    res.status = LpStatus::optimal;
    res.x.assign(n_, Rat(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = t_[i][total_];
    res.objective = 0;
    for (int j = 0; j < n_; ++j) res.objective += c_[j] * res.x[j];
    return res;
  }
};

inline LpResult solve_lp(std::vector<LpRow> rows, std::vector<Rat> maximize) {
  return Simplex(std::move(rows), std::move(maximize)).solve();
}

}  // namespace cmax::detail
