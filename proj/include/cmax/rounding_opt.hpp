#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "cmax/detail/simplex.hpp"
#include "cmax/rounding.hpp"

namespace cmax {

// Searches for the best size menu directly: given the menu length d and the
// compression bound L, find the smallest precision eps for which strictly
// decreasing sizes x_0 > ... > x_{d-1} exist with
//   (1+eps) x_0 >= 1-2 eps,   x_0 <= 1-2 eps,   x_{d-1} <= eps (1+eps),
//   (1+eps) x_{i+1} >= x_i,
// and the closure property: every multiset of L+1 sizes with total <= 1
// contains a pair whose exact sum is again a size. Feasibility at fixed eps
// is decided by branch and bound over the discrete part (which multisets are
// kept out of capacity, which pair sums are forced to land on a size), with
// each branch checked by an exact rational LP that maximizes a shared
// strictness margin delta; a branch is viable iff max delta > 0.

struct SchemeSearchStats {
  long long lp_solves = 0;
  long long nodes = 0;
  int probes = 0;
};

struct SchemeSearchOptions {
  // Closure over multisets (repetition allowed) is what the pipeline needs
  // and what the scheme verifier checks; subset-only closure is the weaker
  // variant matching the emitted MILP's y-variable family.
  bool multiset_closure = true;
  // Require the consecutive-gap bound (1+eps) x_1 >= x_0 on the top pair as
  // well. Turning this off reproduces formulations that constrain only the
  // pairs below the top size.
  bool top_gap = true;
  // Closed capacity: a multiset summing to exactly 1 is a configuration and
  // must reduce (what the scheduling pipeline needs). Open capacity: only
  // sums strictly below 1 count, and "out of capacity" is the weak sum >= 1
  // -- the boundary behaviour of big-M indicator formulations.
  bool closed_capacity = true;
  // Restrict reduction targets to sizes appearing in the multiset itself
  // (a stricter closure variant); the pipeline allows any size as target.
  bool target_in_set = false;
  // Cap the smallest size at eps instead of the slightly looser eps (1+eps)
  // that rounding-up-to-the-next-boundary permits.
  bool tight_bottom = false;
  // Forbid doubling reductions x_i + x_i = x_t (pairs must use two distinct
  // sizes); the pipeline allows doubling whenever a size appears twice.
  bool distinct_pair = false;
  // Demand closure up to the inflated machine capacity 1+eps (rounded sizes
  // pack into (1+eps)T) instead of the plain capacity 1. Strictly stronger;
  // witnesses still satisfy the plain-capacity closure the verifier checks.
  bool wide_capacity = false;
  long long max_nodes = 20'000'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SchemeOptResult {
  Rat eps;               // smallest feasible precision found (within tol)
  RoundingScheme scheme; // witness at that precision, passes verify_scheme
  SchemeSearchStats stats;
};

namespace detail {

// One discrete decision set: multisets forced out of capacity (stored as
// indices into the deterministic multiset enumeration, which is identical
// across probes for fixed d and L) and pair sums forced onto a size.
// Doubles as the hint carried across eps probes.
struct SchemeDecisions {
  std::vector<int> far;                    // sum over multiset >= 1 + delta
  std::vector<std::array<int, 3>> eq;      // {a, b, t}: x_a + x_b = x_t
};

class SchemeFeasibility {
 public:
  SchemeFeasibility(int d, int L, const Rat& eps, const SchemeSearchOptions& opt,
                    SchemeSearchStats& stats)
      : d_(d), l_(L), eps_(eps), opt_(opt), stats_(stats) {
    cap_ = opt_.wide_capacity ? Rat(1 + eps_) : Rat(1);
    enumerate_multisets();
    pow_.assign(d_ + 1, Rat(1));
    for (int k = 1; k <= d_; ++k) pow_[k] = pow_[k - 1] * (1 + eps_);
    // Static value intervals implied by the range, ordering and gap rows.
    // Rows are only ever added during the search, so these stay valid at
    // every node and power the branch-viability filters.
    lb_.assign(d_, Rat(0));
    ub_.assign(d_, 1 - 2 * eps_);
    ub_[d_ - 1] = opt_.tight_bottom ? eps_ : Rat(eps_ * (1 + eps_));
    for (int i = d_ - 2; i > 0; --i)
      ub_[i] = std::min(ub_[i], Rat((1 + eps_) * ub_[i + 1]));  // chain to the bottom cap
    if (opt_.top_gap) {
      ub_[0] = std::min(ub_[0], Rat((1 + eps_) * ub_[1]));
      lb_[0] = (1 - 2 * eps_) / (1 + eps_);
      for (int i = 1; i < d_; ++i) lb_[i] = lb_[i - 1] / (1 + eps_);
    } else {
      lb_[0] = (1 - 2 * eps_) / (1 + eps_);  // chain below 0 is broken
    }
    far_viable_.assign(multisets_.size(), false);
    for (std::size_t mi = 0; mi < multisets_.size(); ++mi) {
      Rat reach = 0;
      for (int i : multisets_[mi]) reach += ub_[i];
      far_viable_[mi] = opt_.closed_capacity ? reach > cap_ : reach >= cap_;
    }
  }

  // Feasibility with a witness; tries `hint` decisions first.
  std::optional<std::vector<Rat>> solve(SchemeDecisions& hint) {
    if (hint_usable(hint))
      if (auto x = closure_ok(hint)) return x;  // hint may carry over verbatim
    SchemeDecisions fresh;
    if (auto x = search(fresh)) {
      hint = fresh;
      return x;
    }
    return std::nullopt;
  }

 private:
  int d_, l_;
  Rat eps_;
  Rat cap_;
  const SchemeSearchOptions& opt_;
  SchemeSearchStats& stats_;
  std::vector<std::vector<int>> multisets_;  // candidate configurations, size L+1
  std::vector<Rat> pow_;                     // (1+eps)^k
  std::vector<Rat> lb_, ub_;                 // static per-size value intervals
  std::vector<bool> far_viable_;             // can the multiset sum exceed 1 at all?
  std::unordered_set<std::string> dead_;     // decision sets proven fruitless

  void enumerate_multisets() {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int from) -> void {
      if (static_cast<int>(cur.size()) == l_ + 1) {
        multisets_.push_back(cur);
        return;
      }
      for (int i = from; i < d_; ++i) {
        cur.push_back(i);
        self(self, opt_.multiset_closure ? i : i + 1);
        cur.pop_back();
      }
    };
    rec(rec, 0);
  }

  // An equality x_a + x_b = x_t is only possible when the consecutive-gap
  // bound x_i <= (1+eps) x_{i+1} leaves room: the chain gives
  // x_t <= (1+eps)^(a-t) x_a and x_a <= (1+eps)^(b-a) x_b, so the identity
  // needs (1+eps)^(b-t) >= 1 + (1+eps)^(b-a). Without the top gap row the
  // chain through index 0 breaks, so that filter applies only above it; the
  // static value intervals then take over: the pair-sum range must overlap
  // the target's range.
  bool eq_possible(int a, int b, int t) const {
    if (t >= a) return false;
    if (opt_.top_gap || t > 0)
      if (pow_[b - t] < 1 + pow_[b - a]) return false;
    return lb_[a] + lb_[b] <= ub_[t] && ub_[a] + ub_[b] >= lb_[t];
  }

  bool hint_usable(const SchemeDecisions& hint) const {
    for (const auto& e : hint.eq)
      if (!eq_possible(e[0], e[1], e[2])) return false;
    return true;
  }

  std::string key(const SchemeDecisions& dec) const {
    std::vector<int> flat(dec.far);
    std::sort(flat.begin(), flat.end());
    std::vector<std::array<int, 3>> eq(dec.eq);
    std::sort(eq.begin(), eq.end());
    flat.push_back(-1);
    for (const auto& e : eq) flat.insert(flat.end(), e.begin(), e.end());
    return std::string(reinterpret_cast<const char*>(flat.data()),
                       flat.size() * sizeof(int));
  }

  // Maximize delta subject to the base scheme constraints and the decisions;
  // variables are x_0..x_{d-1}, then delta.
  detail::LpResult lp(const SchemeDecisions& dec) {
    ++stats_.lp_solves;
    if (opt_.deadline && std::chrono::steady_clock::now() > *opt_.deadline)
      throw ResourceLimitError("scheme search exceeded its time limit");
    int n = d_ + 1;
    std::vector<detail::LpRow> rows;
    auto row = [&](detail::LpRel rel, const Rat& rhs) -> std::vector<Rat>& {
      rows.push_back({std::vector<Rat>(n, Rat(0)), rel, rhs});
      return rows.back().a;
    };
    {  // (1+eps) x_0 >= 1 - 2 eps
      auto& a = row(detail::LpRel::ge, 1 - 2 * eps_);
      a[0] = 1 + eps_;
    }
    {  // x_0 <= 1 - 2 eps
      auto& a = row(detail::LpRel::le, 1 - 2 * eps_);
      a[0] = 1;
    }
    {  // x_{d-1} <= eps (1 + eps), or <= eps under the tight-bottom variant
      auto& a = row(detail::LpRel::le, ub_[d_ - 1]);
      a[d_ - 1] = 1;
    }
    for (int i = opt_.top_gap ? 0 : 1; i + 1 < d_; ++i) {  // (1+eps) x_{i+1} >= x_i
      auto& a = row(detail::LpRel::ge, Rat(0));
      a[i + 1] = 1 + eps_;
      a[i] = -1;
    }
    for (int i = 0; i + 1 < d_; ++i) {  // strictly decreasing: x_i - x_{i+1} >= delta
      auto& a = row(detail::LpRel::ge, Rat(0));
      a[i] = 1;
      a[i + 1] = -1;
      a[d_] = -1;
    }
    {  // strictly positive smallest size: x_{d-1} >= delta
      auto& a = row(detail::LpRel::ge, Rat(0));
      a[d_ - 1] = 1;
      a[d_] = -1;
    }
    {  // keep the objective bounded
      auto& a = row(detail::LpRel::le, Rat(1));
      a[d_] = 1;
    }
    for (int mi : dec.far) {  // out of capacity: sum_M x >= cap + delta (weak form: >= cap)
      auto& a = row(detail::LpRel::ge, cap_);
      for (int i : multisets_[mi]) a[i] += 1;
      if (opt_.closed_capacity) a[d_] = -1;
    }
    for (const auto& e : dec.eq) {  // x_a + x_b = x_t
      auto& a = row(detail::LpRel::eq, Rat(0));
      a[e[0]] += 1;
      a[e[1]] += 1;
      a[e[2]] -= 1;
    }
    std::vector<Rat> obj(n, Rat(0));
    obj[d_] = 1;
    return detail::solve_lp(std::move(rows), std::move(obj));
  }

  // Every move that could repair the multiset: each viable pair/target
  // equality, then (when its sum can exceed capacity at all) pushing the
  // multiset out of capacity. Deterministic order.
  struct Move {
    bool far;
    std::array<int, 3> eq;
  };
  std::vector<Move> moves(int mi) const {
    const auto& m = multisets_[mi];
    std::vector<Move> out;
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (p > 0 && m[p] == m[p - 1]) continue;  // same pair as with p-1
      for (std::size_t q = p + 1; q < m.size(); ++q) {
        if (q > p + 1 && m[q] == m[q - 1]) continue;  // same pair again
        if (opt_.distinct_pair && m[q] == m[p]) continue;
        for (int t = m[p] - 1; t >= 0; --t) {  // nearest landing size first
          if (opt_.target_in_set && std::find(m.begin(), m.end(), t) == m.end()) continue;
          if (eq_possible(m[p], m[q], t)) out.push_back({false, {m[p], m[q], t}});
        }
      }
    }
    if (far_viable_[mi]) out.push_back({true, {}});
    return out;
  }

  // LP-feasible and closure-clean under the given decisions?
  std::optional<std::vector<Rat>> closure_ok(const SchemeDecisions& dec) {
    auto r = lp(dec);
    if (r.status != detail::LpStatus::optimal || r.objective <= 0) return std::nullopt;
    std::vector<Rat> x(r.x.begin(), r.x.begin() + d_);
    for (std::size_t mi = 0; mi < multisets_.size(); ++mi)
      if (violated(x, static_cast<int>(mi))) return std::nullopt;
    return x;
  }

  // A fitting multiset with no pair summing exactly onto a size.
  bool violated(const std::vector<Rat>& x, int mi) const {
    const auto& m = multisets_[mi];
    Rat total = 0;
    for (int i : m) total += x[i];
    if (opt_.closed_capacity ? total > cap_ : total >= cap_) return false;  // not a configuration
    for (std::size_t p = 0; p < m.size(); ++p)
      for (std::size_t q = p + 1; q < m.size(); ++q) {
        if (opt_.distinct_pair && m[q] == m[p]) continue;
        Rat sum = x[m[p]] + x[m[q]];
        for (int t = 0; t < m[p]; ++t) {
          if (opt_.target_in_set && std::find(m.begin(), m.end(), t) == m.end()) continue;
          if (x[t] == sum) return false;
        }
      }
    return true;
  }

  std::optional<std::vector<Rat>> search(SchemeDecisions& dec) {
    if (++stats_.nodes > opt_.max_nodes)
      throw ResourceLimitError("scheme search exceeded its node budget");
    std::string k = key(dec);
    if (dead_.count(k)) return std::nullopt;
    auto r = lp(dec);
    if (r.status != detail::LpStatus::optimal || r.objective <= 0) {
      dead_.insert(std::move(k));
      return std::nullopt;
    }
    std::vector<Rat> x(r.x.begin(), r.x.begin() + d_);
    // Fail-first: branch on the violated multiset with the fewest repairs.
    int pick = -1;
    std::vector<Move> pick_moves;
    for (std::size_t mi = 0; mi < multisets_.size(); ++mi) {
      if (!violated(x, static_cast<int>(mi))) continue;
      std::vector<Move> mv = moves(static_cast<int>(mi));
      if (mv.empty()) {  // nothing can repair it: dead end
        dead_.insert(std::move(k));
        return std::nullopt;
      }
      if (pick < 0 || mv.size() < pick_moves.size()) {
        pick = static_cast<int>(mi);
        pick_moves = std::move(mv);
        if (pick_moves.size() == 1) break;  // forced move, stop scanning
      }
    }
    if (pick < 0) return x;  // closure holds
    for (const Move& mv : pick_moves) {
      if (mv.far)
        dec.far.push_back(pick);
      else
        dec.eq.push_back(mv.eq);
      auto got = search(dec);
      if (mv.far)
        dec.far.pop_back();
      else
        dec.eq.pop_back();
      if (got) return got;
    }
    dead_.insert(key(dec));
    return std::nullopt;
  }
};

}  // namespace detail

// Witness sizes -> scheme: sizes as found (strictly decreasing by
// construction), triples harvested as every exact pair identity.
inline RoundingScheme scheme_from_sizes(std::vector<Rat> sizes, int L, const Rat& eps) {
  RoundingScheme s;
  s.eps = eps;
  s.T = 1;
  s.sizes = std::move(sizes);
  s.L = L;
  int d = s.d();
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Rat sum = s.sizes[a] + s.sizes[b];
      for (int t = 0; t < d; ++t)
        if (s.sizes[t] == sum) s.triples.push_back({a, b, t});
    }
  return s;
}

// Smallest eps in [eps_lo, eps_hi] (within tol) admitting a d-size scheme
// with compression bound L, plus the witness scheme. nullopt when even
// eps_hi is infeasible.
inline std::optional<SchemeOptResult> optimize_scheme(int d, int L, Rat eps_lo, Rat eps_hi,
                                                      const Rat& tol,
                                                      SchemeSearchOptions opt = {}) {
  if (d < 1 || L < 1) throw ContractViolation("optimize_scheme: d and L must be positive");
  if (d > 16) throw ContractViolation("optimize_scheme: d > 16 unsupported");
  if (!(eps_lo < eps_hi) || tol <= 0)
    throw ContractViolation("optimize_scheme: need eps_lo < eps_hi and tol > 0");

  SchemeSearchStats stats;
  detail::SchemeDecisions hint;
  std::vector<Rat> witness;
  Rat at;

  auto probe = [&](const Rat& eps) -> bool {
    ++stats.probes;
    detail::SchemeFeasibility f(d, L, eps, opt, stats);
    if (auto x = f.solve(hint)) {
      witness = std::move(*x);
      at = eps;
      return true;
    }
    return false;
  };

  if (!probe(eps_hi)) return std::nullopt;
  Rat lo = eps_lo, hi = eps_hi;
  if (probe(eps_lo)) {
    hi = eps_lo;
  } else {
    while (hi - lo > tol) {
      Rat mid = (lo + hi) / 2;
      if (probe(mid))
        hi = mid;
      else
        lo = mid;
    }
  }

  SchemeOptResult res;
  res.eps = at;
  res.scheme = scheme_from_sizes(std::move(witness), L, at);
  res.stats = stats;
  std::string why;
  if (!verify_scheme(res.scheme, &why))
    throw ContractViolation("optimize_scheme: witness fails verification: " + why);
  return res;
}

// Feasibility probe at one fixed precision: the verified witness scheme if a
// d-size menu with compression bound L exists at exactly this eps, nullopt
// otherwise. The bisection endpoint logic in optimize_scheme builds on the
// same search; this entry point is for checking a quoted precision directly.
inline std::optional<SchemeOptResult> probe_scheme(int d, int L, const Rat& eps,
                                                   SchemeSearchOptions opt = {}) {
  if (d < 1 || L < 1) throw ContractViolation("probe_scheme: d and L must be positive");
  if (d > 16) throw ContractViolation("probe_scheme: d > 16 unsupported");
  SchemeSearchStats stats;
  stats.probes = 1;
  detail::SchemeDecisions hint;
  detail::SchemeFeasibility f(d, L, eps, opt, stats);
  auto x = f.solve(hint);
  if (!x) return std::nullopt;
  SchemeOptResult res;
  res.eps = eps;
  res.scheme = scheme_from_sizes(std::move(*x), L, eps);
  res.stats = stats;
  std::string why;
  if (!verify_scheme(res.scheme, &why))
    throw ContractViolation("probe_scheme: witness fails verification: " + why);
  return res;
}

namespace detail {

inline std::string lp_num(const Rat& v) { return rat_fixed(v, 15); }

}  // namespace detail

// The scheme-feasibility decision problem as a solver-ready LP-format MILP:
// continuous sizes x_i, one binary y per subset of L+1 indices (y=1 iff the
// subset fits in capacity), one binary z per pair-sum identity, big-M rows
// tying them together, and the closure implication sum(z over the subset's
// pairs) >= y. Minimizing sum y + sum z keeps the indicators honest on the
// side big-M cannot pin down exactly.
inline std::string emit_milp(int d, int L, const Rat& eps) {
  if (d < 1 || L < 0) throw ContractViolation("emit_milp: d >= 1 and L >= 0 required");
  std::ostringstream out;
  const Rat eta(1, 1'000'000);  // strictness margin for "does not fit"
  const Rat big(L + 2);         // sum of any L+1 sizes is below this

  std::vector<std::vector<int>> subsets;
  {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int from) -> void {
      if (static_cast<int>(cur.size()) == L + 1) {
        subsets.push_back(cur);
        return;
      }
      for (int i = from; i < d; ++i) {
        cur.push_back(i);
        self(self, i + 1);
        cur.pop_back();
      }
    };
    rec(rec, 0);
  }
  auto yname = [&](const std::vector<int>& s) {
    std::string n = "y";
    for (int i : s) n += "_" + std::to_string(i);
    return n;
  };
  auto zname = [](int a, int b, int t) {
    return "z_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(t);
  };

  out << "\\ rounding scheme feasibility: d=" << d << " L=" << L
      << " eps=" << detail::lp_num(eps) << "\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (const auto& s : subsets) {
    out << (first ? " " : " + ") << yname(s);
    first = false;
  }
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int t = 0; t < d; ++t) {
        out << (first ? " " : " + ") << zname(a, b, t);
        first = false;
      }
  if (first) out << " 0 x0";
  out << "\nSubject To\n";
  // range and gap constraints on the sizes
  out << " top_cover: " << detail::lp_num(1 + eps) << " x0 >= " << detail::lp_num(1 - 2 * eps)
      << "\n";
  out << " top_range: x0 <= " << detail::lp_num(1 - 2 * eps) << "\n";
  out << " bottom_range: x" << d - 1 << " <= " << detail::lp_num(eps * (1 + eps)) << "\n";
  for (int i = 0; i + 1 < d; ++i)
    out << " gap" << i << ": " << detail::lp_num(1 + eps) << " x" << i + 1 << " - x" << i
        << " >= 0\n";
  for (int i = 0; i + 1 < d; ++i)
    out << " ord" << i << ": x" << i << " - x" << i + 1 << " >= 0\n";
  // y definition, both directions of the iff
  for (const auto& s : subsets) {
    out << " fit_" << yname(s) << ":";
    for (int i : s) out << " + x" << i;
    out << " - " << detail::lp_num(big) << " " << yname(s) << " <= 1\n";
    out << " unfit_" << yname(s) << ":";
    for (int i : s) out << " + x" << i;
    out << " + " << detail::lp_num(big) << " " << yname(s) << " >= "
        << detail::lp_num(1 + eta) << "\n";
  }
  // z = 1 forces the exact identity
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int t = 0; t < d; ++t) {
        out << " sum_hi_" << zname(a, b, t) << ": x" << a << " + x" << b << " - x" << t << " + "
            << detail::lp_num(big) << " " << zname(a, b, t) << " <= " << detail::lp_num(big)
            << "\n";
        out << " sum_lo_" << zname(a, b, t) << ": x" << a << " + x" << b << " - x" << t << " - "
            << detail::lp_num(big) << " " << zname(a, b, t) << " >= -" << detail::lp_num(big)
            << "\n";
      }
  // closure: a fitting subset must activate one of its pair identities
  for (const auto& s : subsets) {
    out << " reduce_" << yname(s) << ":";
    for (std::size_t p = 0; p < s.size(); ++p)
      for (std::size_t q = p; q < s.size(); ++q) {
        if (p == q) continue;  // distinct positions; equal indices cannot occur in a subset
        for (int t = 0; t < d; ++t) out << " + " << zname(s[p], s[q], t);
      }
    out << " - " << yname(s) << " >= 0\n";
  }
  out << "Bounds\n";
  for (int i = 0; i < d; ++i) out << " 0 <= x" << i << " <= 1\n";
  out << "Binary\n";
  for (const auto& s : subsets) out << " " << yname(s) << "\n";
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int t = 0; t < d; ++t) out << " " << zname(a, b, t) << "\n";
  out << "End\n";
  return out.str();
}

}  // namespace cmax
