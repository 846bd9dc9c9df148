#pragma once

#include <algorithm>
#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "cmax/instance.hpp"

namespace cmax {

// A finite menu of sizes the large jobs get rounded to, together with the
// additive structure that lets solver columns stay short.
//
//   sizes    strictly decreasing, all within the large-job range for (eps, T)
//   triples  (i1, i2, t) with i1 <= i2 and sizes[i1] + sizes[i2] == sizes[t],
//            exact, no rounding
//   L        support bound: any machine config with more than L rounded jobs
//            contains some triple's pair and can therefore be compressed
struct RoundingScheme {
  Rat eps, T;
  std::vector<Rat> sizes;
  std::vector<std::array<int, 3>> triples;
  int L = 0;

  int d() const { return static_cast<int>(sizes.size()); }
};

namespace detail {

inline std::vector<std::vector<bool>> reducible_pairs(int d,
                                                      const std::vector<std::array<int, 3>>& triples) {
  std::vector<std::vector<bool>> ok(d, std::vector<bool>(d, false));
  for (const auto& t : triples) ok[t[0]][t[1]] = ok[t[1]][t[0]] = true;
  return ok;
}

// True if every multiset of exactly `count` sizes with total <= T contains a
// pair covered by some triple. Checking one cardinality is enough: a bigger
// over-full config contains a sub-multiset of this cardinality, which is
// itself within capacity and hands its pair upward.
inline bool all_reducible_at(const std::vector<Rat>& sizes,
                             const std::vector<std::vector<bool>>& pair_ok, int count,
                             const Rat& T) {
  int d = static_cast<int>(sizes.size());
  std::vector<int> chosen;
  // Depth-first over multisets in index order; abandoning a branch as soon as
  // the running total exceeds T keeps this tiny in practice.
  auto rec = [&](auto&& self, int from, int left, Rat sum) -> bool {
    if (left == 0) {
      for (std::size_t a = 0; a < chosen.size(); ++a)
        for (std::size_t b = a + 1; b < chosen.size(); ++b)
          if (pair_ok[chosen[a]][chosen[b]]) return true;
      return false;  // found an irreducible configuration
    }
    for (int i = from; i < d; ++i) {
      Rat next = sum + sizes[i];
      if (next > T) continue;  // sizes decrease, but later ones may still fit
      chosen.push_back(i);
      bool good = self(self, i, left - 1, next);
      chosen.pop_back();
      if (!good) return false;
    }
    return true;
  };
  return rec(rec, 0, count, Rat(0));
}

}  // namespace detail

// Largest number of rounded jobs any single machine can hold.
inline int max_config_support(const RoundingScheme& s) {
  if (s.sizes.empty()) return 0;
  Rat smallest = s.sizes.back();
  Int cap = rat_floor(s.T / smallest);
  return static_cast<int>(to_ll(cap));
}

// Smallest L such that every config using more than L rounded jobs contains a
// reducible pair. At the capacity bound no larger config exists, so the
// search always terminates.
inline int minimal_support_bound(const RoundingScheme& s) {
  if (s.sizes.empty()) return 0;
  auto pair_ok = detail::reducible_pairs(s.d(), s.triples);
  int cap = max_config_support(s);
  for (int L = 1; L < cap; ++L)
    if (detail::all_reducible_at(s.sizes, pair_ok, L + 1, s.T)) return L;
  return cap;
}

// The geometric boundary grid for precision eps and guess T: within each
// octave [2^i*eps*T, 2^(i+1)*eps*T) an arithmetic ladder with step
// eps^2*2^i*T, truncated to values below (1-2eps)*T. For eps >= 1/3 the
// large-job range is empty and so is the scheme.
inline RoundingScheme standard_scheme(const Rat& eps, const Rat& T) {
  if (eps <= 0 || eps >= Rat(1, 2)) throw ContractViolation("scheme needs 0 < eps < 1/2");
  if (T <= 0) throw ContractViolation("scheme needs T > 0");
  RoundingScheme s;
  s.eps = eps;
  s.T = T;
  Rat top = (1 - 2 * eps) * T;
  if (eps * T >= top) return s;  // no sizes, L = 0

  long long steps = to_ll(rat_ceil(1 / eps));  // ladder positions per octave
  std::vector<std::pair<int, int>> label;      // (octave, step) per ascending boundary
  std::vector<Rat> asc;
  Rat pow2 = 1;
  for (int i = 0;; ++i, pow2 *= 2) {
    Rat base = pow2 * eps * T;
    if (base >= top) break;
    Rat step = eps * eps * pow2 * T;
    for (long long k = 0; k < steps; ++k) {
      Rat b = base + k * step;
      if (b >= top) break;
      asc.push_back(b);
      label.emplace_back(i, static_cast<int>(k));
    }
  }
  int d = static_cast<int>(asc.size());
  s.sizes.assign(asc.rbegin(), asc.rend());
  auto desc_index = [d](int asc_index) { return d - 1 - asc_index; };

  // Same-parity steps in one octave sum to a boundary one octave up; record
  // the triple whenever that target survived truncation.
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      if (label[a].first != label[b].first) continue;
      if ((label[a].second & 1) != (label[b].second & 1)) continue;
      std::pair<int, int> target(label[a].first + 1, (label[a].second + label[b].second) / 2);
      auto it = std::find(label.begin(), label.end(), target);
      if (it == label.end()) continue;
      int t = desc_index(static_cast<int>(it - label.begin()));
      int i1 = desc_index(b), i2 = desc_index(a);  // b has the larger value of the pair
      s.triples.push_back({std::min(i1, i2), std::max(i1, i2), t});
    }
  }
  std::sort(s.triples.begin(), s.triples.end());
  // Two jobs per octave can dodge the parity pairing, so 2 * octaves is the
  // nominal bound; truncation can strip the triples that argument leans on,
  // in which case the minimal sound bound takes over (it is the capacity
  // bound when no triples survive at all).
  int octaves = label.empty() ? 0 : label.back().first + 1;
  s.L = std::max(2 * octaves, minimal_support_bound(s));
  return s;
}

// Boundaries in increasing order, convenient for tests and display.
inline std::vector<Rat> boundaries_ascending(const RoundingScheme& s) {
  return std::vector<Rat>(s.sizes.rbegin(), s.sizes.rend());
}

// Full structural check: ordering, range, gap ratio, exact triple sums and
// the support bound L. This is the authoritative test a scheme must pass
// before the pipeline will use it; the closure part works on multisets, so
// repeated sizes are covered.
inline bool verify_scheme(const RoundingScheme& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (s.eps <= 0 || s.eps >= Rat(1, 2)) return fail("eps out of range");
  if (s.T <= 0) return fail("T must be positive");
  if (s.sizes.empty()) return s.L == 0 ? true : fail("empty scheme must have L = 0");
  for (int i = 0; i < s.d(); ++i) {
    if (s.sizes[i] <= 0) return fail("sizes must be positive");
    if (i + 1 < s.d() && s.sizes[i] <= s.sizes[i + 1]) return fail("sizes must strictly decrease");
  }
  if (s.sizes.front() > (1 - 2 * s.eps) * s.T) return fail("largest size above the large range");
  if ((1 + s.eps) * s.sizes.front() < (1 - 2 * s.eps) * s.T)
    return fail("largest size cannot cover the top of the range");
  if (s.sizes.back() > s.eps * (1 + s.eps) * s.T)
    return fail("smallest size cannot cover the bottom of the range");
  for (int i = 0; i + 1 < s.d(); ++i)
    if ((1 + s.eps) * s.sizes[i + 1] < s.sizes[i]) return fail("gap between consecutive sizes too wide");
  for (const auto& t : s.triples) {
    if (t[0] < 0 || t[1] < t[0] || t[1] >= s.d() || t[2] < 0 || t[2] >= s.d())
      return fail("triple index out of range");
    if (s.sizes[t[0]] + s.sizes[t[1]] != s.sizes[t[2]]) return fail("triple sum not exact");
  }
  if (s.L < 0) return fail("L must be nonnegative");
  int cap = max_config_support(s);
  if (s.L < cap) {
    auto pair_ok = detail::reducible_pairs(s.d(), s.triples);
    if (!detail::all_reducible_at(s.sizes, pair_ok, s.L + 1, s.T))
      return fail("irreducible configuration with more than L jobs exists");
  }
  return true;
}

// Same scheme expressed for a different makespan guess.
inline RoundingScheme scale_scheme(const RoundingScheme& s, const Rat& T_new) {
  if (T_new <= 0) throw ContractViolation("scale_scheme needs T > 0");
  RoundingScheme out = s;
  out.T = T_new;
  Rat f = T_new / s.T;
  for (Rat& x : out.sizes) x *= f;
  return out;
}

// The large jobs of one instance expressed over a scheme's size menu.
struct RoundedInstance {
  RoundingScheme scheme;
  std::vector<long long> counts;          // jobs per size index
  std::vector<std::pair<int, int>> jobs;  // (job id, size index), ids ascending
  int m_effective = 0;                    // machines left after the huge jobs took theirs
};

// Rounds each job down to the largest size not above it. Jobs below the
// smallest size (possible for optimized menus whose floor sits above eps*T)
// round up to it instead; the scheme's range invariant keeps that within a
// factor 1+eps, so schedules built on rounded sizes still transfer back.
inline RoundedInstance round_jobs(const Instance& inst, const std::vector<int>& job_ids,
                                  const RoundingScheme& scheme, int m_effective) {
  RoundedInstance r;
  r.scheme = scheme;
  r.counts.assign(scheme.d(), 0);
  r.m_effective = m_effective;
  Rat lo = scheme.eps * scheme.T;
  Rat hi = (1 - 2 * scheme.eps) * scheme.T;
  for (int j : job_ids) {
    const Rat& p = inst.p[j];
    if (p <= lo || p >= hi)
      throw ContractViolation("round_jobs: job " + std::to_string(j) + " outside the large range");
    // sizes descend, so the first entry <= p is the largest size below p
    int idx = -1;
    for (int i = 0; i < scheme.d(); ++i)
      if (scheme.sizes[i] <= p) {
        idx = i;
        break;
      }
    if (idx < 0) {
      idx = scheme.d() - 1;
      if (idx < 0 || scheme.sizes[idx] > (1 + scheme.eps) * p)
        throw ContractViolation("round_jobs: no size within factor 1+eps of job " +
                                std::to_string(j));
    }
    r.counts[idx]++;
    r.jobs.emplace_back(j, idx);
  }
  return r;
}

// Scheme file format: line-oriented plain text, exact fractions throughout.
inline std::string write_scheme(const RoundingScheme& s) {
  std::ostringstream out;
  out << "scheme\n";
  out << "eps " << rat_str(s.eps) << "\n";
  out << "T " << rat_str(s.T) << "\n";
  out << "L " << s.L << "\n";
  out << "d " << s.d() << "\n";
  for (const Rat& x : s.sizes) out << "size " << rat_str(x) << "\n";
  for (const auto& t : s.triples) out << "triple " << t[0] << " " << t[1] << " " << t[2] << "\n";
  return out.str();
}

inline RoundingScheme read_scheme(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "scheme") throw ParseError("not a scheme file");
  RoundingScheme s;
  bool have_eps = false, have_T = false, have_L = false;
  long long d = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "eps") {
      std::string v;
      ls >> v;
      s.eps = parse_rat(v);
      have_eps = true;
    } else if (key == "T") {
      std::string v;
      ls >> v;
      s.T = parse_rat(v);
      have_T = true;
    } else if (key == "L") {
      if (!(ls >> s.L)) throw ParseError("bad L line");
      have_L = true;
    } else if (key == "d") {
      if (!(ls >> d)) throw ParseError("bad d line");
    } else if (key == "size") {
      std::string v;
      ls >> v;
      s.sizes.push_back(parse_rat(v));
    } else if (key == "triple") {
      std::array<int, 3> t{};
      if (!(ls >> t[0] >> t[1] >> t[2])) throw ParseError("bad triple line");
      s.triples.push_back(t);
    } else {
      throw ParseError("unknown scheme line: '" + line + "'");
    }
  }
  if (!have_eps || !have_T || !have_L) throw ParseError("scheme file missing eps/T/L");
  if (d >= 0 && d != s.d()) throw ParseError("scheme file size count mismatch");
  std::string why;
  if (!verify_scheme(s, &why)) throw ParseError("scheme fails verification: " + why);
  return s;
}

}  // namespace cmax
