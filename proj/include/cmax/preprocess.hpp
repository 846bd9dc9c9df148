#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "cmax/instance.hpp"

namespace cmax {

// Split of the jobs relative to a makespan guess T: small (p <= eps*T),
// huge (p >= (1-2eps)*T) and large (strictly in between). Both thresholds
// are inclusive on the side they name, and a job that would qualify as both
// (possible once eps >= 1/3) counts as small.
struct JobPartition {
  Rat T, eps;
  std::vector<int> small, large, huge;
};

inline JobPartition classify(const Instance& inst, const Rat& T, const Rat& eps) {
  if (eps <= 0 || eps >= Rat(1, 2)) throw ContractViolation("classify needs 0 < eps < 1/2");
  if (T <= 0) throw ContractViolation("classify needs T > 0");
  JobPartition part;
  part.T = T;
  part.eps = eps;
  Rat small_max = eps * T;
  Rat huge_min = (1 - 2 * eps) * T;
  for (int j = 0; j < inst.n(); ++j) {
    if (inst.p[j] <= small_max)
      part.small.push_back(j);
    else if (inst.p[j] >= huge_min)
      part.huge.push_back(j);
    else
      part.large.push_back(j);
  }
  return part;
}

// Huge jobs each get their own machine, optionally sharing it with one large
// job. pairs[] lists (huge job, partner or -1) with huge jobs longest first.
struct HugePairing {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> leftover_large;  // large jobs not consumed as partners, ascending
};

// Greedy matching: every huge job takes the largest still-free large job that
// keeps the pair within T, longest huge jobs choosing first. A fitting
// partner has p <= T - p_huge <= 2*eps*T, so partners are automatically on
// the light end of the large range.
inline HugePairing pair_huge(const Instance& inst, const JobPartition& part) {
  std::vector<int> huge_desc = part.huge;
  std::sort(huge_desc.begin(), huge_desc.end(), [&](int a, int b) {
    if (inst.p[a] != inst.p[b]) return inst.p[a] > inst.p[b];
    return a < b;
  });
  std::vector<int> avail = part.large;  // kept ascending by id
  HugePairing hp;
  for (int h : huge_desc) {
    int pick = -1;
    for (int cand : avail) {
      if (inst.p[h] + inst.p[cand] > part.T) continue;
      if (pick == -1 || inst.p[cand] > inst.p[pick]) pick = cand;
    }
    hp.pairs.emplace_back(h, pick);
    if (pick != -1) avail.erase(std::find(avail.begin(), avail.end(), pick));
  }
  hp.leftover_large = std::move(avail);
  return hp;
}

// Drops the small jobs onto the least-loaded machine one by one, ids
// ascending. If this raises the makespan at all, machine loads end up within
// eps*T of each other, which is what the approximation argument needs.
inline Schedule assign_small_greedy(const Instance& inst, Schedule s,
                                    const std::vector<int>& small_ids) {
  using Slot = std::pair<Rat, int>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<Slot>> heap;
  for (int k = 0; k < s.m; ++k) heap.emplace(s.loads[k], k);
  for (int j : small_ids) {
    auto [load, mc] = heap.top();
    heap.pop();
    assign_job(s, inst, j, mc);
    heap.emplace(s.loads[mc], mc);
  }
  return s;
}

}  // namespace cmax
