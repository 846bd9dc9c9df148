#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <vector>

#include "cmax/instance.hpp"

namespace cmax {
namespace detail {

// Job ids sorted by processing time, longest first, ties by id. All three
// classical heuristics consume jobs in this order.
inline std::vector<int> jobs_longest_first(const Instance& inst, const std::vector<int>& jobs) {
  std::vector<int> order = jobs;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.p[a] != inst.p[b]) return inst.p[a] > inst.p[b];
    return a < b;
  });
  return order;
}

// Assignment of a job subset to `mcount` anonymous machines; the caller maps
// machine slots back to real machine ids.
struct SubSchedule {
  std::vector<int> machine_of;  // parallel to the job list handed in
  std::vector<Rat> loads;
};

inline SubSchedule lpt_sub(const Instance& inst, const std::vector<int>& jobs_desc, int mcount) {
  SubSchedule s;
  s.machine_of.assign(jobs_desc.size(), -1);
  s.loads.assign(mcount, Rat(0));
  using Slot = std::pair<Rat, int>;  // (load, machine slot); smallest first
  std::priority_queue<Slot, std::vector<Slot>, std::greater<Slot>> heap;
  for (int k = 0; k < mcount; ++k) heap.emplace(Rat(0), k);
  for (std::size_t idx = 0; idx < jobs_desc.size(); ++idx) {
    auto [load, slot] = heap.top();
    heap.pop();
    s.machine_of[idx] = slot;
    load += inst.p[jobs_desc[idx]];
    s.loads[slot] = load;
    heap.emplace(load, slot);
  }
  return s;
}

// First fit decreasing at capacity T. Returns nothing if some job fits on no
// machine; never splits or reorders.
inline std::optional<SubSchedule> ffd_sub(const Instance& inst, const std::vector<int>& jobs_desc,
                                          int mcount, const Rat& T) {
  SubSchedule s;
  s.machine_of.assign(jobs_desc.size(), -1);
  s.loads.assign(mcount, Rat(0));
  for (std::size_t idx = 0; idx < jobs_desc.size(); ++idx) {
    const Rat& p = inst.p[jobs_desc[idx]];
    int placed = -1;
    for (int k = 0; k < mcount; ++k) {
      if (s.loads[k] + p <= T) {
        placed = k;
        break;
      }
    }
    if (placed < 0) return std::nullopt;
    s.machine_of[idx] = placed;
    s.loads[placed] += p;
  }
  return s;
}

// Lower bound used by MULTIFIT: average load, the largest time, and (when
// there are more jobs than machines) the m-th plus (m+1)-th largest, since
// some machine must take two of the top m+1 jobs.
inline Rat multifit_lower(const Instance& inst, const std::vector<int>& jobs_desc, int mcount) {
  Rat sum = 0;
  for (int j : jobs_desc) sum += inst.p[j];
  Rat l = sum / mcount;
  if (!jobs_desc.empty()) l = std::max(l, inst.p[jobs_desc.front()]);
  if (static_cast<int>(jobs_desc.size()) > mcount)
    l = std::max(l, Rat(inst.p[jobs_desc[mcount - 1]] + inst.p[jobs_desc[mcount]]));
  return l;
}

// Binary search for the smallest capacity in [lower, upper] that FFD packs.
// Integral inputs get an exact integer search; otherwise `rounds` halvings.
// Falls back to the LPT schedule when no probed capacity worked.
inline SubSchedule multifit_sub(const Instance& inst, const std::vector<int>& jobs_desc,
                                int mcount, const Rat& upper, int rounds) {
  Rat lower = multifit_lower(inst, jobs_desc, mcount);
  std::optional<SubSchedule> best;
  bool integral = true;
  for (int j : jobs_desc)
    if (!is_integer(inst.p[j])) {
      integral = false;
      break;
    }
  if (integral && is_integer(upper)) {
    Int lo = rat_ceil(lower), hi = rat_num(upper);
    while (lo <= hi) {
      Int mid = (lo + hi) / 2;
      auto f = ffd_sub(inst, jobs_desc, mcount, Rat(mid));
      if (f) {
        best = std::move(f);
        hi = mid - 1;
      } else {
        lo = mid + 1;
      }
    }
  } else {
    Rat lo = lower, hi = upper;
    for (int r = 0; r < rounds; ++r) {
      Rat mid = (lo + hi) / 2;
      auto f = ffd_sub(inst, jobs_desc, mcount, mid);
      if (f) {
        best = std::move(f);
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  if (best) return *std::move(best);
  return lpt_sub(inst, jobs_desc, mcount);
}

inline Schedule to_schedule(const Instance& inst, const std::vector<int>& jobs_desc,
                            const SubSchedule& sub) {
  Schedule s = empty_schedule(inst);
  for (std::size_t idx = 0; idx < jobs_desc.size(); ++idx)
    assign_job(s, inst, jobs_desc[idx], sub.machine_of[idx]);
  return s;
}

}  // namespace detail

// Longest processing time first onto the currently least-loaded machine.
// Makespan is at most 4/3 of optimal.
inline Schedule lpt(const Instance& inst) {
  std::vector<int> jobs(inst.p.size());
  for (int j = 0; j < inst.n(); ++j) jobs[j] = j;
  auto order = detail::jobs_longest_first(inst, jobs);
  return detail::to_schedule(inst, order, detail::lpt_sub(inst, order, inst.m));
}

// First fit decreasing at capacity T over the whole instance, or nothing if
// it does not fit. Infeasibility is an answer here, not an error.
inline std::optional<Schedule> ffd_pack(const Instance& inst, const Rat& T) {
  std::vector<int> jobs(inst.p.size());
  for (int j = 0; j < inst.n(); ++j) jobs[j] = j;
  auto order = detail::jobs_longest_first(inst, jobs);
  auto sub = detail::ffd_sub(inst, order, inst.m, T);
  if (!sub) return std::nullopt;
  return detail::to_schedule(inst, order, *sub);
}

struct MultifitParams {
  int rounds = 20;  // halvings for non-integral inputs; integral search is exact
};

// MULTIFIT: binary search over FFD capacities between its lower bound and the
// LPT makespan. Makespan is at most 13/11 of optimal.
inline Schedule multifit(const Instance& inst, const MultifitParams& params = {}) {
  std::vector<int> jobs(inst.p.size());
  for (int j = 0; j < inst.n(); ++j) jobs[j] = j;
  auto order = detail::jobs_longest_first(inst, jobs);
  auto lpt_s = detail::lpt_sub(inst, order, inst.m);
  Rat upper = 0;
  for (const Rat& l : lpt_s.loads) upper = std::max(upper, l);
  auto sub = detail::multifit_sub(inst, order, inst.m, upper, params.rounds);
  return detail::to_schedule(inst, order, sub);
}

// Iterated LPT + MULTIFIT: after each round, machines whose load already
// meets the round's lower bound are frozen together with their jobs, and the
// remainder is re-solved. If no machine reaches the bound the fullest one is
// frozen instead so the loop always shrinks.
inline Schedule djms(const Instance& inst, const MultifitParams& params = {}) {
  std::vector<int> active_jobs(inst.p.size());
  for (int j = 0; j < inst.n(); ++j) active_jobs[j] = j;
  std::vector<int> active_machines(inst.m);
  for (int k = 0; k < inst.m; ++k) active_machines[k] = k;

  Schedule final_s = empty_schedule(inst);
  while (!active_machines.empty() && !active_jobs.empty()) {
    int mcount = static_cast<int>(active_machines.size());
    auto order = detail::jobs_longest_first(inst, active_jobs);
    auto lpt_s = detail::lpt_sub(inst, order, mcount);
    Rat t_lpt = 0;
    for (const Rat& l : lpt_s.loads) t_lpt = std::max(t_lpt, l);
    auto round_s = detail::multifit_sub(inst, order, mcount, t_lpt, params.rounds);
    Rat bound = detail::multifit_lower(inst, order, mcount);

    // Close every machine tied with the least-loaded one that reached the
    // bound; if none did, close the fullest ones to guarantee progress.
    Rat close_load;
    bool found = false;
    for (const Rat& l : round_s.loads)
      if (l >= bound && (!found || l < close_load)) {
        close_load = l;
        found = true;
      }
    if (!found)
      for (const Rat& l : round_s.loads)
        if (!found || l > close_load) {
          close_load = l;
          found = true;
        }

    std::vector<bool> closed(mcount, false);
    for (int k = 0; k < mcount; ++k) closed[k] = (round_s.loads[k] == close_load);
    std::vector<int> next_jobs, next_machines;
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
      int slot = round_s.machine_of[idx];
      if (closed[slot])
        assign_job(final_s, inst, order[idx], active_machines[slot]);
      else
        next_jobs.push_back(order[idx]);
    }
    for (int k = 0; k < mcount; ++k)
      if (!closed[k]) next_machines.push_back(active_machines[k]);
    std::sort(next_jobs.begin(), next_jobs.end());
    active_jobs = std::move(next_jobs);
    active_machines = std::move(next_machines);
  }
  return final_s;
}

}  // namespace cmax
