#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cmax/baselines.hpp"
#include "cmax/configip.hpp"
#include "cmax/errors.hpp"
#include "cmax/instance.hpp"
#include "cmax/jrsolver.hpp"
#include "cmax/preprocess.hpp"
#include "cmax/rounding.hpp"

namespace cmax {

// Knobs of the end-to-end solver: target precision eps, binary-search
// termination ratio eps_prime, an optional pre-optimized rounding scheme
// (template at T=1, rescaled per guess), and resource caps.
struct LrtpConfig {
  Rat eps;
  Rat eps_prime = Rat(1, 10000);
  std::optional<RoundingScheme> scheme;  // none: standard scheme for eps
  CombineMode combine = CombineMode::automatic;
  unsigned long long max_box_volume = 1ull << 22;
  unsigned long long max_pair_work = 1ull << 27;
  unsigned long long max_table_points = 1ull << 23;
  std::optional<double> time_limit_seconds;

  void validate() const {
    if (!(eps > 0 && eps < Rat(1, 2)))
      throw ContractViolation("LrtpConfig: eps must be in (0, 1/2)");
    if (!(eps_prime > 0 && eps_prime < eps))
      throw ContractViolation("LrtpConfig: eps_prime must be in (0, eps)");
  }
};

namespace detail {

inline JrOptions jr_options(const LrtpConfig& cfg,
                            std::optional<std::chrono::steady_clock::time_point> deadline) {
  JrOptions opt;
  opt.combine = cfg.combine;
  opt.max_box_volume = cfg.max_box_volume;
  opt.max_pair_work = cfg.max_pair_work;
  opt.max_table_points = cfg.max_table_points;
  opt.deadline = deadline;
  return opt;
}

inline RoundingScheme scheme_for(const LrtpConfig& cfg, const Rat& T) {
  if (cfg.scheme) return scale_scheme(*cfg.scheme, T);
  return standard_scheme(cfg.eps, T);
}

}  // namespace detail

// One relaxed decision probe: either a schedule with makespan <= (1+eps)*T,
// or "infeasible", which is a sound certificate of T < OPT whenever
// eps <= 1/4 (two huge jobs then never share a machine in any schedule of
// makespan <= T unless that load already reaches T).
//
// Pipeline: classify -> pair huge jobs -> round the large jobs -> compressed
// covering IP -> doubling solver -> undo reductions -> materialize machines
// -> greedy small jobs. Resource caps surface as ResourceLimitError, which
// is *not* a feasibility verdict.
inline std::optional<Schedule> feasible_schedule(
    const Instance& inst, const Rat& T, const LrtpConfig& cfg,
    std::optional<std::chrono::steady_clock::time_point> deadline = {}) {
  cfg.validate();
  JobPartition part = classify(inst, T, cfg.eps);
  for (int j : part.huge)
    if (inst.p[j] > T) return std::nullopt;  // a single job overflows the guess

  HugePairing pairing = pair_huge(inst, part);
  long long huge_machines = static_cast<long long>(pairing.pairs.size());
  if (huge_machines > inst.m) return std::nullopt;  // pigeonhole
  int m_eff = inst.m - static_cast<int>(huge_machines);

  ConfigSolution sol;  // empty when there are no large jobs
  RoundedInstance rounded;
  if (!pairing.leftover_large.empty()) {
    if (m_eff == 0) return std::nullopt;
    rounded = round_jobs(inst, pairing.leftover_large, detail::scheme_for(cfg, T), m_eff);
    ReducedIP ip = build_reduced_ip(rounded);
    SolverSystem sys = build_solver_system(ip);
    // Some solution derived from an actual schedule uses at most m_eff
    // configs, one reduction per absorbed job, and only the machine slack.
    unsigned long long u_bound = 2ull * m_eff +
                                 static_cast<unsigned long long>(rounded.jobs.size()) + 1;
    JrOptions jr_opt = detail::jr_options(cfg, deadline);
    jr_opt.col_upper = sys.col_upper;
    JrResult jr = solve_ip(sys.a, sys.rhs, u_bound, std::move(jr_opt));
    if (!jr.x) return std::nullopt;
    sol = expand_solution(ip.scheme, split_solver_solution(ip, sys, *jr.x));
  } else {
    rounded.scheme = detail::scheme_for(cfg, T);
    rounded.m_effective = m_eff;
  }

  Schedule s = schedule_from_configs(inst, rounded, pairing, sol);
  s = assign_small_greedy(inst, std::move(s), part.small);
  if (!validate_schedule(s, inst))
    throw ContractViolation("feasible_schedule: produced an invalid schedule");
  if (s.makespan() > (1 + cfg.eps) * T) return std::nullopt;
  return s;
}

struct ProbeInfo {
  Rat T;
  bool feasible = false;
};

struct LrtpResult {
  Schedule schedule;
  Rat l, r;  // final bracket
  std::vector<ProbeInfo> probes;
  bool fallback = false;    // baseline schedule due to resource limits
  std::string warning;
};

// Dual-approximation binary search on the makespan guess. Bracket starts at
// [LB, 2*LB] (the optimum always lies there); each infeasible probe raises
// the left end, each feasible probe lowers the right end and remembers the
// schedule. Terminates when the bracket ratio reaches 1+eps_prime, with
// overall guarantee (1+eps)(1+eps_prime)*OPT for eps <= 1/4.
inline LrtpResult lrtp_solve(const Instance& inst, const LrtpConfig& cfg) {
  cfg.validate();
  if (inst.n() == 0) {
    LrtpResult res{empty_schedule(inst), 0, 0, {}, false, ""};
    return res;
  }
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (cfg.time_limit_seconds)
    deadline = std::chrono::steady_clock::now() +
               std::chrono::microseconds(
                   static_cast<long long>(*cfg.time_limit_seconds * 1e6));

  Rat lb = lower_bound(inst);
  LrtpResult res;
  res.l = lb;
  res.r = 2 * lb;
  std::optional<Schedule> best;
  while ((1 + cfg.eps_prime) * res.l < res.r) {
    Rat T = (res.l + res.r) / 2;
    std::optional<Schedule> s = feasible_schedule(inst, T, cfg, deadline);
    res.probes.push_back({T, s.has_value()});
    if (s) {
      best = std::move(*s);
      res.r = T;
    } else {
      res.l = T;
    }
  }
  if (!best) {
    // No midpoint ever succeeded; probe the right end (OPT <= 2*LB makes it
    // feasible unless a resource cap interferes, in which case the caller
    // still gets a valid schedule, from the best baseline).
    try {
      best = feasible_schedule(inst, res.r, cfg, deadline);
    } catch (const ResourceLimitError& e) {
      res.warning = std::string("resource limit during final probe: ") + e.what();
    }
    if (!best) {
      Schedule a = lpt(inst), b = multifit(inst), c = djms(inst);
      Schedule* pick = &a;
      if (b.makespan() < pick->makespan()) pick = &b;
      if (c.makespan() < pick->makespan()) pick = &c;
      res.fallback = true;
      if (res.warning.empty())
        res.warning = "right-end probe infeasible; returning best baseline schedule";
      res.schedule = *pick;
      return res;
    }
  }
  res.schedule = std::move(*best);
  return res;
}

// Exact optimum by branch-and-bound over job -> machine assignments, longest
// job first, with symmetry breaking on equal machine loads. Practical to
// n ~ 14. Integral instances run on plain 64-bit integers; anything else
// falls back to exact rationals.
namespace detail {

template <class Num>
Num exact_opt_impl(const std::vector<Num>& jobs, int m, Num upper) {
  std::vector<Num> loads(m, Num(0));
  Num best = upper;
  int n = static_cast<int>(jobs.size());
  auto rec = [&](auto&& self, int idx, Num cur_max) -> void {
    if (cur_max >= best) return;
    if (idx == n) {
      best = cur_max;
      return;
    }
    for (int k = 0; k < m; ++k) {
      bool duplicate = false;
      for (int j = 0; j < k; ++j)
        if (loads[j] == loads[k]) {
          duplicate = true;
          break;
        }
      if (duplicate) continue;
      Num nl = loads[k] + jobs[idx];
      if (nl >= best) continue;
      loads[k] = nl;
      self(self, idx + 1, std::max(cur_max, nl));
      loads[k] = nl - jobs[idx];
    }
  };
  rec(rec, 0, Num(0));
  return best;
}

}  // namespace detail

inline Rat exact_opt(const Instance& inst, int size_cap = 14) {
  if (inst.n() > size_cap)
    throw ResourceLimitError("exact_opt: instance exceeds the search size cap");
  if (inst.n() == 0) return 0;
  if (inst.m >= inst.n() || inst.m == 1) return lower_bound(inst);
  std::vector<Rat> jobs = inst.p;
  std::sort(jobs.begin(), jobs.end(), std::greater<>());
  Rat upper = std::min(lpt(inst).makespan(), multifit(inst).makespan());

  // 64-bit fast path when every time is integral and sums stay in range
  bool integral = true;
  for (const Rat& p : jobs) integral = integral && is_integer(p);
  if (integral && total_load(inst) < Rat(std::numeric_limits<long long>::max() / 4)) {
    std::vector<long long> ijobs;
    for (const Rat& p : jobs) ijobs.push_back(to_ll(rat_num(p)));
    long long ubound = to_ll(rat_num(upper));
    return Rat(detail::exact_opt_impl<long long>(ijobs, inst.m, ubound + 1));
  }
  return detail::exact_opt_impl<Rat>(jobs, inst.m, Rat(upper + 1));
}

// One line of the benchmark table: a class of generated instances, how the
// end-to-end solver compares against the best of the three baselines, and
// its average wall time. Failed runs (resource caps) are counted here and
// reported on stderr but excluded from the comparison sums.
struct BenchRow {
  Family family;
  int m = 0, n = 0;
  long long u = 0;  // upper end of the processing-time range
  int better = 0, equal = 0;
  Rat avg_quot;      // sum(solver) / min(sum per baseline), full precision
  double avg_time = 0.0;  // seconds, successful runs
  int failures = 0;
};

inline int bench_workers() {
  if (const char* env = std::getenv("CMAX_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

inline std::vector<BenchRow> bench_run(const std::vector<ClassSpec>& classes,
                                       const LrtpConfig& cfg, const std::string& out_csv) {
  cfg.validate();
  std::vector<BenchRow> rows;
  for (const ClassSpec& spec : classes) {
    std::vector<Instance> instances = generate_class(spec);
    struct PerInstance {
      Rat lpt_ms, mf_ms, djms_ms, lrtp_ms;
      double seconds = 0.0;
      bool failed = false;
      std::string error;
    };
    std::vector<PerInstance> results(instances.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= instances.size()) return;
        const Instance& inst = instances[i];
        PerInstance& r = results[i];
        r.lpt_ms = lpt(inst).makespan();
        r.mf_ms = multifit(inst).makespan();
        r.djms_ms = djms(inst).makespan();
        auto t0 = std::chrono::steady_clock::now();
        try {
          LrtpResult lr = lrtp_solve(inst, cfg);
          if (lr.fallback) {
            r.failed = true;
            r.error = lr.warning;
          } else {
            r.lrtp_ms = lr.schedule.makespan();
          }
        } catch (const ResourceLimitError& e) {
          r.failed = true;
          r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    };
    int workers = std::min<int>(bench_workers(), static_cast<int>(instances.size()));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    BenchRow row;
    row.family = spec.family;
    row.m = spec.m;
    row.n = spec.n;
    row.u = spec.hi;
    Rat sum_lrtp = 0, sum_lpt = 0, sum_mf = 0, sum_djms = 0;
    double time_sum = 0.0;
    int ok = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const PerInstance& r = results[i];
      if (r.failed) {
        row.failures++;
        std::cerr << "bench: " << family_name(spec.family) << " m=" << spec.m
                  << " n=" << spec.n << " instance " << i << " failed: " << r.error << "\n";
        continue;
      }
      ++ok;
      Rat best_base = std::min({r.lpt_ms, r.mf_ms, r.djms_ms});
      if (r.lrtp_ms < best_base) row.better++;
      else if (r.lrtp_ms == best_base) row.equal++;
      sum_lrtp += r.lrtp_ms;
      sum_lpt += r.lpt_ms;
      sum_mf += r.mf_ms;
      sum_djms += r.djms_ms;
      time_sum += r.seconds;
    }
    if (ok > 0) {
      row.avg_quot = sum_lrtp / std::min({sum_lpt, sum_mf, sum_djms});
      row.avg_time = time_sum / ok;
    }
    rows.push_back(row);
  }

  std::ofstream csv(out_csv);
  if (!csv) throw ParseError("bench_run: cannot open output file " + out_csv);
  csv << "family,m,n,U,better,equal,avg_quot,avg_time\n";
  for (const BenchRow& r : rows) {
    char timebuf[32];
    std::snprintf(timebuf, sizeof timebuf, "%.4f", r.avg_time);
    csv << family_name(r.family) << "," << r.m << "," << r.n << "," << r.u << ","
        << r.better << "," << r.equal << "," << rat_fixed(r.avg_quot, 2) << ","
        << timebuf << "\n";
  }
  return rows;
}

}  // namespace cmax
