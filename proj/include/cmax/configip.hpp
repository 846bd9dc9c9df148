#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cmax/preprocess.hpp"
#include "cmax/rounding.hpp"

namespace cmax {

// How often each rounded size appears on one machine. Indexed like
// RoundingScheme::sizes; a config is valid when its weighted total fits in T.
using Configuration = std::vector<long long>;

inline Rat config_load(const RoundingScheme& scheme, const Configuration& c) {
  Rat sum = 0;
  for (int i = 0; i < scheme.d(); ++i)
    if (c[i]) sum += c[i] * scheme.sizes[i];
  return sum;
}

inline long long config_support(const Configuration& c) {
  long long n = 0;
  for (long long v : c) n += v;
  return n;
}

// All valid configurations with support at most `max_support`, lexicographic
// by count vector. Pass a large cap to get the full menu.
inline std::vector<Configuration> enumerate_configs(const RoundingScheme& scheme,
                                                    long long max_support) {
  std::vector<Configuration> out;
  Configuration cur(scheme.d(), 0);
  auto rec = [&](auto&& self, int idx, long long used, Rat load) -> void {
    if (idx == scheme.d()) {
      if (used > 0) out.push_back(cur);
      return;
    }
    for (long long k = 0;; ++k) {
      if (used + k > max_support) break;
      Rat l = load + k * scheme.sizes[idx];
      if (l > scheme.T) break;
      cur[idx] = k;
      self(self, idx + 1, used + k, l);
    }
    cur[idx] = 0;
  };
  rec(rec, 0, 0, Rat(0));
  return out;
}

// A reduction column trades the pair of a triple for its merged size: +1 at
// each pair index (+2 when they coincide), -1 at the target. Load-neutral by
// the triple identity, and it shortens a config's support by one.
struct ReductionColumn {
  int i1 = 0, i2 = 0, target = 0;
};

enum class ColumnKind { config, reduction, slack_size, slack_machine };

// The compressed covering system in equality form.
//
// Rows: one per size, then one machine row. Columns: all configs with
// support <= L, one reduction column per triple, a -1 surplus slack per size
// row, and a +1 slack on the machine row. rhs = rounded counts, then the
// machine budget.
struct ReducedIP {
  RoundingScheme scheme;
  std::vector<Configuration> configs;
  std::vector<ReductionColumn> reductions;
  std::vector<long long> rhs;  // d size rows, then the machine row

  int rows() const { return scheme.d() + 1; }
  int cols() const { return static_cast<int>(configs.size() + reductions.size()) + scheme.d() + 1; }

  ColumnKind kind(int col) const {
    int nc = static_cast<int>(configs.size()), nr = static_cast<int>(reductions.size());
    if (col < nc) return ColumnKind::config;
    if (col < nc + nr) return ColumnKind::reduction;
    if (col < nc + nr + scheme.d()) return ColumnKind::slack_size;
    return ColumnKind::slack_machine;
  }

  long long entry(int row, int col) const {
    int d = scheme.d();
    int nc = static_cast<int>(configs.size()), nr = static_cast<int>(reductions.size());
    if (col < nc) {
      if (row < d) return configs[col][row];
      return 1;  // each used config occupies one machine
    }
    col -= nc;
    if (col < nr) {
      if (row >= d) return 0;
      const ReductionColumn& rc = reductions[col];
      long long v = 0;
      if (row == rc.i1) ++v;
      if (row == rc.i2) ++v;
      if (row == rc.target) --v;
      return v;
    }
    col -= nr;
    if (col < d) return (row == col) ? -1 : 0;  // surplus slack per size row
    return (row == d) ? 1 : 0;                  // idle-machine slack
  }

  std::vector<std::vector<long long>> matrix() const {
    std::vector<std::vector<long long>> a(rows(), std::vector<long long>(cols(), 0));
    for (int r = 0; r < rows(); ++r)
      for (int c = 0; c < cols(); ++c) a[r][c] = entry(r, c);
    return a;
  }
};

inline ReducedIP build_reduced_ip(const RoundedInstance& rounded) {
  ReducedIP ip;
  ip.scheme = rounded.scheme;
  ip.configs = enumerate_configs(ip.scheme, ip.scheme.L);
  for (const auto& t : ip.scheme.triples) ip.reductions.push_back({t[0], t[1], t[2]});
  ip.rhs = rounded.counts;
  ip.rhs.push_back(rounded.m_effective);
  return ip;
}

// Debug view of the whole system.
inline std::string dump_reduced_ip(const ReducedIP& ip) {
  std::ostringstream out;
  out << "reduced-ip rows=" << ip.rows() << " cols=" << ip.cols() << " L=" << ip.scheme.L << "\n";
  out << "sizes";
  for (const Rat& x : ip.scheme.sizes) out << " " << rat_str(x);
  out << "\nrhs";
  for (long long v : ip.rhs) out << " " << v;
  out << "\n";
  for (int c = 0; c < ip.cols(); ++c) {
    switch (ip.kind(c)) {
      case ColumnKind::config: out << "config"; break;
      case ColumnKind::reduction: out << "reduction"; break;
      case ColumnKind::slack_size: out << "slack_size"; break;
      case ColumnKind::slack_machine: out << "slack_machine"; break;
    }
    for (int r = 0; r < ip.rows(); ++r) out << " " << ip.entry(r, c);
    out << "\n";
  }
  return out.str();
}

// The subsystem actually handed to the feasibility solver. Three sound
// prunings shrink it without losing any solution that corresponds to a real
// schedule:
//   * size-surplus slack columns are dropped — a schedule covers each count
//     exactly once, so exact equality is complete (surplus also makes the
//     attainable-point tables dense, which is what kills performance);
//   * size rows that no job and no reduction column touches are dropped,
//     together with every config using them;
//   * a config entry at size s can never exceed counts[s] plus the number
//     of merges that can target s. Merging consumes two units from rows
//     after s (smaller sizes) per unit produced and units there only ever
//     decrease, so that number is at most floor(sum of later counts / 2),
//     and zero when no triple targets s.
struct SolverSystem {
  std::vector<std::vector<long long>> a;
  std::vector<long long> rhs;
  std::vector<int> col_config;       // per column: index into ip.configs, or -1
  std::vector<int> col_reduction;    // per column: index into ip.reductions, or -1
  std::vector<int> kept_rows;        // size-row indices kept, machine row implicit last
  std::vector<long long> col_upper;  // usage bound per column, valid for any
                                     // solution that mirrors a real schedule
};

inline SolverSystem build_solver_system(const ReducedIP& ip) {
  int d = ip.scheme.d();

  // Units available per size row: the jobs counted there plus everything
  // merges can ever produce into it. Merges flow from smaller sizes (higher
  // indices) to larger (lower), so the estimate converges; it only needs to
  // be an upper bound. A reduction with no units to feed on can never be
  // used and is dropped, which is what keeps empty rows out of the system.
  std::vector<long long> avail(d, 0);
  for (int s = 0; s < d; ++s) avail[s] = ip.rhs[s];
  std::vector<long long> red_cap(ip.reductions.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<long long> prod(d, 0);
    for (std::size_t i = 0; i < ip.reductions.size(); ++i) {
      const ReductionColumn& rc = ip.reductions[i];
      red_cap[i] = rc.i1 == rc.i2 ? avail[rc.i1] / 2 : std::min(avail[rc.i1], avail[rc.i2]);
      prod[rc.target] += red_cap[i];
    }
    for (int s = 0; s < d; ++s) {
      long long next = ip.rhs[s] + prod[s];
      if (next != avail[s]) {
        avail[s] = next;
        changed = true;
      }
    }
  }

  std::vector<bool> touched(d, false);
  for (std::size_t i = 0; i < ip.reductions.size(); ++i)
    if (red_cap[i] > 0) {
      const ReductionColumn& rc = ip.reductions[i];
      touched[rc.i1] = touched[rc.i2] = touched[rc.target] = true;
    }

  SolverSystem sys;
  for (int s = 0; s < d; ++s)
    if (ip.rhs[s] > 0 || touched[s]) sys.kept_rows.push_back(s);

  std::vector<long long> cap(d, 0);
  {
    std::vector<bool> is_target(d, false);
    for (const auto& rc : ip.reductions) is_target[rc.target] = true;
    long long later = 0;
    for (int s = d - 1; s >= 0; --s) {
      cap[s] = std::min(ip.rhs[s] + (is_target[s] ? later / 2 : 0), avail[s]);
      later += ip.rhs[s];
    }
  }

  long long m_eff = ip.rhs[d];
  int rows = static_cast<int>(sys.kept_rows.size()) + 1;
  sys.a.assign(rows, {});
  auto push_column = [&](auto&& entry_at, int cfg_idx, int red_idx, long long upper) {
    for (int r = 0; r < rows - 1; ++r) sys.a[r].push_back(entry_at(sys.kept_rows[r]));
    sys.a[rows - 1].push_back(entry_at(-1));
    sys.col_config.push_back(cfg_idx);
    sys.col_reduction.push_back(red_idx);
    sys.col_upper.push_back(upper);
  };

  for (std::size_t i = 0; i < ip.configs.size(); ++i) {
    const Configuration& c = ip.configs[i];
    bool ok = true;
    for (int s = 0; s < d && ok; ++s) {
      if (c[s] > cap[s]) ok = false;
      if (c[s] > 0 && ip.rhs[s] == 0 && !touched[s]) ok = false;
    }
    if (!ok) continue;
    push_column([&](int s) { return s < 0 ? 1ll : c[s]; }, static_cast<int>(i), -1, m_eff);
  }
  for (std::size_t i = 0; i < ip.reductions.size(); ++i) {
    if (red_cap[i] == 0) continue;
    const ReductionColumn& rc = ip.reductions[i];
    push_column(
        [&](int s) {
          if (s < 0) return 0ll;
          long long v = 0;
          if (s == rc.i1) ++v;
          if (s == rc.i2) ++v;
          if (s == rc.target) --v;
          return v;
        },
        -1, static_cast<int>(i), red_cap[i]);
  }
  push_column([&](int s) { return s < 0 ? 1ll : 0ll; }, -1, -1, m_eff);  // idle machines

  for (int s : sys.kept_rows) sys.rhs.push_back(ip.rhs[s]);
  sys.rhs.push_back(ip.rhs[d]);
  return sys;
}

// A multiset of configurations: how the large jobs sit on machines.
using ConfigSolution = std::vector<std::pair<Configuration, long long>>;

// Configurations plus reduction multiplicities, the shape the compressed IP
// solves for.
struct ReducedSolution {
  ConfigSolution config_use;
  std::vector<long long> reduction_use;  // parallel to scheme.triples
};

namespace detail {

inline void add_config(ConfigSolution& sol, const Configuration& c, long long mult) {
  if (mult == 0) return;
  for (auto& [cfg, m] : sol)
    if (cfg == c) {
      m += mult;
      if (m == 0) sol.erase(std::find_if(sol.begin(), sol.end(),
                                         [&](const auto& e) { return e.first == c; }));
      return;
    }
  sol.emplace_back(c, mult);
}

}  // namespace detail

inline std::vector<long long> coverage(const RoundingScheme& scheme, const ConfigSolution& sol) {
  std::vector<long long> cov(scheme.d(), 0);
  for (const auto& [c, mult] : sol)
    for (int i = 0; i < scheme.d(); ++i) cov[i] += mult * c[i];
  return cov;
}

inline long long machines_used(const ConfigSolution& sol) {
  long long used = 0;
  for (const auto& [c, mult] : sol) used += mult;
  return used;
}

// Rewrites a configuration multiset so every used config has support <= L,
// emitting one reduction per rewrite. Each step swaps a triple's pair for its
// merged size: load stays equal, support drops by one, and the per-size
// balance (config coverage minus reduction demand) is untouched.
inline ReducedSolution reduce_solution(const RoundingScheme& scheme, ConfigSolution sol) {
  ReducedSolution red;
  red.reduction_use.assign(scheme.triples.size(), 0);
  for (;;) {
    int pick = -1;
    for (std::size_t i = 0; i < sol.size(); ++i)
      if (config_support(sol[i].first) > scheme.L) {
        pick = static_cast<int>(i);
        break;
      }
    if (pick < 0) break;
    Configuration c1 = sol[pick].first;
    int tri = -1;
    for (std::size_t t = 0; t < scheme.triples.size(); ++t) {
      int i1 = scheme.triples[t][0], i2 = scheme.triples[t][1];
      long long need = (i1 == i2) ? 2 : 1;
      if (c1[i1] >= need && c1[i2] >= 1) {
        tri = static_cast<int>(t);
        break;
      }
    }
    if (tri < 0)
      throw ContractViolation("reduce_solution: over-long config has no reducible pair; "
                              "the scheme's support bound is wrong");
    const auto& t = scheme.triples[tri];
    Configuration c2 = c1;
    c2[t[0]]--;
    c2[t[1]]--;
    c2[t[2]]++;
    detail::add_config(sol, c1, -1);
    detail::add_config(sol, c2, +1);
    red.reduction_use[tri]++;
  }
  red.config_use = std::move(sol);
  return red;
}

// Undoes the reductions: for each used reduction, some config holding the
// merged size gives it back as the original pair. Working from the largest
// merged size down guarantees a carrier config exists, because any column
// that could supply that row other than a config belongs to a strictly
// larger merged size, and those are already gone.
inline ConfigSolution expand_solution(const RoundingScheme& scheme, ReducedSolution red) {
  ConfigSolution sol = std::move(red.config_use);
  std::vector<std::size_t> order(scheme.triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scheme.triples[a][2] != scheme.triples[b][2])
      return scheme.triples[a][2] < scheme.triples[b][2];  // larger merged size first
    return a < b;
  });
  for (std::size_t t : order) {
    const auto& tri = scheme.triples[t];
    for (long long uses = red.reduction_use[t]; uses > 0; --uses) {
      int carrier = -1;
      for (std::size_t i = 0; i < sol.size(); ++i)
        if (sol[i].second > 0 && sol[i].first[tri[2]] >= 1) {
          carrier = static_cast<int>(i);
          break;
        }
      if (carrier < 0)
        throw ContractViolation("expand_solution: no config carries merged size " +
                                std::to_string(tri[2]));
      Configuration c2 = sol[carrier].first;
      Configuration c3 = c2;
      c3[tri[2]]--;
      c3[tri[0]]++;
      c3[tri[1]]++;
      detail::add_config(sol, c2, -1);
      detail::add_config(sol, c3, +1);
    }
  }
  return sol;
}

// Splits a solver vector over a pruned SolverSystem's columns.
inline ReducedSolution split_solver_solution(const ReducedIP& ip, const SolverSystem& sys,
                                             const std::vector<long long>& x) {
  if (x.size() != sys.col_config.size())
    throw ContractViolation("split_solver_solution: length mismatch");
  ReducedSolution red;
  red.reduction_use.assign(ip.scheme.triples.size(), 0);
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (x[c] <= 0) continue;
    if (sys.col_config[c] >= 0)
      detail::add_config(red.config_use, ip.configs[sys.col_config[c]], x[c]);
    else if (sys.col_reduction[c] >= 0)
      red.reduction_use[sys.col_reduction[c]] += x[c];
  }
  return red;
}

// Splits a solver vector over the IP's columns into configs and reductions;
// slack values only balance the equalities and are dropped.
inline ReducedSolution split_ip_solution(const ReducedIP& ip, const std::vector<long long>& x) {
  if (static_cast<int>(x.size()) != ip.cols())
    throw ContractViolation("split_ip_solution: length mismatch");
  ReducedSolution red;
  red.reduction_use.assign(ip.scheme.triples.size(), 0);
  int nc = static_cast<int>(ip.configs.size());
  for (int c = 0; c < nc; ++c)
    if (x[c] > 0) detail::add_config(red.config_use, ip.configs[c], x[c]);
  for (std::size_t r = 0; r < ip.reductions.size(); ++r) red.reduction_use[r] = x[nc + r];
  return red;
}

// Materializes a configuration multiset into an actual partial schedule:
// one machine per used config, jobs dealt into the size slots ids-ascending,
// then each huge job (plus partner) on its own machine. Small jobs stay
// unassigned for the greedy pass.
inline Schedule schedule_from_configs(const Instance& inst, const RoundedInstance& rounded,
                                      const HugePairing& pairing, const ConfigSolution& sol) {
  Schedule s = empty_schedule(inst);
  long long used = machines_used(sol);
  long long huge_count = static_cast<long long>(pairing.pairs.size());
  if (used > rounded.m_effective)
    throw ContractViolation("schedule_from_configs: more configs than machines");
  if (rounded.m_effective + huge_count > inst.m)
    throw ContractViolation("schedule_from_configs: machine budget exceeded");

  std::vector<std::vector<int>> jobs_by_size(rounded.scheme.d());
  for (const auto& [job, size_idx] : rounded.jobs) jobs_by_size[size_idx].push_back(job);

  // machine k hosts the k-th config use, in solution order
  std::vector<Configuration> machine_cfg;
  for (const auto& [c, mult] : sol)
    for (long long i = 0; i < mult; ++i) machine_cfg.push_back(c);

  for (int size_idx = 0; size_idx < rounded.scheme.d(); ++size_idx) {
    std::size_t next = 0;
    const auto& jobs = jobs_by_size[size_idx];
    for (std::size_t mc = 0; mc < machine_cfg.size() && next < jobs.size(); ++mc)
      for (long long slot = 0; slot < machine_cfg[mc][size_idx] && next < jobs.size(); ++slot)
        assign_job(s, inst, jobs[next++], static_cast<int>(mc));
    if (next < jobs.size())
      throw ContractViolation("schedule_from_configs: configs do not cover size " +
                              std::to_string(size_idx));
  }

  int machine = rounded.m_effective;  // huge jobs take the machines after the config block
  for (const auto& [huge, partner] : pairing.pairs) {
    assign_job(s, inst, huge, machine);
    if (partner != -1) assign_job(s, inst, partner, machine);
    ++machine;
  }
  return s;
}

}  // namespace cmax
