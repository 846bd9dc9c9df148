#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cmax/cmax.hpp"
#include "support/oracles.hpp"

using namespace cmax;

namespace {

// All count vectors over the scheme's sizes that fit in T, recounted the
// slow way as a check on the enumerator.
long long recount_configs(const RoundingScheme& s, int max_support) {
  long long found = 0;
  Configuration c(s.d(), 0);
  auto rec = [&](auto&& self, int i, long long support, Rat load) -> void {
    if (i == s.d()) {
      ++found;
      return;
    }
    for (long long k = 0;; ++k) {
      Rat nl = load + k * s.sizes[i];
      if (nl > s.T || support + k > max_support) break;
      c[i] = k;
      self(self, i + 1, support + k, nl);
    }
    c[i] = 0;
  };
  rec(rec, 0, 0, Rat(0));
  return found;
}

ConfigSolution random_solution(std::mt19937_64& rng, const RoundingScheme& s, int machines) {
  ConfigSolution sol;
  int cap = max_config_support(s);
  for (int mc = 0; mc < machines; ++mc) {
    Configuration c(s.d(), 0);
    Rat load(0);
    long long support = 0;
    for (int tries = 0; tries < 30 && support < cap; ++tries) {
      int i = static_cast<int>(rng() % s.d());
      if (load + s.sizes[i] > s.T) continue;
      c[i]++;
      load += s.sizes[i];
      ++support;
    }
    if (support > 0) detail::add_config(sol, c, 1);
  }
  return sol;
}

}  // namespace

TEST_CASE("config enumeration matches a direct recount") {
  for (Rat eps : {Rat(1, 4), Rat(1, 6)}) {
    RoundingScheme s = standard_scheme(eps, Rat(1));
    for (int max_support : {2, s.L, max_config_support(s)}) {
      auto configs = enumerate_configs(s, max_support);
      REQUIRE(static_cast<long long>(configs.size()) == recount_configs(s, max_support));
      for (const auto& c : configs) {
        Rat load = config_load(s, c);
        REQUIRE(load <= s.T);
        REQUIRE(load > 0);  // the all-zero config is not a column
        REQUIRE(config_support(c) <= max_support);
      }
      // enumeration order is deterministic and duplicate-free
      auto copy = configs;
      std::sort(copy.begin(), copy.end());
      REQUIRE(std::adjacent_find(copy.begin(), copy.end()) == copy.end());
    }
  }
}

TEST_CASE("compressed system has the documented column layout") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  RoundedInstance rounded;
  rounded.scheme = s;
  rounded.counts.assign(s.d(), 0);
  rounded.counts[2] = 3;
  rounded.counts[7] = 1;
  rounded.m_effective = 4;
  ReducedIP ip = build_reduced_ip(rounded);

  REQUIRE(ip.rows() == s.d() + 1);
  REQUIRE(ip.cols() == static_cast<int>(ip.configs.size() + ip.reductions.size()) + s.d() + 1);
  REQUIRE(ip.reductions.size() == s.triples.size());
  REQUIRE(ip.rhs.size() == static_cast<std::size_t>(s.d() + 1));
  REQUIRE(ip.rhs[2] == 3);
  REQUIRE(ip.rhs[s.d()] == 4);

  // every config column covers its counts and occupies one machine
  for (std::size_t c = 0; c < ip.configs.size(); ++c) {
    REQUIRE(ip.kind(static_cast<int>(c)) == ColumnKind::config);
    for (int r = 0; r < s.d(); ++r) REQUIRE(ip.entry(r, static_cast<int>(c)) == ip.configs[c][r]);
    REQUIRE(ip.entry(s.d(), static_cast<int>(c)) == 1);
  }
  // every reduction column trades a pair for its merged size, no machine use
  int base = static_cast<int>(ip.configs.size());
  for (std::size_t rix = 0; rix < ip.reductions.size(); ++rix) {
    int col = base + static_cast<int>(rix);
    REQUIRE(ip.kind(col) == ColumnKind::reduction);
    const ReductionColumn& rc = ip.reductions[rix];
    Rat merged = s.sizes[rc.i1] + s.sizes[rc.i2];
    REQUIRE(merged == s.sizes[rc.target]);
    long long colsum = 0;
    for (int r = 0; r < s.d(); ++r) colsum += ip.entry(r, col);
    REQUIRE(colsum == 1);  // +1 +1 -1
    REQUIRE(ip.entry(s.d(), col) == 0);
  }
}

TEST_CASE("rewriting to short configs preserves load, machines and balance") {
  std::mt19937_64 rng(11);
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  for (int round = 0; round < 50; ++round) {
    ConfigSolution sol = random_solution(rng, s, 1 + static_cast<int>(rng() % 4));
    auto cov = coverage(s, sol);
    long long machines = machines_used(sol);

    ReducedSolution red = reduce_solution(s, sol);
    for (const auto& [c, mult] : red.config_use) {
      REQUIRE(mult > 0);
      REQUIRE(config_support(c) <= s.L);
      Rat load = config_load(s, c);
      REQUIRE(load <= s.T);
    }
    REQUIRE(machines_used(red.config_use) == machines);

    // per-size balance: reduced coverage plus reduction demand = original
    auto red_cov = coverage(s, red.config_use);
    for (std::size_t t = 0; t < s.triples.size(); ++t) {
      red_cov[s.triples[t][0]] += red.reduction_use[t];
      red_cov[s.triples[t][1]] += red.reduction_use[t];
      red_cov[s.triples[t][2]] -= red.reduction_use[t];
    }
    REQUIRE(red_cov == cov);

    // undoing the rewrites restores the original coverage exactly
    ConfigSolution back = expand_solution(s, red);
    REQUIRE(coverage(s, back) == cov);
    REQUIRE(machines_used(back) == machines);
    for (const auto& [c, mult] : back) {
      Rat load = config_load(s, c);
      REQUIRE(load <= s.T);
    }
  }
}

TEST_CASE("rewriting refuses a support bound the scheme cannot honor") {
  RoundingScheme s = standard_scheme(Rat(1, 4), Rat(1));  // no merge triples
  s.L = 2;                                                // forged, real bound is 4
  ConfigSolution sol;
  Configuration c(s.d(), 0);
  c[s.d() - 1] = 4;  // four smallest jobs fit in T but exceed the forged L
  sol.emplace_back(c, 1);
  CHECK_THROWS_AS(reduce_solution(s, sol), ContractViolation);
}

TEST_CASE("compressed system agrees with direct bin packing on small counts") {
  RoundingScheme s = standard_scheme(Rat(1, 4), Rat(1));
  struct Case {
    std::vector<long long> counts;
    int machines;
  };
  // sizes descending are 7/16, 3/8, 5/16, 1/4
  std::vector<Case> cases = {
      {{1, 1, 1, 1}, 1},  // total 11/8 > 1: needs two machines
      {{1, 1, 1, 1}, 2},  // 7/16+3/8 <= 1 and 5/16+1/4 <= 1
      {{2, 2, 0, 0}, 2},  // pairs of 7/16 and 3/8 fill two machines
      {{3, 0, 0, 0}, 1},  // 21/16 > 1
      {{0, 0, 0, 4}, 1},  // exactly fills one machine
  };
  for (const auto& cse : cases) {
    RoundedInstance rounded;
    rounded.scheme = s;
    rounded.counts = cse.counts;
    rounded.m_effective = cse.machines;
    int job = 0;
    for (int i = 0; i < s.d(); ++i)
      for (long long k = 0; k < cse.counts[i]; ++k) rounded.jobs.push_back({job++, i});

    ReducedIP ip = build_reduced_ip(rounded);
    SolverSystem sys = build_solver_system(ip);
    unsigned long long u_bound = 2ull * cse.machines + rounded.jobs.size() + 1;
    JrOptions opt;
    opt.col_upper = sys.col_upper;
    JrResult jr = solve_ip(sys.a, sys.rhs, u_bound, opt);

    bool oracle = testsupport::bin_packing_feasible(s.sizes, cse.counts, cse.machines, s.T);
    INFO("counts " << cse.counts[0] << "," << cse.counts[1] << "," << cse.counts[2] << ","
                   << cse.counts[3] << " machines " << cse.machines);
    REQUIRE(jr.x.has_value() == oracle);
  }
}

TEST_CASE("a solved system materializes into a valid schedule") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(3), Rat(3), Rat(2)};
  Rat T(6);
  RoundingScheme s = standard_scheme(Rat(1, 6), T);
  RoundedInstance rounded = round_jobs(inst, {0, 1, 2}, s, inst.m);

  ReducedIP ip = build_reduced_ip(rounded);
  SolverSystem sys = build_solver_system(ip);
  unsigned long long u_bound = 2ull * inst.m + rounded.jobs.size() + 1;
  JrOptions opt;
  opt.col_upper = sys.col_upper;
  JrResult jr = solve_ip(sys.a, sys.rhs, u_bound, opt);
  REQUIRE(jr.x.has_value());

  ConfigSolution sol = expand_solution(s, split_solver_solution(ip, sys, *jr.x));
  HugePairing no_huge;
  Schedule sched = schedule_from_configs(inst, rounded, no_huge, sol);
  REQUIRE(validate_schedule(sched, inst));
  REQUIRE(sched.makespan() <= T);
}
