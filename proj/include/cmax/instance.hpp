#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cmax/errors.hpp"
#include "cmax/rational.hpp"

namespace cmax {

// An instance of makespan scheduling on identical machines: m machines and
// n jobs with positive processing times. Jobs are referred to by index.
struct Instance {
  int m = 0;
  std::vector<Rat> p;

  int n() const { return static_cast<int>(p.size()); }
};

// Sum of processing times. Used all over; kept exact.
inline Rat total_load(const Instance& inst) {
  Rat s = 0;
  for (const Rat& x : inst.p) s += x;
  return s;
}

// max(p_max, sum/m): every schedule's makespan is at least this.
inline Rat lower_bound(const Instance& inst) {
  if (inst.m <= 0 || inst.p.empty()) throw ContractViolation("lower_bound on empty instance");
  Rat lb = total_load(inst) / inst.m;
  for (const Rat& x : inst.p) lb = std::max(lb, x);
  return lb;
}

// Job -> machine map plus derived loads. Machines are 0-based internally
// (the CLI prints them 1-based). assignment[j] == -1 marks a job that a
// pipeline stage has not placed yet; finished schedules have none.
struct Schedule {
  int m = 0;
  std::vector<int> assignment;
  std::vector<Rat> loads;

  Rat makespan() const {
    Rat ms = 0;
    for (const Rat& l : loads) ms = std::max(ms, l);
    return ms;
  }
};

inline Schedule empty_schedule(const Instance& inst) {
  Schedule s;
  s.m = inst.m;
  s.assignment.assign(inst.p.size(), -1);
  s.loads.assign(inst.m, Rat(0));
  return s;
}

inline void assign_job(Schedule& s, const Instance& inst, int job, int machine) {
  if (job < 0 || job >= inst.n() || machine < 0 || machine >= s.m)
    throw ContractViolation("assign_job out of range");
  if (s.assignment[job] != -1) throw ContractViolation("job assigned twice");
  s.assignment[job] = machine;
  s.loads[machine] += inst.p[job];
}

// Recomputes loads from the assignment and checks the schedule is complete
// and consistent. Returns false instead of throwing so tests can assert on it.
inline bool validate_schedule(const Schedule& s, const Instance& inst) {
  if (s.m != inst.m) return false;
  if (static_cast<int>(s.assignment.size()) != inst.n()) return false;
  std::vector<Rat> loads(s.m, Rat(0));
  for (int j = 0; j < inst.n(); ++j) {
    int mc = s.assignment[j];
    if (mc < 0 || mc >= s.m) return false;
    loads[mc] += inst.p[j];
  }
  if (static_cast<int>(s.loads.size()) != s.m) return false;
  for (int k = 0; k < s.m; ++k)
    if (loads[k] != s.loads[k]) return false;
  return true;
}

// Text format: first line "m n", second line the n processing times.
// Times may be integers, decimals or fractions; they must be positive.
inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  long long m = 0, n = 0;
  if (!(in >> m >> n)) throw ParseError("instance header must be 'm n'");
  if (m < 1) throw ParseError("machine count must be positive");
  if (n < 1) throw ParseError("job count must be positive");
  Instance inst;
  inst.m = static_cast<int>(m);
  inst.p.reserve(static_cast<std::size_t>(n));
  std::string tok;
  for (long long j = 0; j < n; ++j) {
    if (!(in >> tok)) throw ParseError("expected " + std::to_string(n) + " processing times");
    Rat p = parse_rat(tok);
    if (p <= 0) throw ParseError("processing time must be positive: '" + tok + "'");
    inst.p.push_back(p);
  }
  if (in >> tok) throw ParseError("trailing data after processing times: '" + tok + "'");
  return inst;
}

inline std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  out << inst.m << " " << inst.n() << "\n";
  for (int j = 0; j < inst.n(); ++j) out << (j ? " " : "") << rat_str(inst.p[j]);
  out << "\n";
  return out.str();
}

// Benchmark families. All draw iid uniform integer times; the family name
// only records which experiment grid a class belongs to.
enum class Family { E1, E2, E3, E4, BIG };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::E1: return "E1";
    case Family::E2: return "E2";
    case Family::E3: return "E3";
    case Family::E4: return "E4";
    case Family::BIG: return "BIG";
  }
  throw ContractViolation("unknown family");
}

inline Family parse_family(const std::string& name) {
  if (name == "E1") return Family::E1;
  if (name == "E2") return Family::E2;
  if (name == "E3") return Family::E3;
  if (name == "E4") return Family::E4;
  if (name == "BIG") return Family::BIG;
  throw ParseError("unknown family: '" + name + "'");
}

// One benchmark class: `count` instances with m machines, n jobs and times
// drawn uniformly from [lo, hi].
struct ClassSpec {
  Family family = Family::E1;
  int m = 0;
  int n = 0;
  long long lo = 0;
  long long hi = 0;
  int count = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Unbiased uniform draw via rejection; written out so the byte stream of
// mt19937_64 maps to values identically on every platform
// (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t range = hi - lo + 1;  // hi >= lo; range 0 means the full 2^64 span
  if (range == 0) return rng();
  std::uint64_t rem = (0 - range) % range;  // 2^64 mod range
  std::uint64_t limit = 0 - rem;            // multiples of range fit below this
  std::uint64_t r = rng();
  while (rem != 0 && r >= limit) r = rng();
  return lo + r % range;
}

}  // namespace detail

// Instance k of a class is generated from seed XOR k, so any single instance
// can be regenerated without producing its predecessors.
inline Instance generate_instance(const ClassSpec& spec, int index) {
  if (spec.m < 1 || spec.n < 1) throw ContractViolation("class needs m >= 1, n >= 1");
  if (spec.lo < 1 || spec.hi < spec.lo) throw ContractViolation("class needs 1 <= lo <= hi");
  std::mt19937_64 rng(spec.seed ^ static_cast<std::uint64_t>(index));
  Instance inst;
  inst.m = spec.m;
  inst.p.reserve(spec.n);
  for (int j = 0; j < spec.n; ++j)
    inst.p.push_back(Rat(static_cast<long long>(detail::uniform_u64(
        rng, static_cast<std::uint64_t>(spec.lo), static_cast<std::uint64_t>(spec.hi)))));
  return inst;
}

inline std::vector<Instance> generate_class(const ClassSpec& spec) {
  std::vector<Instance> out;
  out.reserve(spec.count);
  for (int k = 0; k < spec.count; ++k) out.push_back(generate_instance(spec, k));
  return out;
}

}  // namespace cmax
