#include <catch2/catch_amalgamated.hpp>

#include "cmax/cmax.hpp"

using namespace cmax;

TEST_CASE("instance text round trip") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(3), Rat(3), Rat(2), Rat(2), Rat(2)};
  Instance back = parse_instance(write_instance(inst));
  REQUIRE(back.m == 2);
  REQUIRE(back.p == inst.p);
}

TEST_CASE("instance parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_instance(""), ParseError);
  CHECK_THROWS_AS(parse_instance("2"), ParseError);            // missing n
  CHECK_THROWS_AS(parse_instance("2 3\n1 2"), ParseError);     // too few jobs
  CHECK_THROWS_AS(parse_instance("2 2\n1 2 3"), ParseError);   // trailing data
  CHECK_THROWS_AS(parse_instance("0 1\n5"), ParseError);       // no machines
  CHECK_THROWS_AS(parse_instance("2 2\n1 -3"), ParseError);    // negative time
  CHECK_THROWS_AS(parse_instance("2 2\n1 x"), ParseError);     // junk token
}

TEST_CASE("parse accepts fractions") {
  Instance inst = parse_instance("2 2\n7/2 1/3\n");
  REQUIRE(inst.p[0] == Rat(7, 2));
  REQUIRE(inst.p[1] == Rat(1, 3));
}

TEST_CASE("generator is deterministic and respects its spec") {
  ClassSpec spec;
  spec.family = Family::E1;
  spec.m = 3;
  spec.n = 9;
  spec.lo = 1;
  spec.hi = 20;
  spec.count = 5;
  spec.seed = 42;
  auto batch1 = generate_class(spec);
  auto batch2 = generate_class(spec);
  REQUIRE(batch1.size() == 5);
  for (std::size_t i = 0; i < batch1.size(); ++i) {
    REQUIRE(batch1[i].m == 3);
    REQUIRE(batch1[i].n() == 9);
    REQUIRE(batch1[i].p == batch2[i].p);  // same seed, same jobs
    for (const Rat& p : batch1[i].p) {
      REQUIRE(p >= 1);
      REQUIRE(p <= 20);
      REQUIRE(is_integer(p));
    }
  }
  // instances are sub-seeded independently: changing the index changes jobs
  bool any_diff = false;
  for (std::size_t i = 1; i < batch1.size(); ++i)
    if (batch1[i].p != batch1[0].p) any_diff = true;
  REQUIRE(any_diff);
}

TEST_CASE("family parsing is total over the published names") {
  for (Family f : {Family::E1, Family::E2, Family::E3, Family::E4, Family::BIG})
    REQUIRE(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("bogus"), ParseError);
}

TEST_CASE("schedule validation catches double assignment and bad loads") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(4), Rat(3)};
  Schedule s = empty_schedule(inst);
  assign_job(s, inst, 0, 0);
  REQUIRE_FALSE(validate_schedule(s, inst));  // job 1 unassigned
  assign_job(s, inst, 1, 1);
  REQUIRE(validate_schedule(s, inst));
  REQUIRE(s.makespan() == Rat(4));
  s.loads[0] = Rat(99);  // loads must match assignments
  REQUIRE_FALSE(validate_schedule(s, inst));
}

// 2 machines, jobs 3 3 2 2 2: the list heuristic commits the two 3s to
// different machines and ends at 7, while pairing the 3s reaches optimum 6.
TEST_CASE("longest processing time lands on the classic worst case") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(3), Rat(3), Rat(2), Rat(2), Rat(2)};
  Schedule s = lpt(inst);
  REQUIRE(validate_schedule(s, inst));
  REQUIRE(s.makespan() == Rat(7));
}

TEST_CASE("capacity search beats the list heuristic on that case") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(3), Rat(3), Rat(2), Rat(2), Rat(2)};
  Schedule s = multifit(inst);
  REQUIRE(validate_schedule(s, inst));
  REQUIRE(s.makespan() == Rat(6));
  Schedule s2 = djms(inst);
  REQUIRE(validate_schedule(s2, inst));
  REQUIRE(s2.makespan() == Rat(6));
}

TEST_CASE("heuristics handle degenerate shapes") {
  Instance one;
  one.m = 4;
  one.p = {Rat(5)};
  REQUIRE(lpt(one).makespan() == Rat(5));
  REQUIRE(multifit(one).makespan() == Rat(5));
  REQUIRE(djms(one).makespan() == Rat(5));

  Instance none;
  none.m = 3;
  REQUIRE(lpt(none).makespan() == Rat(0));

  Instance single_machine;
  single_machine.m = 1;
  single_machine.p = {Rat(2), Rat(5), Rat(1)};
  REQUIRE(lpt(single_machine).makespan() == Rat(8));
  REQUIRE(multifit(single_machine).makespan() == Rat(8));
  REQUIRE(djms(single_machine).makespan() == Rat(8));
}

TEST_CASE("first fit decreasing reports infeasibility instead of overflowing") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(3), Rat(3), Rat(3)};
  REQUIRE_FALSE(ffd_pack(inst, Rat(5)).has_value());
  auto s = ffd_pack(inst, Rat(6));
  REQUIRE(s.has_value());
  REQUIRE(validate_schedule(*s, inst));
  REQUIRE(s->makespan() <= Rat(6));
}

TEST_CASE("load lower bound dominates both of its parts") {
  Instance inst;
  inst.m = 3;
  inst.p = {Rat(9), Rat(1), Rat(1), Rat(1)};
  // max(avg load 4, longest job 9) = 9
  REQUIRE(lower_bound(inst) == Rat(9));
  inst.p = {Rat(4), Rat(4), Rat(4)};
  REQUIRE(lower_bound(inst) == Rat(4));
}
