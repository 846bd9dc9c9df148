#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cmax/cmax.hpp"

using namespace cmax;

// eps = 1/6 over T = 1: two octaves of six ladder positions each survive
// truncation at 2/3. Everything here is frozen by hand from the grid
// definition, not read back from the implementation.
TEST_CASE("boundary grid at eps = 1/6 matches the hand-computed ladder") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  REQUIRE(s.d() == 12);
  REQUIRE(s.L == 4);
  std::vector<Rat> expect;
  for (long long num : {6, 7, 8, 9, 10, 11, 12, 14, 16, 18, 20, 22})
    expect.push_back(Rat(num, 36));
  REQUIRE(boundaries_ascending(s) == expect);
  std::string why;
  INFO(why);
  REQUIRE(verify_scheme(s, &why));
  REQUIRE(s.triples.size() == 12);
}

TEST_CASE("the ladder contains the 7/36 + 9/36 = 16/36 merge") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  bool found = false;
  for (const auto& t : s.triples) {
    Rat a = s.sizes[t[0]], b = s.sizes[t[1]];
    if ((a == Rat(7, 36) && b == Rat(9, 36)) || (a == Rat(9, 36) && b == Rat(7, 36))) {
      REQUIRE(s.sizes[t[2]] == Rat(16, 36));
      found = true;
    }
  }
  REQUIRE(found);
}

TEST_CASE("every triple is an exact same-octave parity merge") {
  for (Rat eps : {Rat(1, 5), Rat(1, 6), Rat(1, 8), Rat(1, 10), Rat(2, 13)}) {
    RoundingScheme s = standard_scheme(eps, Rat(1));
    for (const auto& t : s.triples) {
      REQUIRE(t[0] <= t[1]);
      Rat sum = s.sizes[t[0]] + s.sizes[t[1]];
      REQUIRE(sum == s.sizes[t[2]]);
    }
    std::string why;
    INFO("eps = " << rat_str(eps) << ": " << why);
    REQUIRE(verify_scheme(s, &why));
  }
}

TEST_CASE("coarse precision strips every merge but stays valid") {
  RoundingScheme s = standard_scheme(Rat(1, 4), Rat(1));
  REQUIRE(s.d() == 4);
  REQUIRE(s.L == 4);
  REQUIRE(s.triples.empty());
  REQUIRE(verify_scheme(s));
}

TEST_CASE("rounding brackets each job within one precision factor") {
  std::mt19937_64 rng(7);
  for (Rat eps : {Rat(1, 4), Rat(1, 6), Rat(1, 9)}) {
    Rat T(37, 5);
    RoundingScheme s = standard_scheme(eps, T);
    Instance inst;
    inst.m = 3;
    Rat lo = eps * T, hi = (1 - 2 * eps) * T;
    for (int j = 0; j < 40; ++j) {
      // random rational strictly inside the large range
      Rat f(1 + static_cast<long long>(rng() % 9999), 10001);
      inst.p.push_back(lo + f * (hi - lo));
    }
    std::vector<int> ids(inst.p.size());
    for (int j = 0; j < inst.n(); ++j) ids[j] = j;
    RoundedInstance r = round_jobs(inst, ids, s, inst.m);
    REQUIRE(static_cast<int>(r.jobs.size()) == inst.n());
    long long total = 0;
    for (long long c : r.counts) total += c;
    REQUIRE(total == inst.n());
    for (const auto& [job, idx] : r.jobs) {
      const Rat& rounded = s.sizes[idx];
      Rat stretch = (1 + eps) * rounded;
      REQUIRE(rounded <= inst.p[job]);      // rounds down
      REQUIRE(stretch >= inst.p[job]);      // by at most one precision factor
    }
  }
}

TEST_CASE("rounding rejects jobs outside the large range") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(6));
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(1), Rat(2)};  // 1 = eps*T is small, not large
  CHECK_THROWS_AS(round_jobs(inst, {0}, s, 2), ContractViolation);
  REQUIRE_NOTHROW(round_jobs(inst, {1}, s, 2));
}

TEST_CASE("scaling a scheme moves every size by the same factor") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  RoundingScheme t = scale_scheme(s, Rat(9, 2));
  REQUIRE(t.T == Rat(9, 2));
  REQUIRE(t.eps == s.eps);
  REQUIRE(t.L == s.L);
  REQUIRE(t.triples == s.triples);
  for (int i = 0; i < s.d(); ++i) {
    Rat scaled = s.sizes[i] * Rat(9, 2);
    REQUIRE(t.sizes[i] == scaled);
  }
  REQUIRE(verify_scheme(t));
}

TEST_CASE("scheme files survive a round trip and reject tampering") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(3, 2));
  std::string text = write_scheme(s);
  RoundingScheme back = read_scheme(text);
  REQUIRE(back.eps == s.eps);
  REQUIRE(back.T == s.T);
  REQUIRE(back.L == s.L);
  REQUIRE(back.sizes == s.sizes);
  REQUIRE(back.triples == s.triples);

  // corrupt one size so a triple sum breaks: reader must refuse
  std::string bad = text;
  auto pos = bad.find("size 7/24");  // 7/36 * 3/2
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 9, "size 8/24");
  CHECK_THROWS_AS(read_scheme(bad), ParseError);
  CHECK_THROWS_AS(read_scheme("not a scheme\n"), ParseError);
}

TEST_CASE("support bound helpers agree with the capacity argument") {
  RoundingScheme s = standard_scheme(Rat(1, 6), Rat(1));
  // smallest size is 1/6, so no config fits more than 6 rounded jobs
  REQUIRE(max_config_support(s) == 6);
  int minimal = minimal_support_bound(s);
  REQUIRE(minimal >= 1);
  REQUIRE(minimal <= s.L);
}

TEST_CASE("job classification splits at the documented thresholds") {
  Instance inst;
  inst.m = 2;
  inst.p = {Rat(1), Rat(2), Rat(4), Rat(5), Rat(6)};
  JobPartition part = classify(inst, Rat(6), Rat(1, 6));
  // small: p <= 1, huge: p >= 4, large otherwise
  REQUIRE(part.small == std::vector<int>{0});
  REQUIRE(part.large == std::vector<int>{1});
  REQUIRE(part.huge == std::vector<int>{2, 3, 4});
}
