#include <catch2/catch_amalgamated.hpp>

#include "cmax/cmax.hpp"

using namespace cmax;

namespace {

Rat abs_rat(const Rat& v) { return v < 0 ? Rat(-v) : v; }

}  // namespace

// With a single size x0 and compression bound 2, the constraints collapse to
//   x0 <= eps (1+eps),  (1+eps) x0 >= 1-2 eps,  3 x0 > 1,
// which admit a solution exactly from the real root of
//   eps^3 + 2 eps^2 + 3 eps - 1 = 0,
// at 0.2756822037... The search must land on that root to bisection accuracy.
TEST_CASE("menu search reproduces the closed-form single-size threshold") {
  auto res = optimize_scheme(1, 2, Rat(1, 10), Rat(3, 10), Rat(1, 100'000'000));
  REQUIRE(res.has_value());
  Rat root(2756822037LL, 10'000'000'000LL);
  Rat err = abs_rat(res->eps - root);
  REQUIRE(err <= Rat(1, 50'000'000));
  REQUIRE(res->scheme.d() == 1);
  REQUIRE(res->scheme.L == 2);
  REQUIRE(verify_scheme(res->scheme));
  // the cubic really is the active boundary: the menu pins both range ends
  Rat x0 = res->scheme.sizes[0];
  REQUIRE(x0 <= Rat(res->eps * (1 + res->eps)));
  Rat covered = (1 + res->eps) * x0;
  REQUIRE(covered >= Rat(1 - 2 * res->eps));
  Rat triple_sum = 3 * x0;
  REQUIRE(triple_sum > 1);
}

TEST_CASE("single probes answer the two sides of the threshold") {
  auto above = probe_scheme(1, 2, Rat(28, 100));
  REQUIRE(above.has_value());
  REQUIRE(above->scheme.eps == Rat(28, 100));
  REQUIRE(above->scheme.T == Rat(1));
  REQUIRE(verify_scheme(above->scheme));

  auto below = probe_scheme(1, 2, Rat(1, 4));
  REQUIRE_FALSE(below.has_value());
}

TEST_CASE("a longer menu never needs more precision than a shorter one") {
  auto two = optimize_scheme(2, 2, Rat(1, 10), Rat(3, 10), Rat(1, 1'000'000));
  REQUIRE(two.has_value());
  REQUIRE(two->scheme.d() == 2);
  REQUIRE(verify_scheme(two->scheme));
  // d=1 threshold is 0.27568...; two sizes must do at least as well
  REQUIRE(two->eps < Rat(2757, 10000));
  // and the found value is tight: a probe below the returned eps fails
  auto under = probe_scheme(2, 2, Rat(two->eps - Rat(1, 100)));
  REQUIRE_FALSE(under.has_value());
}

TEST_CASE("search range entirely below the threshold reports infeasible") {
  auto res = optimize_scheme(1, 2, Rat(1, 20), Rat(1, 4), Rat(1, 1'000'000));
  REQUIRE_FALSE(res.has_value());
}

TEST_CASE("argument guards fire before any search work") {
  CHECK_THROWS_AS(optimize_scheme(0, 2, Rat(1, 10), Rat(3, 10), Rat(1, 100)), ContractViolation);
  CHECK_THROWS_AS(optimize_scheme(1, 0, Rat(1, 10), Rat(3, 10), Rat(1, 100)), ContractViolation);
  CHECK_THROWS_AS(optimize_scheme(17, 2, Rat(1, 10), Rat(3, 10), Rat(1, 100)), ContractViolation);
  CHECK_THROWS_AS(optimize_scheme(1, 2, Rat(3, 10), Rat(1, 10), Rat(1, 100)), ContractViolation);
  CHECK_THROWS_AS(optimize_scheme(1, 2, Rat(1, 10), Rat(3, 10), Rat(0)), ContractViolation);
  CHECK_THROWS_AS(probe_scheme(0, 2, Rat(1, 4)), ContractViolation);
}

TEST_CASE("search is deterministic") {
  auto a = optimize_scheme(2, 3, Rat(1, 10), Rat(3, 10), Rat(1, 100'000));
  auto b = optimize_scheme(2, 3, Rat(1, 10), Rat(3, 10), Rat(1, 100'000));
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  REQUIRE(a->eps == b->eps);
  REQUIRE(a->scheme.sizes == b->scheme.sizes);
  REQUIRE(a->scheme.triples == b->scheme.triples);
}

// For one size and compression bound 3 the tight-bottom variant pins
//   x0 <= eps,  (1+eps) x0 >= 1-2 eps,  4 x0 > 1,
// whose boundary eps^2 + 3 eps - 1 = 0 gives eps = (sqrt(13)-3)/2. The loose
// bottom cap eps(1+eps) reuses the cubic root from the L=2 case.
TEST_CASE("strengthened variants stay verifiable and cost extra precision") {
  SchemeSearchOptions tight;
  tight.tight_bottom = true;
  auto strict = optimize_scheme(1, 3, Rat(1, 10), Rat(7, 20), Rat(1, 1'000'000), tight);
  auto loose = optimize_scheme(1, 3, Rat(1, 10), Rat(7, 20), Rat(1, 1'000'000));
  REQUIRE(strict.has_value());
  REQUIRE(loose.has_value());
  REQUIRE(verify_scheme(strict->scheme));
  Rat strict_root(3027756377LL, 10'000'000'000LL);
  Rat strict_err = strict->eps < strict_root ? Rat(strict_root - strict->eps)
                                             : Rat(strict->eps - strict_root);
  REQUIRE(strict_err <= Rat(1, 400'000));
  // capping the bottom size at eps instead of eps(1+eps) costs precision
  REQUIRE(strict->eps > loose->eps);
  Rat bottom = strict->scheme.sizes.back();
  REQUIRE(bottom <= strict->eps);
}

TEST_CASE("exported model lists one indicator per candidate subset") {
  std::string lp = emit_milp(4, 2, Rat(22, 125));
  REQUIRE(lp.find("Minimize") != std::string::npos);
  REQUIRE(lp.find("Subject To") != std::string::npos);
  REQUIRE(lp.find("Binary") != std::string::npos);
  REQUIRE(lp.find("End") != std::string::npos);
  // C(4,3) = 4 subset indicators, each with fit, unfit and closure rows
  for (const char* y : {"y_0_1_2", "y_0_1_3", "y_0_2_3", "y_1_2_3"}) {
    REQUIRE(lp.find(std::string("fit_") + y + ":") != std::string::npos);
    REQUIRE(lp.find(std::string("unfit_") + y + ":") != std::string::npos);
    REQUIRE(lp.find(std::string("reduce_") + y + ":") != std::string::npos);
  }
  REQUIRE(lp.find("y_0_1_2_3") == std::string::npos);  // no oversized subsets
  // range rows cover both ends of the menu
  REQUIRE(lp.find("top_cover:") != std::string::npos);
  REQUIRE(lp.find("top_range:") != std::string::npos);
  REQUIRE(lp.find("bottom_range: x3") != std::string::npos);
  REQUIRE(lp.find("gap0:") != std::string::npos);
  REQUIRE(lp.find("ord2:") != std::string::npos);
  // pair identities carry both big-M directions
  REQUIRE(lp.find("sum_hi_z_0_1_2:") != std::string::npos);
  REQUIRE(lp.find("sum_lo_z_0_1_2:") != std::string::npos);
}

TEST_CASE("search statistics reflect actual work") {
  auto res = optimize_scheme(1, 2, Rat(1, 10), Rat(3, 10), Rat(1, 1000));
  REQUIRE(res.has_value());
  REQUIRE(res->stats.probes >= 5);       // bisecting 0.2 down to 1e-3
  REQUIRE(res->stats.lp_solves > 0);
  REQUIRE(res->stats.nodes > 0);
}
