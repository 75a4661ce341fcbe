// test_core.cpp: statistics names and the error hierarchy.
#include "doctest.h"

#include "nmqd/core.hpp"

using namespace nmqd;

TEST_SUITE("core") {

TEST_CASE("statistics names round-trip")
{
    CHECK(to_string(Statistics::Boson) == "boson");
    CHECK(to_string(Statistics::Fermion) == "fermion");
    CHECK(statistics_from_string("boson") == Statistics::Boson);
    CHECK(statistics_from_string("fermion") == Statistics::Fermion);
    CHECK_THROWS_AS(statistics_from_string("anyon"), InvalidArgument);
}

TEST_CASE("errors derive from the library base and carry their data")
{
    const QuadratureError q("no convergence", 0.25);
    CHECK(q.residual() == 0.25);
    const RootFindingError r("no root", 1.0, 2.0);
    CHECK(r.bracket_lo() == 1.0);
    CHECK(r.bracket_hi() == 2.0);
    CHECK_THROWS_AS(throw TruncationError("x"), Error);
    CHECK_THROWS_AS(throw ConfigError("x"), Error);
    CHECK_THROWS_AS(throw InconclusiveError("x"), std::runtime_error);
}

}
