#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "aep/distribution.hpp"

using aep::Distribution;

TEST_CASE("construction validates weights") {
    CHECK_THROWS_AS(Distribution({0.5, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({0.5, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({std::numeric_limits<double>::infinity()}), std::invalid_argument);
    const Distribution tiny_negative({1.0, -1e-14});
    CHECK(tiny_negative[1] == 0.0);
}

TEST_CASE("uniform and dirac") {
    const auto u = Distribution::uniform(4);
    CHECK(u.size() == 4);
    CHECK(u.is_normalized());
    CHECK(u.support_size() == 4);
    const auto d = Distribution::dirac(3, 2);
    CHECK(d[2] == 1.0);
    CHECK(d.support_size() == 1);
    CHECK_THROWS(Distribution::dirac(3, 3));
    CHECK_THROWS(Distribution::uniform(0));
}

TEST_CASE("support, sorting, normalization") {
    const Distribution p({0.1, 0.0, 0.6, 1e-17, 0.3});
    CHECK(p.support_size() == 3);
    const auto s = p.support_only();
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 0.1);
    CHECK(s[1] == 0.6);
    CHECK(s[2] == 0.3);
    const auto d = p.sorted_descending();
    CHECK(d[0] == 0.6);
    CHECK(d[4] == 0.0);

    const Distribution q({2.0, 6.0});
    CHECK_FALSE(q.is_normalized());
    const auto n = q.normalized();
    CHECK(n[0] == doctest::Approx(0.25));
    CHECK(n.is_normalized());
    CHECK_THROWS(Distribution({0.0, 0.0}).normalized());
}
