#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vfc/metrics.hpp"

#include <doctest.h>

TEST_CASE("jain index of equal shares is 1") {
    CHECK(vfc::jain_fairness({3.0, 3.0, 3.0, 3.0}) == doctest::Approx(1.0));
}

TEST_CASE("jain index of a single active vehicle is 1/N") {
    CHECK(vfc::jain_fairness({5.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.25));
}

TEST_CASE("jain index of (1,2,3) is 6/7") {
    CHECK(vfc::jain_fairness({1.0, 2.0, 3.0}) == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("jain index conventions for degenerate input") {
    CHECK(vfc::jain_fairness({}) == doctest::Approx(1.0));
    CHECK(vfc::jain_fairness({0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("jain index is scale invariant") {
    const std::vector<double> x = {1.0, 4.0, 2.5, 0.5};
    std::vector<double> y = x;
    for (double& v : y) v *= 1e9;
    CHECK(vfc::jain_fairness(x) == doctest::Approx(vfc::jain_fairness(y)));
}
