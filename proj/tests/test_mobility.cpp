#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vfc/mobility.hpp"

#include <doctest.h>

#include <random>

using vfc::Vec2;
using vfc::VehicleState;

TEST_CASE("alpha outside [0,1] is rejected") {
    VehicleState v;
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(vfc::step_velocity(v, -0.1, 1.0, 0.0, rng), std::domain_error);
    CHECK_THROWS_AS(vfc::step_velocity(v, 1.1, 1.0, 0.0, rng), std::domain_error);
}

TEST_CASE("alpha = 1 keeps the velocity exactly") {
    VehicleState v;
    v.velocity_mps = Vec2(17.0, 0.3);
    v.mean_velocity_mps = Vec2(25.0, 0.0);
    std::mt19937_64 rng(1);
    const Vec2 next = vfc::step_velocity(v, 1.0, 5.0, 0.05, rng);
    CHECK(next.x() == doctest::Approx(17.0));
    CHECK(next.y() == doctest::Approx(0.3));
}

TEST_CASE("alpha = 0 is memoryless around the mean") {
    VehicleState v;
    v.velocity_mps = Vec2(100.0, 0.0);  // must not matter
    v.mean_velocity_mps = Vec2(25.0, 0.0);
    std::mt19937_64 rng(2);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double vx = vfc::step_velocity(v, 0.0, 5.0, 0.0, rng).x();
        sum += vx;
        sum_sq += vx * vx;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(mean == doctest::Approx(25.0).epsilon(0.01));
    CHECK(var == doctest::Approx(25.0).epsilon(0.02));
}

TEST_CASE("stationary distribution has the asymptotic mean and variance") {
    // For v' = a v + (1-a) vbar + sqrt(1-a^2) w, the stationary law is
    // N(vbar, sigma^2) independent of a.
    VehicleState v;
    v.velocity_mps = Vec2(25.0, 0.0);
    v.mean_velocity_mps = Vec2(25.0, 0.0);
    std::mt19937_64 rng(3);
    double sum = 0.0, sum_sq = 0.0;
    const int burn = 1000, n = 400000;
    for (int i = 0; i < burn + n; ++i) {
        v.velocity_mps = vfc::step_velocity(v, 0.9, 5.0, 0.0, rng);
        if (i >= burn) {
            sum += v.velocity_mps.x();
            sum_sq += v.velocity_mps.x() * v.velocity_mps.x();
        }
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(mean == doctest::Approx(25.0).epsilon(0.01));
    CHECK(var == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("position advances and wraps around the road") {
    VehicleState v;
    v.position_m = Vec2(2990.0, 0.0);
    v.velocity_mps = Vec2(20.0, 0.0);
    const Vec2 q = vfc::step_position(v, 1.0, 3000.0);
    CHECK(q.x() == doctest::Approx(10.0));

    v.position_m = Vec2(5.0, 0.0);
    v.velocity_mps = Vec2(-20.0, 0.0);
    const Vec2 q2 = vfc::step_position(v, 1.0, 3000.0);
    CHECK(q2.x() == doctest::Approx(2985.0));
}

TEST_CASE("non-positive slot duration is rejected") {
    VehicleState v;
    CHECK_THROWS_AS(vfc::step_position(v, 0.0, 3000.0), std::domain_error);
}
