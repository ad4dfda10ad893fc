#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vfc/contract.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using vfc::ContractMenu;
using vfc::FvType;
using vfc::ServerProfile;

namespace {

std::vector<FvType> random_types(std::mt19937_64& rng, int levels) {
    std::uniform_real_distribution<double> theta_gap(5e8, 6e9), cap(1e9, 2e10), cnt(1.0, 10.0);
    std::vector<FvType> types(levels);
    double theta = theta_gap(rng);
    for (int l = 0; l < levels; ++l) {
        types[l].theta = theta;
        types[l].f_cap_hz = cap(rng);
        types[l].count = std::floor(cnt(rng));
        theta += theta_gap(rng);
    }
    return types;
}

/// Exhaustive 200-per-axis grid over monotone L=3 menus under the same
/// constraint set the solver faces (monotone f, per-type suffix caps, top
/// reward below the unit price).
double grid_oracle_l3(const std::vector<FvType>& types, double cycles, double c, double e,
                      double kappa) {
    const double A = e * kappa * cycles;
    double cap3 = types[2].f_cap_hz;
    double cap2 = std::min(types[1].f_cap_hz, cap3);
    double cap1 = std::min(types[0].f_cap_hz, cap2);
    const int grid = 200;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double f1 = cap1 * i / grid;
        const double w1 = A * f1 * f1 / types[0].theta;
        for (int j = 0; j <= grid; ++j) {
            const double f2 = cap2 * j / grid;
            if (f2 < f1) continue;
            const double w2 = w1 + A * (f2 * f2 - f1 * f1) / types[1].theta;
            for (int k = 0; k <= grid; ++k) {
                const double f3 = cap3 * k / grid;
                if (f3 < f2) continue;
                const double w3 = w2 + A * (f3 * f3 - f2 * f2) / types[2].theta;
                if (w3 >= c) continue;
                const double u = types[0].count * (c * f1 - types[0].theta * w1) +
                                 types[1].count * (c * f2 - types[1].theta * w2) +
                                 types[2].count * (c * f3 - types[2].theta * w3);
                best = std::max(best, u);
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("classify_types buckets by theta quantiles with min-capacity caps") {
    std::vector<ServerProfile> fvs(6);
    const double f[] = {2e9, 9e9, 4e9, 8e9, 3e9, 6e9};
    const double s[] = {0.5, 1.5, 0.6, 1.2, 0.7, 1.0};
    for (int i = 0; i < 6; ++i) {
        fvs[i].f_max_hz = f[i];
        fvs[i].sigma = s[i];  // thetas: 1, 13.5, 2.4, 9.6, 2.1, 6 (x1e9)
    }
    const auto cls = vfc::classify_types(fvs, 3);
    REQUIRE(cls.types.size() == 3);
    // Sorted thetas: {1, 2.1, 2.4, 6, 9.6, 13.5}e9 -> buckets of two.
    CHECK(cls.types[0].theta == doctest::Approx((1e9 + 2.1e9) / 2));
    CHECK(cls.types[1].theta == doctest::Approx((2.4e9 + 6e9) / 2));
    CHECK(cls.types[2].theta == doctest::Approx((9.6e9 + 13.5e9) / 2));
    CHECK(cls.types[0].f_cap_hz == doctest::Approx(2e9));  // min(2e9, 3e9)
    CHECK(cls.types[1].f_cap_hz == doctest::Approx(4e9));  // min(4e9, 6e9)
    CHECK(cls.types[2].f_cap_hz == doctest::Approx(8e9));  // min(8e9, 9e9)
    CHECK(cls.bucket_of[0] == 0);
    CHECK(cls.bucket_of[1] == 2);
    CHECK(cls.types[0].count == doctest::Approx(2.0));
}

TEST_CASE("identical thetas merge into one bucket") {
    std::vector<ServerProfile> fvs(4);
    for (auto& p : fvs) {
        p.f_max_hz = 5e9;
        p.sigma = 1.0;
    }
    const auto cls = vfc::classify_types(fvs, 3);
    CHECK(cls.types.size() == 1);
    CHECK(cls.types[0].count == doctest::Approx(4.0));
}

TEST_CASE("fv and mbs utilities are the declared expressions") {
    const FvType type{2e9, 5e9, 3.0};
    const vfc::ContractItem item{1e9, 2e-10};
    const double cycles = 5e8, e = 1.0, kappa = 1e-28;
    // theta w - e kappa C f^2 = 2e9 * 2e-10 - 1e-28 * 5e8 * 1e18 = 0.4 - 0.05
    CHECK(vfc::fv_utility(type.theta, item, cycles, e, kappa) == doctest::Approx(0.35));
    ContractMenu menu;
    menu.price_c = 1e-9;
    menu.items = {item};
    // M (c f - theta w) = 3 (1e-9 * 1e9 - 2e9 * 2e-10) = 3 (1 - 0.4)
    CHECK(vfc::mbs_utility(menu, {type}) == doctest::Approx(1.8));
}

TEST_CASE("single-type optimum matches the closed form c / (2 e kappa C)") {
    const double cycles = 6e8, c = 1.2e-9, e = 1.0, kappa = 1e-28;
    const std::vector<FvType> types = {{1e10, 2e10, 4.0}};
    const auto menu = vfc::solve_contract(types, cycles, c, e, kappa);
    const double a = e * kappa * cycles;
    CHECK(menu.items[0].f_hz == doctest::Approx(c / (2 * a)).epsilon(1e-9));
    CHECK(menu.items[0].w == doctest::Approx(a * menu.items[0].f_hz * menu.items[0].f_hz / 1e10));
}

TEST_CASE("capacity clamps the single-type optimum") {
    const std::vector<FvType> types = {{1e10, 3e9, 4.0}};
    const auto menu = vfc::solve_contract(types, 6e8, 1.2e-9, 1.0, 1e-28);
    CHECK(menu.items[0].f_hz == doctest::Approx(3e9));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(vfc::solve_contract({}, 1e9, 1e-9, 1.0, 1e-28), std::domain_error);
    CHECK_THROWS_AS(vfc::solve_contract({{2e9, 1e9, 1.0}, {1e9, 1e9, 1.0}}, 1e9, 1e-9, 1.0, 1e-28),
                    std::domain_error);
    CHECK_THROWS_AS(vfc::solve_contract({{1e9, 1e9, 1.0}}, 1e9, 0.0, 1.0, 1e-28),
                    std::domain_error);
}

TEST_CASE("menus satisfy IR, IC, and monotonicity on random instances") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> cyc(2e8, 1e9), price(5e-10, 5e-9);
    std::uniform_int_distribution<int> levels(2, 4);
    for (int trial = 0; trial < 60; ++trial) {
        const auto types = random_types(rng, levels(rng));
        const double cycles = cyc(rng), c = price(rng);
        const auto menu = vfc::solve_contract(types, cycles, c, 1.0, 1e-28);
        const auto report = vfc::verify_feasibility(menu, types, cycles, 1.0, 1e-28);
        CHECK(report.feasible(1e-9));
        CHECK(report.worst_ir_violation <= 1e-9);
        CHECK(report.worst_ic_violation <= 1e-9);
        for (size_t l = 0; l < types.size(); ++l)
            CHECK(menu.items[l].f_hz <= types[l].f_cap_hz * (1.0 + 1e-12));
        CHECK(menu.items.back().w < c);
    }
}

TEST_CASE("verify_feasibility flags a hand-broken menu") {
    const std::vector<FvType> types = {{1e9, 5e9, 2.0}, {3e9, 5e9, 2.0}};
    auto menu = vfc::solve_contract(types, 5e8, 1.2e-9, 1.0, 1e-28);
    menu.items[0].w = -1.0;  // breaks IR for the low type
    const auto report = vfc::verify_feasibility(menu, types, 5e8, 1.0, 1e-28);
    CHECK_FALSE(report.feasible(1e-9));
}

TEST_CASE("solver matches the exhaustive grid oracle on random L=3 instances") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> cyc(2e8, 1e9), price(5e-10, 5e-9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto types = random_types(rng, 3);
        const double cycles = cyc(rng), c = price(rng);
        const auto menu = vfc::solve_contract(types, cycles, c, 1.0, 1e-28);
        const double solver = vfc::mbs_utility(menu, types);
        const double oracle = grid_oracle_l3(types, cycles, c, 1.0, 1e-28);
        const double scale = std::max({1.0, std::abs(solver), std::abs(oracle)});
        CHECK(solver >= oracle - 1e-4 * scale);
    }
}

TEST_CASE("fv_allocation_for reads the bucket's item") {
    const std::vector<FvType> types = {{1e9, 2e9, 2.0}, {4e9, 8e9, 2.0}};
    const auto menu = vfc::solve_contract(types, 5e8, 1.2e-9, 1.0, 1e-28);
    CHECK(vfc::fv_allocation_for(menu, 0) == doctest::Approx(menu.items[0].f_hz));
    CHECK(vfc::fv_allocation_for(menu, 1) == doctest::Approx(menu.items[1].f_hz));
}
