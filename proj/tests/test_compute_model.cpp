#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vfc/compute_model.hpp"

#include <doctest.h>

using vfc::OffloadDecision;
using vfc::Task;

namespace {
Task make_task() {
    Task t;
    t.input_bits = 4e6;
    t.output_bits = 4e5;
    t.cycles = 8e8;
    t.deadline_s = 1.5;
    return t;
}
}  // namespace

TEST_CASE("local delay is cycles over frequency") {
    CHECK(vfc::local_delay(make_task(), 1e9) == doctest::Approx(0.8));
    CHECK(vfc::local_delay(make_task(), 0.5e9) == doctest::Approx(1.6));
}

TEST_CASE("RSU offload delay sums upload, per-hop relay, and compute") {
    const auto d = vfc::rsu_offload_delay(make_task(), 2e7, 2, 1e9, 4e9);
    CHECK(d.upload_s == doctest::Approx(0.2));        // 4e6 / 2e7
    CHECK(d.relay_s == doctest::Approx(0.008));       // 2 * 4e6 / 1e9
    CHECK(d.compute_s == doctest::Approx(0.2));       // 8e8 / 4e9
    CHECK(d.total_s() == doctest::Approx(0.408));
}

TEST_CASE("zero-hop RSU offload has no relay term") {
    const auto d = vfc::rsu_offload_delay(make_task(), 2e7, 0, 1e9, 4e9);
    CHECK(d.relay_s == doctest::Approx(0.0));
}

TEST_CASE("FV offload delay sums upload and compute") {
    const auto d = vfc::fv_offload_delay(make_task(), 1e7, 2e9);
    CHECK(d.upload_s == doctest::Approx(0.4));
    CHECK(d.compute_s == doctest::Approx(0.4));
    CHECK(d.total_s() == doctest::Approx(0.8));
}

TEST_CASE("unreachable links are rejected") {
    CHECK_THROWS_AS(vfc::rsu_offload_delay(make_task(), 0.0, 0, 1e9, 1e9),
                    vfc::UnreachableLinkError);
    CHECK_THROWS_AS(vfc::fv_offload_delay(make_task(), 0.0, 1e9), vfc::UnreachableLinkError);
}

TEST_CASE("total delay selects the branch of the one-hot decision") {
    CHECK(vfc::total_delay(OffloadDecision::local(), 1.0, 2.0, 3.0) == doctest::Approx(1.0));
    CHECK(vfc::total_delay(OffloadDecision::rsu(0), 1.0, 2.0, 3.0) == doctest::Approx(2.0));
    CHECK(vfc::total_delay(OffloadDecision::fv(1), 1.0, 2.0, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("TV energy: dynamic CPU power locally, radio energy when offloading") {
    const Task t = make_task();
    // kappa C f^2 = 1e-28 * 8e8 * (1e9)^2 = 0.08 J
    CHECK(vfc::tv_energy(OffloadDecision::local(), t, 1e9, 1e-28, 0.1, 0.0) ==
          doctest::Approx(0.08));
    // p D / r = 0.1 * 4e6 / 2e7 = 0.02 J
    CHECK(vfc::tv_energy(OffloadDecision::rsu(0), t, 1e9, 1e-28, 0.1, 2e7) ==
          doctest::Approx(0.02));
    CHECK_THROWS_AS(vfc::tv_energy(OffloadDecision::fv(0), t, 1e9, 1e-28, 0.1, 0.0),
                    vfc::UnreachableLinkError);
}

TEST_CASE("server energy is kappa C f^2") {
    // 1e-28 * 8e8 * (4e9)^2 = 1.28 J
    CHECK(vfc::server_energy(make_task(), 4e9, 1e-28) == doctest::Approx(1.28));
}
