#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vfc/config.hpp"

#include <doctest.h>

#include <sstream>

using vfc::ConfigError;
using vfc::ScenarioConfig;

namespace {
ScenarioConfig parse(const std::string& text) {
    std::istringstream in(text);
    return vfc::parse_config(in);
}
}  // namespace

TEST_CASE("defaults validate") { CHECK_NOTHROW(ScenarioConfig{}.validate()); }

TEST_CASE("empty input yields the defaults") {
    const auto cfg = parse("");
    CHECK(cfg.n_tvs == 30);
    CHECK(cfg.n_fvs == 12);
    CHECK(cfg.n_rsus == 3);
    CHECK(cfg.road_length_m == doctest::Approx(3000.0));
    CHECK(cfg.horizon_slots == 40);
}

TEST_CASE("units convert at ingestion") {
    const auto cfg = parse(
        "[scenario]\n"
        "fiber_rate_mbps = 1000\n"
        "[channel]\n"
        "bandwidth_mhz_min = 20\n"
        "bandwidth_mhz_max = 20\n"
        "noise_dbm = -98\n"
        "carrier_ghz = 5.9\n"
        "[task]\n"
        "input_kb_min = 300\n"
        "input_kb_max = 300\n"
        "gigacycles_min = 0.2\n"
        "[compute]\n"
        "f_rsu_ghz = 30\n");
    CHECK(cfg.fiber_rate_bps == doctest::Approx(1e9));
    CHECK(cfg.bandwidth_hz_min == doctest::Approx(20e6));
    CHECK(cfg.noise_w == doctest::Approx(1e-3 * std::pow(10.0, -9.8)));
    CHECK(cfg.carrier_hz == doctest::Approx(5.9e9));
    CHECK(cfg.input_bits_min == doctest::Approx(300.0 * 8000.0));  // kilobytes to bits
    CHECK(cfg.cycles_min == doctest::Approx(0.2e9));
    CHECK(cfg.f_rsu_hz == doctest::Approx(30e9));
}

TEST_CASE("comments and blank lines are ignored") {
    const auto cfg = parse("# top comment\n\n[scenario]\nn_tvs = 7  # trailing\n\n");
    CHECK(cfg.n_tvs == 7);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse("[scenario]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nosuch]\nn_tvs = 1\n"), ConfigError);
}

TEST_CASE("malformed lines are rejected") {
    CHECK_THROWS_AS(parse("[scenario\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nn_tvs\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nn_tvs = abc\n"), ConfigError);
}

TEST_CASE("validation names the offending field") {
    try {
        parse("[scenario]\nroad_length_m = -5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& ex) {
        CHECK(std::string(ex.what()).find("scenario.road_length_m") != std::string::npos);
    }
}

TEST_CASE("validation covers cross-field ranges") {
    CHECK_THROWS_AS(parse("[task]\ndeadline_s_min = 5\ndeadline_s_max = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[mobility]\nalpha = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[compute]\nkappa_tv = 0\n"), ConfigError);
}

TEST_CASE("type_probs parse and must match levels and sum to one") {
    const auto cfg = parse("[contract]\nlevels = 3\ntype_probs = 0.2, 0.3, 0.5\n");
    REQUIRE(cfg.type_probs.size() == 3);
    CHECK(cfg.type_probs[1] == doctest::Approx(0.3));
    CHECK_THROWS_AS(parse("[contract]\nlevels = 3\ntype_probs = 0.5, 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[contract]\nlevels = 2\ntype_probs = 0.9, 0.2\n"), ConfigError);
}

TEST_CASE("missing config file raises an io failure") {
    CHECK_THROWS_AS(vfc::load_config("/no/such/file.ini"), std::ios_base::failure);
}
