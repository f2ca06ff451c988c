#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "svrp/scenario.hpp"
#include "util.hpp"

using namespace svrp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("sample_weather replays identically for a fixed seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const WeatherSample wa = sample_weather(a);
        const WeatherSample wb = sample_weather(b);
        CHECK(wa == wb);
    }
}

TEST_CASE("sample_weather stays in range and has near-zero mean") {
    Rng rng(7);
    double mean[3] = {0.0, 0.0, 0.0};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const WeatherSample w = sample_weather(rng);
        for (int m = 0; m < 3; ++m) {
            CHECK(std::abs(w[m]) <= 1.0);
            mean[m] += w[m];
        }
    }
    for (int m = 0; m < 3; ++m) CHECK(std::abs(mean[m] / draws) <= 0.02);
}

TEST_CASE("calibrate with ratios (1,0,0) collapses to the constant term") {
    const auto params = calibrate(test::layout_spec(5, {1.0, 0.0, 0.0}, 11));
    for (int id = 0; id < params.n_variables(); ++id) {
        CHECK(params.sigma[id] == 0.0);
        for (double a : params.alpha[id]) CHECK(a == 0.0);
    }
    Rng rng(3);
    const auto rec = realize(params, sample_weather(rng), rng);
    for (double d : rec.demands) CHECK(d == 1.0);
    CHECK(rec.costs == params.base_cost);
}

TEST_CASE("calibrate with gamma = 0 produces zero noise") {
    const auto params = calibrate(test::layout_spec(4, {0.8, 0.2, 0.0}, 12));
    for (int id = 0; id < params.n_variables(); ++id) CHECK(params.sigma[id] == 0.0);
}

TEST_CASE("calibrate rejects bad ratio triples") {
    auto spec = test::layout_spec(3, {0.5, 0.2, 0.2}, 1);  // sums to 0.9
    CHECK_THROWS_AS(calibrate(spec), std::invalid_argument);
    spec.demand_ratios = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(calibrate(spec), std::invalid_argument);
    spec.demand_ratios = {1.2, -0.1, -0.1};
    CHECK_THROWS_AS(calibrate(spec), std::invalid_argument);
}

TEST_CASE("calibrate is deterministic in the spec") {
    const auto spec = test::layout_spec(4, {0.6, 0.2, 0.2}, 99);
    const auto p1 = calibrate(spec);
    const auto p2 = calibrate(spec);
    CHECK(p1.theta_bar == p2.theta_bar);
    CHECK(p1.alpha == p2.alpha);
    CHECK(p1.sigma == p2.sigma);
}

TEST_CASE("empirical ratios recover calibration targets within 0.05") {
    const RatioTargets targets[] = {
        {0.8, 0.0, 0.2}, {0.8, 0.2, 0.0}, {0.6, 0.2, 0.2}, {0.4, 0.3, 0.3}};
    int seed = 20;
    for (const RatioTargets& t : targets) {
        const auto params = calibrate(test::layout_spec(5, t, seed++));
        Rng rng(1234);
        const RatioTargets got = empirical_ratios(params, 10000, rng);
        CHECK(std::abs(got.a - t.a) <= 0.05);
        CHECK(std::abs(got.b - t.b) <= 0.05);
        CHECK(std::abs(got.gamma - t.gamma) <= 0.05);
        CHECK(std::abs(got.a + got.b + got.gamma - 1.0) <= 1e-6);
    }
}

TEST_CASE("empirical ratios on a constant-only generator are exactly (1,0,0)") {
    const auto params = test::manual_params(3, {{0.5, 0.5}, {0.1, 0.1}, {0.9, 0.9}, {0.3, 0.8}});
    Rng rng(5);
    const RatioTargets got = empirical_ratios(params, 1000, rng);
    CHECK(got.a == 1.0);
    CHECK(got.b == 0.0);
    CHECK(got.gamma == 0.0);
}

TEST_CASE("empirical ratios with only a weather term are (0,1,0)") {
    auto params = test::manual_params(1, {{0.5, 0.5}, {0.2, 0.2}});
    const int id = GeneratorParams::demand_var(1);
    params.theta_bar[id] = 0.0;
    params.alpha[id][4] = 1.5;  // w2*w2 coefficient
    Rng rng(5);
    const RatioTargets got = empirical_ratios(params, 1000, rng, VariableFamily::demand);
    CHECK(got.a == 0.0);
    CHECK(got.b == 1.0);
    CHECK(got.gamma == 0.0);
}

TEST_CASE("realize reproduces the hand-evaluated bilinear form") {
    auto params = test::manual_params(1, {{0.5, 0.5}, {0.25, 0.5}});
    params.alpha[GeneratorParams::demand_var(1)][0] = 2.0;  // alpha_11 on w1*w1
    Rng rng(0);
    const auto rec = realize(params, {0.5, 0.0, 0.0}, rng);
    CHECK(rec.demands[0] == 1.5);  // 1 + 2 * 0.25
}

TEST_CASE("realize with zero weather and zero noise returns the constant term") {
    auto params = calibrate(test::layout_spec(4, {0.8, 0.2, 0.0}, 31));
    Rng rng(0);
    const auto rec = realize(params, {0.0, 0.0, 0.0}, rng);
    for (double d : rec.demands) CHECK(d == doctest::Approx(1.0));
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            CHECK(rec.costs(i, j) == doctest::Approx(params.base_cost(i, j)));
}

TEST_CASE("realized records are nonnegative and symmetric with zero diagonal") {
    const auto params = calibrate(test::layout_spec(6, {0.4, 0.3, 0.3}, 77));
    Rng rng(123);
    for (int s = 0; s < 200; ++s) {
        const auto rec = realize(params, sample_weather(rng), rng);
        for (double d : rec.demands) CHECK(d >= 0.0);
        for (int i = 0; i <= 6; ++i) {
            CHECK(rec.costs(i, i) == 0.0);
            for (int j = 0; j <= 6; ++j) {
                CHECK(rec.costs(i, j) >= 0.0);
                CHECK(rec.costs(i, j) == rec.costs(j, i));
            }
        }
    }
}

TEST_CASE("generate_dataset produces the requested counts") {
    const auto params = calibrate(test::layout_spec(3, {0.6, 0.2, 0.2}, 8));
    CHECK(generate_dataset(params, 10000, 5, "train").records.size() == 10000);
    const auto test_set = generate_dataset(params, 1000, 6, "test");
    CHECK(test_set.records.size() == 1000);
    CHECK(test_set.role == "test");
}

TEST_CASE("same seed gives byte-identical serialized datasets") {
    const auto params = calibrate(test::layout_spec(4, {0.6, 0.2, 0.2}, 8));
    const auto a = generate_dataset(params, 50, 99, "train");
    const auto b = generate_dataset(params, 50, 99, "train");
    const std::string pa = "build_test_a.jsonl", pb = "build_test_b.jsonl";
    save_jsonl(a, pa);
    save_jsonl(b, pb);
    CHECK(slurp(pa) == slurp(pb));
    CHECK(!slurp(pa).empty());
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}

TEST_CASE("jsonl round trip preserves records and rebuilds the generator") {
    auto spec = test::layout_spec(4, {0.6, 0.2, 0.2}, 21);
    const auto params = calibrate(spec);
    const auto set = generate_dataset(params, 25, 7, "validation");
    const std::string path = "build_test_roundtrip.jsonl";
    save_jsonl(set, path);
    const auto loaded = load_jsonl(path);
    std::remove(path.c_str());
    CHECK(loaded.records == set.records);
    CHECK(loaded.role == "validation");
    CHECK(loaded.seed == 7);
    const auto rebuilt = params_from_calibration(loaded.calibration);
    CHECK(rebuilt.theta_bar == params.theta_bar);
    CHECK(rebuilt.alpha == params.alpha);
    CHECK(rebuilt.sigma == params.sigma);
}

TEST_CASE("B = 0 makes realizations independent of weather") {
    const auto params = calibrate(test::layout_spec(3, {0.8, 0.0, 0.2}, 13));
    const auto set = generate_dataset(params, 10000, 3, "train");
    for (int m = 0; m < 3; ++m) {
        double sw = 0, sd = 0, sww = 0, sdd = 0, swd = 0;
        const auto n = static_cast<double>(set.records.size());
        for (const auto& rec : set.records) {
            const double w = rec.w[m];
            const double d = rec.demands[0];
            sw += w;
            sd += d;
            sww += w * w;
            sdd += d * d;
            swd += w * d;
        }
        const double cov = swd / n - (sw / n) * (sd / n);
        const double var_w = sww / n - (sw / n) * (sw / n);
        const double var_d = sdd / n - (sd / n) * (sd / n);
        const double corr = cov / std::sqrt(var_w * var_d);
        CHECK(std::abs(corr) < 0.05);
    }
}

TEST_CASE("mean_total_demand matches the deterministic case exactly") {
    const auto params = calibrate(test::layout_spec(5, {1.0, 0.0, 0.0}, 2));
    CHECK(mean_total_demand(params, 64, 9) == doctest::Approx(5.0));
}

TEST_CASE("capacity_from_fill_rate follows the product rule") {
    CHECK(capacity_from_fill_rate(0.5, 20.0) == 10.0);
    CHECK(capacity_from_fill_rate(1.0, 20.0) == 20.0);
    CHECK(capacity_from_fill_rate(0.9, 20.0) / capacity_from_fill_rate(0.1, 20.0) ==
          doctest::Approx(9.0));
    CHECK_THROWS_AS(capacity_from_fill_rate(0.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(capacity_from_fill_rate(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("sample_positions pins the depot and stays on the unit square") {
    Rng rng(4);
    const auto pos = sample_positions(10, rng);
    REQUIRE(pos.size() == 11);
    CHECK(pos[0].x == 0.5);
    CHECK(pos[0].y == 0.5);
    for (const Vec2& p : pos) {
        CHECK(p.x >= 0.0);
        CHECK(p.x < 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y < 1.0);
    }
}

}  // TEST_SUITE
