#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "svrp/estimate.hpp"
#include "util.hpp"

using namespace svrp;

namespace {

// Dataset with hand-placed weather points and constant per-record values.
ScenarioSet toy_dataset(const std::vector<WeatherSample>& ws, const std::vector<double>& demand) {
    ScenarioSet set;
    for (std::size_t r = 0; r < ws.size(); ++r) {
        ScenarioRecord rec;
        rec.w = ws[r];
        rec.demands = {demand[r]};
        rec.costs = Mat(2, 2);
        rec.costs(0, 1) = rec.costs(1, 0) = demand[r] / 10.0;
        set.records.push_back(rec);
    }
    return set;
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("constant estimate copies the expected values") {
    const auto params = calibrate(test::layout_spec(4, {0.6, 0.2, 0.2}, 3));
    const auto est = constant_estimate(params);
    CHECK(est.kind == EstimateKind::constant);
    REQUIRE(est.demand.size() == 4);
    for (double d : est.demand) CHECK(d == 1.0);
    CHECK(est.cost == params.base_cost);
}

TEST_CASE("knn reproduces the hand-computed inverse-distance weighting") {
    // Distances 0.5 and 1.0 from the query weigh the records 2:1, so values
    // 10 and 40 blend to (2*10 + 1*40) / 3 = 20.
    const auto set = toy_dataset({{0.5, 0.0, 0.0}, {0.0, 1.0, 0.0}}, {10.0, 40.0});
    const auto est = knn_estimate({0.0, 0.0, 0.0}, set, 2);
    CHECK(est.kind == EstimateKind::knn);
    CHECK(est.demand[0] == doctest::Approx(20.0));
    CHECK(est.cost(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("knn averages equidistant neighbors") {
    const auto set = toy_dataset({{0.5, 0.0, 0.0}, {-0.5, 0.0, 0.0}}, {10.0, 20.0});
    const auto est = knn_estimate({0.0, 0.0, 0.0}, set, 2);
    CHECK(est.demand[0] == doctest::Approx(15.0));
}

TEST_CASE("knn with g = 1 returns the nearest record") {
    const auto set = toy_dataset({{0.1, 0.0, 0.0}, {0.9, 0.0, 0.0}}, {10.0, 20.0});
    const auto est = knn_estimate({0.0, 0.0, 0.0}, set, 1);
    CHECK(est.demand[0] == 10.0);
}

TEST_CASE("knn returns an exact weather match verbatim") {
    const auto set = toy_dataset({{0.3, -0.2, 0.7}, {0.9, 0.0, 0.0}, {0.0, 0.4, 0.0}},
                                 {12.0, 20.0, 30.0});
    const auto est = knn_estimate({0.3, -0.2, 0.7}, set, 3);
    CHECK(est.demand[0] == 12.0);
    CHECK(est.cost(0, 1) == 1.2);
}

TEST_CASE("knn can exclude the queried record itself") {
    const auto set = toy_dataset({{0.3, 0.0, 0.0}, {0.5, 0.0, 0.0}}, {10.0, 20.0});
    const auto est = knn_estimate({0.3, 0.0, 0.0}, set, 1, 0);
    CHECK(est.demand[0] == 20.0);
}

TEST_CASE("knn validates its inputs") {
    const auto set = toy_dataset({{0.0, 0.0, 0.0}}, {10.0});
    CHECK_THROWS_AS(knn_estimate({0.0, 0.0, 0.0}, ScenarioSet{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(knn_estimate({0.0, 0.0, 0.0}, set, 2), std::invalid_argument);
    CHECK_THROWS_AS(knn_estimate({0.0, 0.0, 0.0}, set, 0), std::invalid_argument);
    CHECK_THROWS_AS(knn_estimate({0.0, 0.0, 0.0}, set, 1, 0), std::invalid_argument);
}

TEST_CASE("knn estimates are convex combinations of neighbor values") {
    const auto params = calibrate(test::layout_spec(5, {0.6, 0.2, 0.2}, 17));
    const auto set = generate_dataset(params, 200, 5, "train");
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const WeatherSample w = sample_weather(rng);
        const auto est = knn_estimate(w, set, 16);
        double lo = 1e300, hi = -1e300;
        // Bound by the dataset-wide extremes; the neighbor set is a subset.
        for (const auto& rec : set.records)
            for (double d : rec.demands) {
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        for (double d : est.demand) {
            CHECK(d >= lo - 1e-12);
            CHECK(d <= hi + 1e-12);
        }
    }
}

TEST_CASE("on a weather-independent environment knn approaches the constant estimate") {
    const auto params = calibrate(test::layout_spec(4, {0.8, 0.0, 0.2}, 23));
    const auto small = generate_dataset(params, 200, 11, "train");
    const auto large = generate_dataset(params, 8000, 11, "train");
    const auto ref = constant_estimate(params);
    Rng rng(7);
    double gap_small = 0.0, gap_large = 0.0;
    const int queries = 25;
    for (int t = 0; t < queries; ++t) {
        const WeatherSample w = sample_weather(rng);
        const auto es = knn_estimate(w, small, 8);
        const auto el = knn_estimate(w, large, 320);
        for (int i = 0; i < 4; ++i) {
            gap_small += std::abs(es.demand[i] - ref.demand[i]);
            gap_large += std::abs(el.demand[i] - ref.demand[i]);
        }
    }
    CHECK(gap_large < gap_small);
}

}  // TEST_SUITE
