#include "svrp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svrp {

EstimateVector constant_estimate(const GeneratorParams& params) {
    EstimateVector est;
    est.kind = EstimateKind::constant;
    est.demand.assign(static_cast<std::size_t>(params.n_customers), params.demand_scale);
    est.cost = params.base_cost;
    return est;
}

EstimateVector knn_estimate(const WeatherSample& w, const ScenarioSet& dataset, int g,
                            int exclude_index) {
    const auto total = static_cast<int>(dataset.records.size());
    const int available = total - (exclude_index >= 0 && exclude_index < total ? 1 : 0);
    if (available <= 0) throw std::invalid_argument("knn_estimate: empty dataset");
    if (g < 1) throw std::invalid_argument("knn_estimate: g must be >= 1");
    if (g > available) throw std::invalid_argument("knn_estimate: g exceeds dataset size");

    std::vector<std::pair<double, int>> by_distance;
    by_distance.reserve(static_cast<std::size_t>(total));
    for (int r = 0; r < total; ++r) {
        if (r == exclude_index) continue;
        const WeatherSample& wr = dataset.records[static_cast<std::size_t>(r)].w;
        const double dx = wr[0] - w[0];
        const double dy = wr[1] - w[1];
        const double dz = wr[2] - w[2];
        by_distance.emplace_back(std::sqrt(dx * dx + dy * dy + dz * dz), r);
    }
    std::partial_sort(by_distance.begin(), by_distance.begin() + g, by_distance.end());

    const int n = dataset.n_customers();
    EstimateVector est;
    est.kind = EstimateKind::knn;
    est.demand.assign(static_cast<std::size_t>(n), 0.0);
    est.cost = Mat(n + 1, n + 1);

    // Exact weather match: the weighting's distance -> 0 limit is that record.
    if (by_distance.front().first == 0.0) {
        const ScenarioRecord& rec = dataset.records[static_cast<std::size_t>(by_distance.front().second)];
        est.demand = rec.demands;
        est.cost = rec.costs;
        return est;
    }

    double weight_sum = 0.0;
    for (int k = 0; k < g; ++k) {
        const auto& [dist, idx] = by_distance[static_cast<std::size_t>(k)];
        const double weight = 1.0 / dist;
        weight_sum += weight;
        const ScenarioRecord& rec = dataset.records[static_cast<std::size_t>(idx)];
        for (int i = 0; i < n; ++i) est.demand[static_cast<std::size_t>(i)] += weight * rec.demands[static_cast<std::size_t>(i)];
        for (std::size_t e = 0; e < est.cost.a.size(); ++e) est.cost.a[e] += weight * rec.costs.a[e];
    }
    for (double& d : est.demand) d /= weight_sum;
    for (double& c : est.cost.a) c /= weight_sum;
    return est;
}

}  // namespace svrp
