#ifndef SVRP_ESTIMATE_HPP
#define SVRP_ESTIMATE_HPP

#include "svrp/mat.hpp"
#include "svrp/scenario.hpp"

namespace svrp {

enum class EstimateKind { constant, knn };

struct EstimateVector {
    std::vector<double> demand;  // per customer, >= 0
    Mat cost;                    // (N+1)x(N+1), >= 0
    EstimateKind kind = EstimateKind::constant;
};

// theta_hat = theta_bar: expected demand per customer, Euclidean base costs.
EstimateVector constant_estimate(const GeneratorParams& params);

// Inverse-distance-weighted mean over the g nearest records in weather space.
// A zero-distance neighbor short-circuits to that record's values. exclude_index
// skips one record (a training scenario must not be its own neighbor).
EstimateVector knn_estimate(const WeatherSample& w, const ScenarioSet& dataset, int g,
                            int exclude_index = -1);

}  // namespace svrp

#endif
