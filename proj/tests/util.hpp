#ifndef SVRP_TESTS_UTIL_HPP
#define SVRP_TESTS_UTIL_HPP

#include <cstdint>

#include "svrp/env.hpp"
#include "svrp/instance.hpp"
#include "svrp/scenario.hpp"

namespace svrp::test {

// Default experimental layout: depot at the center, customers uniform.
inline CalibrationSpec layout_spec(int n_customers, RatioTargets ratios, std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x9e3779b97f4a7c15ull));
    CalibrationSpec spec;
    spec.positions = sample_positions(n_customers, rng);
    spec.demand_ratios = ratios;
    spec.cost_ratios = ratios;
    spec.demand_scale = 1.0;
    spec.calib_seed = seed;
    return spec;
}

inline InstanceSpec make_instance(const GeneratorParams& params, double fill_rate, int n_vehicles,
                                  DeliveryMode delivery = DeliveryMode::partial,
                                  ObservationMode observation = ObservationMode::a_priori) {
    InstanceSpec inst;
    inst.positions = params.positions;
    inst.n_customers = params.n_customers;
    inst.n_vehicles = n_vehicles;
    inst.fill_rate = fill_rate;
    inst.delivery_mode = delivery;
    inst.position_mode = PositionMode::fixed;
    inst.observation_mode = observation;
    inst.expected_total_demand = mean_total_demand(params, 4096, 0xE57ull);
    inst.capacity = capacity_from_fill_rate(fill_rate, inst.expected_total_demand);
    return inst;
}

// Deterministic single-variable generator for hand-checked realizations.
inline GeneratorParams manual_params(int n_customers, const std::vector<Vec2>& positions) {
    GeneratorParams p;
    p.n_customers = n_customers;
    p.positions = positions;
    p.base_cost = Mat(n_customers + 1, n_customers + 1);
    for (int i = 0; i <= n_customers; ++i)
        for (int j = 0; j <= n_customers; ++j)
            p.base_cost(i, j) = i == j ? 0.0 : euclidean(positions[i], positions[j]);
    const int v = p.n_variables();
    p.theta_bar.assign(v, 0.0);
    p.alpha.assign(v, std::array<double, 9>{});
    p.sigma.assign(v, 0.0);
    for (int i = 1; i <= n_customers; ++i) p.theta_bar[GeneratorParams::demand_var(i)] = 1.0;
    for (int i = 1; i <= n_customers; ++i)
        for (int j = 0; j <= n_customers; ++j)
            if (j != i) p.theta_bar[p.cost_var(i, j)] = p.base_cost(i, j);
    return p;
}

}  // namespace svrp::test

#endif
