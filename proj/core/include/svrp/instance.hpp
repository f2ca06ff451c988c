#ifndef SVRP_INSTANCE_HPP
#define SVRP_INSTANCE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "svrp/rng.hpp"

namespace svrp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double euclidean(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

enum class DeliveryMode { full, partial };
enum class PositionMode { fixed, flexible };
enum class ObservationMode { a_priori, reoptimization };

// Static problem description. Node 0 is the depot.
struct InstanceSpec {
    std::vector<Vec2> positions;  // N+1 points in [0,1]^2, depot first
    int n_customers = 0;
    int n_vehicles = 1;
    double capacity = 0.0;
    double fill_rate = 0.5;
    DeliveryMode delivery_mode = DeliveryMode::partial;
    PositionMode position_mode = PositionMode::fixed;
    ObservationMode observation_mode = ObservationMode::a_priori;
    // Monte-Carlo estimate of E[sum_i xi_i]; used to derive capacity and the
    // episode step budget.
    double expected_total_demand = 0.0;

    int nodes() const { return n_customers + 1; }

    // Step budget: 4N + 4*ceil(E[total]/Q). Any honest episode is far shorter.
    int max_steps() const {
        const double trips = capacity > 0.0 ? std::ceil(expected_total_demand / capacity) : 1.0;
        return 4 * n_customers + 4 * static_cast<int>(trips);
    }
};

// Customers uniform on the unit square, depot pinned at (0.5, 0.5).
std::vector<Vec2> sample_positions(int n_customers, Rng& rng);

double capacity_from_fill_rate(double fill_rate, double expected_total_demand);

}  // namespace svrp

#endif
