#include "svrp/instance.hpp"

#include <stdexcept>

namespace svrp {

std::vector<Vec2> sample_positions(int n_customers, Rng& rng) {
    if (n_customers < 1) throw std::invalid_argument("sample_positions: n_customers must be >= 1");
    std::vector<Vec2> pos(static_cast<std::size_t>(n_customers) + 1);
    pos[0] = {0.5, 0.5};
    for (int i = 1; i <= n_customers; ++i) {
        pos[i].x = rng.uniform();
        pos[i].y = rng.uniform();
    }
    return pos;
}

double capacity_from_fill_rate(double fill_rate, double expected_total_demand) {
    if (fill_rate <= 0.0) throw std::invalid_argument("capacity_from_fill_rate: fill rate must be > 0");
    if (expected_total_demand <= 0.0)
        throw std::invalid_argument("capacity_from_fill_rate: expected total demand must be > 0");
    return fill_rate * expected_total_demand;
}

}  // namespace svrp
