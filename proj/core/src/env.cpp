#include "svrp/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace svrp {

namespace {

bool any_positive(const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

void check_dimensions(const InstanceSpec& instance, const ScenarioRecord& scenario) {
    const int n = instance.n_customers;
    if (static_cast<int>(scenario.demands.size()) != n ||
        scenario.costs.rows != n + 1 || scenario.costs.cols != n + 1)
        throw std::invalid_argument("env: scenario dimensions do not match instance");
}

void recompute_done(EnvState& s) {
    s.done = !any_positive(s.demands) &&
             std::all_of(s.positions.begin(), s.positions.end(), [](int p) { return p == 0; });
}

}  // namespace

EnvState reset(const InstanceSpec& instance, const ScenarioRecord& scenario) {
    check_dimensions(instance, scenario);
    if (instance.n_customers < 1 || instance.n_vehicles < 1 || instance.capacity <= 0.0)
        throw std::invalid_argument("env: invalid instance");
    EnvState s;
    s.t = 1;
    s.demands = scenario.demands;
    s.loads.assign(static_cast<std::size_t>(instance.n_vehicles), instance.capacity);
    s.positions.assign(static_cast<std::size_t>(instance.n_vehicles), 0);
    s.visited.assign(static_cast<std::size_t>(instance.n_customers), 0);
    s.arc_traversed.assign(static_cast<std::size_t>((instance.n_customers + 1) *
                                                    (instance.n_customers + 1)),
                           0);
    recompute_done(s);
    return s;
}

std::vector<char> feasible_mask(const EnvState& state, const InstanceSpec& instance,
                                const std::vector<double>& perceived_demands, int vehicle) {
    const int n = instance.n_customers;
    if (vehicle < 0 || vehicle >= instance.n_vehicles)
        throw std::invalid_argument("feasible_mask: bad vehicle index");
    if (static_cast<int>(perceived_demands.size()) != n)
        throw std::invalid_argument("feasible_mask: perceived demand size mismatch");

    std::vector<char> mask(static_cast<std::size_t>(n + 1), 0);
    const bool unserved = any_positive(state.demands);
    if (!unserved) {
        mask[0] = 1;  // everything served: funnel every vehicle home
        return mask;
    }

    const double q = state.loads[static_cast<std::size_t>(vehicle)];
    for (int i = 1; i <= n; ++i) {
        if (state.demands[static_cast<std::size_t>(i - 1)] <= 0.0) continue;
        if (instance.delivery_mode == DeliveryMode::full) {
            const double needed =
                std::min(perceived_demands[static_cast<std::size_t>(i - 1)], instance.capacity);
            if (q + 1e-12 < needed) continue;
        } else if (q <= 0.0) {
            continue;  // empty vehicle cannot make progress at a customer
        }
        mask[static_cast<std::size_t>(i)] = 1;
    }

    const bool at_depot = state.positions[static_cast<std::size_t>(vehicle)] == 0;
    if (!at_depot) {
        mask[0] = 1;
    } else {
        const bool fleet_parked =
            std::all_of(state.positions.begin(), state.positions.end(), [](int p) { return p == 0; });
        bool lowest_parked = true;
        for (int k = 0; k < vehicle; ++k)
            if (state.positions[static_cast<std::size_t>(k)] == 0) lowest_parked = false;
        const bool must_move = fleet_parked && lowest_parked;
        if (!must_move) mask[0] = 1;
    }
    return mask;
}

StepResult step(const EnvState& state, const InstanceSpec& instance,
                const ScenarioRecord& scenario, const std::vector<int>& actions) {
    check_dimensions(instance, scenario);
    const int n = instance.n_customers;
    const int k_fleet = instance.n_vehicles;
    if (static_cast<int>(actions.size()) != k_fleet)
        throw std::invalid_argument("step: one action per vehicle required");
    if (state.done) throw std::invalid_argument("step: episode already done");

    // Validate against the state-enforceable mask rules before any mutation.
    for (int k = 0; k < k_fleet; ++k) {
        const int a = actions[static_cast<std::size_t>(k)];
        if (a < 0 || a > n) throw std::invalid_argument("step: action out of range");
        const double q = state.loads[static_cast<std::size_t>(k)];
        if (a > 0) {
            if (state.demands[static_cast<std::size_t>(a - 1)] <= 0.0)
                throw std::invalid_argument("step: customer already served");
            if (instance.delivery_mode == DeliveryMode::partial && q <= 0.0)
                throw std::invalid_argument("step: empty vehicle sent to a customer");
        } else if (state.positions[static_cast<std::size_t>(k)] == 0) {
            const bool fleet_parked = std::all_of(state.positions.begin(), state.positions.end(),
                                                  [](int p) { return p == 0; });
            bool lowest_parked = true;
            for (int j = 0; j < k; ++j)
                if (state.positions[static_cast<std::size_t>(j)] == 0) lowest_parked = false;
            if (any_positive(state.demands) && fleet_parked && lowest_parked)
                throw std::invalid_argument("step: designated vehicle may not idle at the depot");
        }
    }

    StepResult result;
    result.state = state;
    EnvState& s = result.state;

    for (int k = 0; k < k_fleet; ++k) {
        const int from = s.positions[static_cast<std::size_t>(k)];
        const int to = actions[static_cast<std::size_t>(k)];
        result.cost += scenario.costs(from, to);
        s.arc_traversed[static_cast<std::size_t>(from * (n + 1) + to)] = 1;
        s.arc_traversed[static_cast<std::size_t>(to * (n + 1) + from)] = 1;
        s.positions[static_cast<std::size_t>(k)] = to;

        double& q = s.loads[static_cast<std::size_t>(k)];
        if (to == 0) {
            q = instance.capacity;
            continue;
        }
        s.visited[static_cast<std::size_t>(to - 1)] = 1;
        double& d = s.demands[static_cast<std::size_t>(to - 1)];
        const double delivered = std::min(d, q);
        d -= delivered;
        q -= delivered;
        if (instance.delivery_mode == DeliveryMode::full) {
            while (d > 0.0) {
                const double surcharge = 2.0 * scenario.costs(0, to);
                result.cost += surcharge;
                result.recourse.push_back({to, surcharge});
                q = instance.capacity;
                const double extra = std::min(d, q);
                d -= extra;
                q -= extra;
            }
        }
    }

    s.t = state.t + 1;
    recompute_done(s);
    return result;
}

std::vector<std::vector<int>> assign_routes(const Plan& plan, int n_vehicles) {
    if (n_vehicles < 1) throw std::invalid_argument("assign_routes: need at least one vehicle");
    std::vector<std::vector<int>> per_vehicle(static_cast<std::size_t>(n_vehicles));
    for (std::size_t r = 0; r < plan.routes.size(); ++r) {
        auto& tours = per_vehicle[r % static_cast<std::size_t>(n_vehicles)];
        for (int c : plan.routes[r]) tours.push_back(c);
        tours.push_back(0);  // return to depot between routes
    }
    return per_vehicle;
}

double evaluate_a_priori(const Plan& plan, const InstanceSpec& instance,
                         const ScenarioRecord& scenario, Solution* out) {
    check_dimensions(instance, scenario);
    const int n = instance.n_customers;

    std::vector<int> seen(static_cast<std::size_t>(n + 1), 0);
    for (const auto& route : plan.routes)
        for (int c : route) {
            if (c < 1 || c > n) throw std::invalid_argument("evaluate_a_priori: bad customer index");
            if (seen[static_cast<std::size_t>(c)]++)
                throw std::invalid_argument("evaluate_a_priori: customer visited twice");
        }
    for (int i = 1; i <= n; ++i)
        if (!seen[static_cast<std::size_t>(i)] && scenario.demands[static_cast<std::size_t>(i - 1)] > 0.0)
            throw std::invalid_argument("evaluate_a_priori: plan omits a customer with demand");

    const auto per_vehicle = assign_routes(plan, instance.n_vehicles);

    Solution solution;
    solution.tours.resize(per_vehicle.size());
    solution.walks.resize(per_vehicle.size());
    double total = 0.0;

    for (std::size_t k = 0; k < per_vehicle.size(); ++k) {
        auto& tour = solution.tours[k];
        auto& walk = solution.walks[k];
        tour.push_back(0);
        walk.push_back(0);
        int pos = 0;
        double q = instance.capacity;
        for (int node : per_vehicle[k]) {
            tour.push_back(node);
            if (node == pos && node == 0) continue;  // collapse empty trailing routes
            total += scenario.costs(pos, node);
            walk.push_back(node);
            pos = node;
            if (node == 0) {
                q = instance.capacity;
                continue;
            }
            double d = scenario.demands[static_cast<std::size_t>(node - 1)];
            double delivered = std::min(d, q);
            d -= delivered;
            q -= delivered;
            while (d > 0.0) {
                const double surcharge = 2.0 * scenario.costs(0, node);
                total += surcharge;
                solution.recourse.push_back({node, surcharge});
                walk.push_back(0);
                walk.push_back(node);
                q = instance.capacity;
                delivered = std::min(d, q);
                d -= delivered;
                q -= delivered;
            }
        }
        if (pos != 0) {
            total += scenario.costs(pos, 0);
            walk.push_back(0);
        }
        if (tour.back() != 0) tour.push_back(0);
    }

    solution.realized_cost = total;
    if (out) *out = std::move(solution);
    return total;
}

std::string solution_to_json(const Solution& solution) {
    nlohmann::json j;
    j["tours"] = solution.tours;
    j["walks"] = solution.walks;
    j["recourse"] = nlohmann::json::array();
    for (const RecourseEvent& e : solution.recourse)
        j["recourse"].push_back({{"customer", e.customer}, {"surcharge", e.surcharge}});
    j["realized_cost"] = solution.realized_cost;
    return j.dump();
}

Solution solution_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Solution s;
    s.tours = j.at("tours").get<std::vector<std::vector<int>>>();
    s.walks = j.at("walks").get<std::vector<std::vector<int>>>();
    for (const auto& e : j.at("recourse"))
        s.recourse.push_back({e.at("customer").get<int>(), e.at("surcharge").get<double>()});
    s.realized_cost = j.at("realized_cost").get<double>();
    return s;
}

}  // namespace svrp
