#ifndef SVRP_ENV_HPP
#define SVRP_ENV_HPP

#include <string>
#include <vector>

#include "svrp/instance.hpp"
#include "svrp/scenario.hpp"

namespace svrp {

struct EnvState {
    int t = 1;
    std::vector<double> demands;   // residual demand, customer i at index i-1
    std::vector<double> loads;     // q_k in [0, Q]
    std::vector<int> positions;    // node index per vehicle, 0 = depot
    bool done = false;

    // Observation bookkeeping: which realizations the decision-maker has seen.
    std::vector<char> visited;        // per customer
    std::vector<char> arc_traversed;  // (N+1)^2 row-major
};

struct RecourseEvent {
    int customer = 0;
    double surcharge = 0.0;
};

// A-priori plan: per-route ordered customer sequences, depot implicit.
struct Plan {
    std::vector<std::vector<int>> routes;
};

struct Solution {
    std::vector<std::vector<int>> tours;  // planned 0-delimited node sequence per vehicle
    std::vector<std::vector<int>> walks;  // executed sequence incl. recourse round trips
    std::vector<RecourseEvent> recourse;
    double realized_cost = 0.0;
};

struct StepResult {
    EnvState state;
    double cost = 0.0;  // sum of arc costs plus any recourse surcharge
    std::vector<RecourseEvent> recourse;
};

EnvState reset(const InstanceSpec& instance, const ScenarioRecord& scenario);

// Feasible next nodes for one vehicle. perceived_demands drives the
// full-delivery load rule (what the decision-maker believes); served/unserved
// status and loads come from the true state. A vehicle parked at the depot may
// stay there unless it is the lowest-indexed one while the whole fleet is
// parked and demand remains; that vehicle must move, which keeps K = 1
// semantics (depot masked whenever customers are unserved) and lets surplus
// vehicles idle at zero cost.
std::vector<char> feasible_mask(const EnvState& state, const InstanceSpec& instance,
                                const std::vector<double>& perceived_demands, int vehicle);

// Simultaneous move, processed in vehicle-index order: lower index serves
// first, a latecomer pays its arc and finds whatever demand remains. In full
// delivery mode a realization above the load triggers depot round trips at
// 2*c_0i each until the customer is served.
StepResult step(const EnvState& state, const InstanceSpec& instance,
                const ScenarioRecord& scenario, const std::vector<int>& actions);

// Walks a fixed plan against the realization: serve each customer to zero at
// its stop, paying 2*c_0i and refilling whenever the load runs out mid-service.
// Customers whose realized demand is zero may be omitted from the plan.
double evaluate_a_priori(const Plan& plan, const InstanceSpec& instance,
                         const ScenarioRecord& scenario, Solution* out = nullptr);

// Splits plan routes over vehicles round-robin; route r goes to vehicle r mod K.
std::vector<std::vector<int>> assign_routes(const Plan& plan, int n_vehicles);

std::string solution_to_json(const Solution& solution);
Solution solution_from_json(const std::string& text);

}  // namespace svrp

#endif
