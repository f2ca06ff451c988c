#ifndef SVRP_CLASSIC_HPP
#define SVRP_CLASSIC_HPP

#include <vector>

#include "svrp/env.hpp"
#include "svrp/estimate.hpp"
#include "svrp/instance.hpp"
#include "svrp/rng.hpp"

namespace svrp {

struct SavingsEntry {
    int i = 0;
    int j = 0;
    double value = 0.0;
};

struct AcoParams {
    double pheromone_importance = 3.0;
    double heuristic_importance = 10.0;
    int n_ants = 12;
    double evaporation = 0.1;
    int iterations = 200;
};

struct TabuParams {
    int k_max = 120;
    int tenure = 0;           // 0: use ceil(sqrt(N))
    int candidates = 40;      // moves examined per iteration
    int restart_after = 0;    // non-improving iterations before kicking the incumbent;
                              // 0: use max(5, 200/N), negative: never kick
    int kick = 0;             // customers reinserted at random per kick; 0: use max(2, 2N/5)
};

double savings(int i, int j, const EstimateVector& estimates);

// All entries i < j, sorted by value descending, ties by (i, j).
std::vector<SavingsEntry> savings_list(const InstanceSpec& instance,
                                       const EstimateVector& estimates);

// Greedy route merging at exterior endpoints under the expected-capacity cap.
Plan clarke_wright(const InstanceSpec& instance, const EstimateVector& estimates);

Plan tabu_search(const InstanceSpec& instance, const EstimateVector& estimates,
                 const TabuParams& params, Rng& rng);

Plan aco(const InstanceSpec& instance, const EstimateVector& estimates, const AcoParams& params,
         Rng& rng);

// Expected cost of a plan under the estimates: the a-priori walk applied to
// the estimate values themselves (arcs plus estimate-implied recourse).
double plan_expected_cost(const Plan& plan, const InstanceSpec& instance,
                          const EstimateVector& estimates);

// Exhaustive permutations with an optimal contiguous capacity split; N <= 10.
Plan brute_force(const InstanceSpec& instance, const EstimateVector& estimates);

// Mean a-priori cost of each grid point on the validation set; argmin wins,
// ties broken by grid order.
AcoParams hyperparameter_search(const std::vector<AcoParams>& grid, const InstanceSpec& instance,
                                const ScenarioSet& validation, const EstimateVector& estimates,
                                std::uint64_t seed);

// Packs the estimates as a ScenarioRecord so a plan can be walked against
// them as if they were the truth.
ScenarioRecord as_record(const EstimateVector& estimates);
ScenarioRecord as_record(const EstimateVector& estimates, const WeatherSample& w);

}  // namespace svrp

#endif
