#ifndef SVRP_DECODE_HPP
#define SVRP_DECODE_HPP

#include <cstdint>

#include "svrp/classic.hpp"
#include "svrp/env.hpp"
#include "svrp/estimate.hpp"
#include "svrp/policy.hpp"

namespace svrp {

// Inference strategies over a trained policy. Under reoptimization the
// rollout runs on the realization; a priori it runs as a surrogate on the
// estimate record, and the extracted plan is then scored on the realization
// by evaluate_a_priori, so realized values never reach the network.
struct DecodeConfig {
    enum class Strategy { greedy, sampling, beam };
    Strategy strategy = Strategy::greedy;
    int n_samples = 16;
    int beam_width = 3;
    std::uint64_t seed = 0;
};

// Argmax action each step, ties broken toward the lowest node index.
Solution greedy_decode(const PolicyParams& policy, const InstanceSpec& inst,
                       const ScenarioRecord& scenario, const EstimateVector& estimates,
                       ObservationMode mode);

// Best of n_s stochastic rollouts by realized cost; per-sample seeds are
// drawn from rng up front, so a longer run extends a shorter one's samples.
Solution sample_decode(const PolicyParams& policy, const InstanceSpec& inst,
                       const ScenarioRecord& scenario, const EstimateVector& estimates,
                       int n_s, ObservationMode mode, Rng& rng);

// Keeps n_b partial rollouts ranked by cumulative log-probability. With
// several vehicles each step expands vehicle by vehicle, pruning back to n_b
// after every vehicle. Completed rollouts are banked; the final answer is
// the banked solution with the lowest realized cost. Width 1 reproduces
// greedy_decode exactly.
Solution beam_decode(const PolicyParams& policy, const InstanceSpec& inst,
                     const ScenarioRecord& scenario, const EstimateVector& estimates,
                     int n_b, ObservationMode mode);

Solution decode(const PolicyParams& policy, const InstanceSpec& inst,
                const ScenarioRecord& scenario, const EstimateVector& estimates,
                const DecodeConfig& config, ObservationMode mode);

// Feasible mask for vehicle k with customers already claimed by
// lower-indexed vehicles this round masked out; falls back to the raw mask
// when the claims would leave nothing feasible.
std::vector<char> coordinated_mask(const EnvState& state, const InstanceSpec& inst,
                                   int vehicle, const std::vector<int>& claimed);

}  // namespace svrp

#endif
