#ifndef SVRP_TRAIN_HPP
#define SVRP_TRAIN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svrp/decode.hpp"
#include "svrp/policy.hpp"
#include "svrp/scenario.hpp"

namespace svrp {

struct TrainConfig {
    int n_customers = 10;
    int dim = 128;
    int batch_size = 64;
    int updates = 800;
    double policy_lr = 1e-4;
    double baseline_lr = 1e-3;
    double clip_norm = 2.0;
    std::uint64_t seed = 1;
    // Every validation_every updates the policy is scored by greedy decoding
    // over the held-out set (capped at validation_scenarios records); 0
    // disables periodic validation entirely.
    int validation_every = 50;
    int validation_scenarios = 500;
    // Rescale the batch advantages by 1/std. Off by default; a positive
    // rescale cannot change the direction of the batch gradient.
    bool normalize_advantages = false;
    std::string checkpoint_path;  // best-validation params land here when set

    void validate() const;  // throws std::invalid_argument on nonpositive sizes or rates
};

struct TrainReport {
    std::vector<double> mean_cost;      // per update, mean realized episode cost
    std::vector<double> policy_loss;    // per update, mean advantage-weighted log-prob
    std::vector<double> baseline_loss;  // per update, mean squared baseline error
    std::vector<double> elapsed;        // per update, wall seconds since start
    std::vector<int> validation_at;     // update indices where validation ran
    std::vector<double> validation_cost;
    int best_update = -1;  // update whose validation produced best_validation
    double best_validation = 0.0;
    double wall_seconds = 0.0;
    std::string checkpoint;  // path of the best-validation checkpoint, if written

    void save_csv(const std::string& path) const;
};

// Suffix sums of per-step incremental costs: out[t] is the cost-to-go from
// step t to the end of the episode, recourse surcharges included.
std::vector<double> suffix_returns(const std::vector<double>& step_costs);

// One decision's advantage is cost-to-go of its step minus the baseline
// value predicted at that decision. baselines[t] holds one entry per
// vehicle decision taken in step t. Throws std::invalid_argument when the
// episode is empty or the shapes disagree (incomplete recording).
std::vector<std::vector<double>> compute_advantages(
    const std::vector<double>& step_costs,
    const std::vector<std::vector<double>>& baselines);

// Adaptive moment estimation over a fixed group of parameter arrays. step()
// consumes the gradients accumulated in each Array and leaves them intact;
// the caller decides when to zero them.
class Adam {
public:
    Adam(std::vector<Array*> arrays, double lr);

    void step();
    double learning_rate() const { return lr_; }

private:
    std::vector<Array*> arrays_;
    double lr_;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

struct UpdateStats {
    double mean_cost = 0.0;
    double policy_loss = 0.0;
    double baseline_loss = 0.0;
};

// Rolls out one sampled episode per batch record under reoptimization
// observations and accumulates REINFORCE gradients into the parameter
// arrays: mean over episodes and decisions of advantage x grad log-prob for
// the policy, mean squared baseline error for the baseline head. Gradients
// are added to whatever is already in the arrays; no optimizer step is
// taken. Advantages enter the loss as constants, so the baseline head only
// learns from its regression term.
UpdateStats accumulate_batch_gradients(PolicyParams& params, const InstanceSpec& inst,
                                       std::span<const ScenarioRecord* const> batch,
                                       Rng& rng, bool normalize_advantages);

// One full REINFORCE update: zero grads, accumulate over the batch, clip
// each parameter group (network, baseline head) to clip_norm, and apply
// both optimizers. Throws std::runtime_error naming the offending array if
// any gradient or updated parameter is non-finite. An empty batch throws
// std::invalid_argument.
UpdateStats reinforce_update(PolicyParams& params, const InstanceSpec& inst,
                             std::span<const ScenarioRecord* const> batch,
                             Adam& policy_opt, Adam& baseline_opt, double clip_norm,
                             Rng& rng, bool normalize_advantages = false);

// Full training loop: fresh scenarios are drawn from train_set each update,
// periodic greedy validation runs on val_set, and the best-validation
// parameters are returned (and checkpointed when a path is configured).
// With zero updates the freshly initialized parameters come back untouched.
// Reproducible: every random draw derives from config.seed.
std::pair<PolicyParams, TrainReport> train(const TrainConfig& config, const InstanceSpec& inst,
                                           const ScenarioSet& train_set,
                                           const ScenarioSet& val_set);

}  // namespace svrp

#endif
