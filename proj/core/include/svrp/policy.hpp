#ifndef SVRP_POLICY_HPP
#define SVRP_POLICY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svrp/env.hpp"
#include "svrp/instance.hpp"
#include "svrp/nn.hpp"
#include "svrp/scenario.hpp"

namespace svrp {

// Network weights plus the baseline value head, an affine map from
// [vehicle memory, mean-pooled node embeddings] to a scalar. One parameter
// set serves all vehicles; each vehicle keeps its own memory stream.
struct PolicyParams {
    LayerParams net;
    Array baseline_w;  // 2*dim x 1
    Array baseline_b;  // 1
    int n_customers = 0;

    std::vector<std::pair<std::string, Array*>> named();
    std::vector<std::pair<std::string, const Array*>> named() const;
};

// Node input rows are [w(3), remaining demand, cost row], so input_dim is
// n_customers + 5 and the lstm input [x, y, load/capacity] is width 3.
PolicyParams init_policy(int n_customers, int dim, std::uint64_t seed);

void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

// Coordinate encoding keeps the input width independent of instance size.
Vec2 encode_position(int node, const InstanceSpec& inst);

// What the agent is allowed to see at one decision point. The perceived
// record is the realization under reoptimization and the estimate record
// a priori; remaining demands come from the (matching) environment state.
struct Observation {
    Mat node_inputs;                  // (n+1) x (n+5)
    std::vector<double> loads;        // per vehicle
    std::vector<Vec2> positions_xy;   // per vehicle
    double capacity = 0.0;
    ObservationMode mode = ObservationMode::reoptimization;
};

Observation build_observation(const InstanceSpec& inst, const EnvState& state,
                              const ScenarioRecord& perceived, ObservationMode mode);

struct ForwardResult {
    std::vector<double> probs;
    std::vector<double> h_next, c_next;
    double baseline = 0.0;
};

// Reference forward pass for one vehicle: embed, one lstm step over
// [position, load/capacity], attention over nodes, masked softmax; the
// baseline head reads [new memory, pooled embeddings].
ForwardResult forward(const Observation& obs, const std::vector<double>& h,
                      const std::vector<double>& c, int vehicle,
                      const std::vector<char>& mask, const PolicyParams& params);

// Natural log of the action's probability; the action must be unmasked.
double log_prob(const std::vector<double>& probs, int action);

// Incremental forward for decoding: caches node embeddings and their W1
// projections, refreshing only rows whose perceived demand changed since the
// last step. Copyable, so beam candidates can fork mid-episode.
class FastPolicy {
public:
    FastPolicy() = default;
    FastPolicy(const PolicyParams& params, const InstanceSpec& inst);

    void begin(const ScenarioRecord& perceived);
    const std::vector<double>& step(const EnvState& state, int vehicle,
                                    const std::vector<char>& mask);

private:
    void refresh_rows(const std::vector<double>& demands);

    const PolicyParams* params_ = nullptr;
    const InstanceSpec* inst_ = nullptr;
    const ScenarioRecord* perceived_ = nullptr;
    Mat embeds_, w1e_;
    std::vector<double> snapshot_;
    std::vector<std::vector<double>> h_, c_;
    std::vector<double> probs_;
};

// Tape-recorded counterpart used by training. One tape spans a whole
// episode; embedding nodes are shared across steps until the underlying row
// changes, and leaf gradients accumulate into the parameter arrays.
class TapePolicy {
public:
    TapePolicy(PolicyParams& params, const InstanceSpec& inst);

    void begin(const ScenarioRecord& perceived);

    struct Step {
        Tape::Var probs;
        Tape::Var baseline;
        std::vector<double> prob_values;
        double baseline_value = 0.0;
    };

    Step step(const EnvState& state, int vehicle, const std::vector<char>& mask);
    Tape::Var log_prob(const Step& s, int action);
    Tape& tape() { return tape_; }

private:
    void make_leaves();
    void refresh_rows(const std::vector<double>& demands);

    PolicyParams* params_ = nullptr;
    const InstanceSpec* inst_ = nullptr;
    const ScenarioRecord* perceived_ = nullptr;
    Tape tape_;
    Tape::Var embed_w_, embed_b_, wi_, bi_, wf_, bf_, wo_, bo_, wc_, bc_, w1_, w2_, v_, bw_, bb_;
    std::vector<Tape::Var> embed_vars_, w1e_vars_;
    Mat embeds_;  // plain mirror of embedding values for the pooled baseline input
    std::vector<double> snapshot_;
    std::vector<Tape::Var> h_, c_;
};

}  // namespace svrp

#endif
