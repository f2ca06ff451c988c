#ifndef SVRP_EXPERIMENT_HPP
#define SVRP_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svrp/classic.hpp"
#include "svrp/config.hpp"
#include "svrp/decode.hpp"
#include "svrp/scenario.hpp"

namespace svrp {

// One evaluation campaign: every requested solver runs on every test
// scenario of every (size, vehicles, seed) environment, classical planners
// under a-priori observations, policy decoders under every requested mode.
struct ExperimentConfig {
    std::string label;  // stamped on every row so merged reports stay self-describing
    std::vector<int> sizes{10};
    RatioTargets demand_ratios{0.6, 0.2, 0.2};
    RatioTargets cost_ratios{0.6, 0.2, 0.2};
    double fill_rate = 0.5;
    std::vector<int> vehicles{1};
    std::string estimator = "knn";  // knn | constant
    int knn_g = 16;
    int knn_pool = 1000;  // records searched by the k-NN estimator
    PositionMode position_mode = PositionMode::fixed;
    DeliveryMode delivery_mode = DeliveryMode::partial;
    std::vector<ObservationMode> modes{ObservationMode::a_priori};
    std::vector<std::string> solvers{"cw", "tabu", "aco"};
    std::vector<std::uint64_t> seeds{1};
    int test_scenarios = 1000;
    std::string checkpoint;   // policy parameters; required by rl-* solvers
    std::string dataset_dir;  // when set, datasets load from <dir>/<role>-n<N>-seed<S>.jsonl
    TabuParams tabu{};
    AcoParams aco{};
    int n_samples = 16;   // rl-sample rollouts
    int beam_width = 3;   // rl-beam width
    int rl_dim = 128;     // width of untrained stand-in policies (timing only)
    int timing_instances = 20;

    void validate() const;  // std::invalid_argument on bad fields or missing checkpoint file
};

struct ExperimentRow {
    std::string label;
    std::string solver;
    int n = 0;
    int k = 1;
    std::string mode;  // a_priori | reoptimization
    std::uint64_t seed = 0;
    int scenarios = 0;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double wall_seconds = 0.0;  // total solver/decoder time over the row

    double seconds_per_instance() const {
        return scenarios > 0 ? wall_seconds / scenarios : 0.0;
    }
};

struct ExperimentReport {
    // Environment pins (ratios, fill rate, modes, machine, ...) emitted as
    // leading `# key=value` lines so every CSV is self-describing.
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<ExperimentRow> rows;

    void save_csv(const std::string& path) const;
    void save_json(const std::string& path) const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// Same campaign twice: once on the configured (correlated) ratios and once
// with the weather share B folded into the white-noise share, everything
// else equal. Each row pairs k-NN against constant estimates for the
// a-priori policy decoder and for ACO.
struct AblationRow {
    std::string environment;  // correlated | uncorrelated
    std::uint64_t seed = 0;
    double rl_knn = 0.0;
    double rl_constant = 0.0;
    double aco_knn = 0.0;
    double aco_constant = 0.0;

    // Relative improvement the weather estimate buys the policy.
    double rl_estimator_gap() const { return (rl_constant - rl_knn) / rl_constant; }
    double rl_vs_aco_gap() const { return (aco_knn - rl_knn) / aco_knn; }
};

struct AblationReport {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<AblationRow> rows;

    void save_csv(const std::string& path) const;
    void save_json(const std::string& path) const;
};

AblationReport correlation_ablation(const ExperimentConfig& config);

// Median per-instance solve seconds per (solver, N) cell after warm-up.
// Policy rows use freshly initialized parameters of the configured width:
// decode cost does not depend on training, and trained checkpoints exist
// only for the sizes the training recipes cover.
struct TimingRow {
    std::string solver;
    int n = 0;
    int samples = 0;
    double median_seconds = 0.0;
};

struct TimingReport {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<TimingRow> rows;

    void save_csv(const std::string& path) const;
    void save_json(const std::string& path) const;
};

TimingReport timing_bench(const ExperimentConfig& config);

// os / compiler / core count pins for report headers.
std::vector<std::pair<std::string, std::string>> machine_descriptor();

// Deterministic environment pieces as the campaigns build them, shared with
// the CLI and the acceptance harness: a calibrated generator for one
// (size, seed) cell and the instance it induces.
GeneratorParams experiment_generator(const ExperimentConfig& config, int n, std::uint64_t seed);
InstanceSpec experiment_instance(const ExperimentConfig& config, const GeneratorParams& gen,
                                 int k);

// Dataset naming shared by campaigns, CLI, and tests: <dir>/<role>-n<N>-seed<S>.jsonl.
std::string dataset_path(const std::string& dir, const std::string& role, int n,
                         std::uint64_t seed);

// The dataset a campaign generates in memory for one (size, seed) cell;
// role is "test", "train" (the k-NN pool), or "val". Saving these under
// dataset_path reproduces the in-memory campaign bit for bit.
ScenarioSet experiment_dataset(const ExperimentConfig& config, int n, std::uint64_t seed,
                               const std::string& role, int count);

// Named preset campaigns (baselines, inference, estimators, ratios,
// stochasticity, fill, vehicles); unknown names throw std::invalid_argument.
// The base config supplies scale knobs (scenario counts, seeds, checkpoint).
std::vector<ExperimentConfig> recipe_configs(const std::string& name,
                                             const ExperimentConfig& base);

// Field-by-field overlay of a key=value file onto defaults.
ExperimentConfig experiment_from_config(const KeyValueConfig& kv);

}  // namespace svrp

#endif
