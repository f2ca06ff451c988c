#include "svrp/experiment.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "svrp/estimate.hpp"

namespace svrp {

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::string> kClassicalSolvers{"cw", "tabu", "aco"};
const std::vector<std::string> kPolicySolvers{"rl-greedy", "rl-sample", "rl-beam"};

bool is_policy_solver(const std::string& name) { return name.rfind("rl-", 0) == 0; }

bool known_solver(const std::string& name) {
    const auto in = [&name](const std::vector<std::string>& xs) {
        return std::find(xs.begin(), xs.end(), name) != xs.end();
    };
    return in(kClassicalSolvers) || in(kPolicySolvers);
}

int solver_index(const std::string& name) {
    int idx = 0;
    for (const auto& s : {std::string("cw"), std::string("tabu"), std::string("aco"),
                          std::string("rl-greedy"), std::string("rl-sample"),
                          std::string("rl-beam")}) {
        ++idx;
        if (s == name) return idx;
    }
    return 0;
}

std::string mode_name(ObservationMode mode) {
    return mode == ObservationMode::a_priori ? "a_priori" : "reoptimization";
}

std::string ratio_name(const RatioTargets& r) {
    std::ostringstream os;
    os << r.a << '/' << r.b << '/' << r.gamma;
    return os.str();
}

struct RowAccum {
    double sum = 0.0, sumsq = 0.0;
    int n = 0;
    double wall = 0.0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double stddev() const {
        if (n == 0) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sumsq / n - m * m));
    }
};

// Test and k-NN pool sets plus the generator they came from. When a dataset
// directory is configured the sets come from disk and the generator is
// rebuilt from the stored calibration, so estimates always match the data.
struct Environment {
    GeneratorParams gen;
    ScenarioSet test;
    ScenarioSet pool;
    EstimateVector const_est;
    std::vector<EstimateVector> knn_est;  // per test scenario, filled when requested
};

Environment build_environment(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
    Environment env;
    if (cfg.dataset_dir.empty()) {
        env.gen = experiment_generator(cfg, n, seed);
        env.test = experiment_dataset(cfg, n, seed, "test", cfg.test_scenarios);
        if (cfg.estimator == "knn")
            env.pool = experiment_dataset(cfg, n, seed, "train", cfg.knn_pool);
    } else {
        const std::string test_path = dataset_path(cfg.dataset_dir, "test", n, seed);
        if (!std::filesystem::exists(test_path))
            throw std::invalid_argument("experiment: missing dataset " + test_path);
        env.test = load_jsonl(test_path);
        env.gen = params_from_calibration(env.test.calibration);
        if (env.gen.n_customers != n)
            throw std::invalid_argument("experiment: dataset " + test_path +
                                        " has the wrong instance size");
        if (cfg.estimator == "knn") {
            const std::string pool_path = dataset_path(cfg.dataset_dir, "train", n, seed);
            if (!std::filesystem::exists(pool_path))
                throw std::invalid_argument("experiment: missing dataset " + pool_path);
            env.pool = load_jsonl(pool_path);
        }
    }
    env.const_est = constant_estimate(env.gen);
    if (cfg.estimator == "knn") {
        env.knn_est.reserve(env.test.records.size());
        for (const auto& rec : env.test.records)
            env.knn_est.push_back(knn_estimate(rec.w, env.pool, cfg.knn_g));
    }
    return env;
}

const EstimateVector& estimate_for(const Environment& env, const ExperimentConfig& cfg,
                                   std::size_t scenario) {
    return cfg.estimator == "knn" ? env.knn_est[scenario] : env.const_est;
}

Plan classical_plan(const std::string& solver, const InstanceSpec& inst,
                    const EstimateVector& est, const ExperimentConfig& cfg, Rng& rng) {
    if (solver == "cw") return clarke_wright(inst, est);
    if (solver == "tabu") return tabu_search(inst, est, cfg.tabu, rng);
    if (solver == "aco") return aco(inst, est, cfg.aco, rng);
    throw std::invalid_argument("experiment: unknown classical solver " + solver);
}

DecodeConfig decode_config_for(const std::string& solver, const ExperimentConfig& cfg,
                               std::uint64_t seed) {
    DecodeConfig d;
    if (solver == "rl-greedy") {
        d.strategy = DecodeConfig::Strategy::greedy;
    } else if (solver == "rl-sample") {
        d.strategy = DecodeConfig::Strategy::sampling;
        d.n_samples = cfg.n_samples;
    } else if (solver == "rl-beam") {
        d.strategy = DecodeConfig::Strategy::beam;
        d.beam_width = cfg.beam_width;
    } else {
        throw std::invalid_argument("experiment: unknown policy solver " + solver);
    }
    d.seed = seed;
    return d;
}

ExperimentRow evaluate_classical(const std::string& solver, const InstanceSpec& inst,
                                 const Environment& env, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
    RowAccum acc;
    Plan cached;
    bool have_cached = false;
    const std::uint64_t stream = Rng::derive(seed, 0xC1A55ull * uz(solver_index(solver) + 1));
    for (std::size_t i = 0; i < env.test.records.size(); ++i) {
        const auto& rec = env.test.records[i];
        const EstimateVector& est = estimate_for(env, cfg, i);
        const Plan* plan = nullptr;
        if (cfg.estimator == "knn" || !have_cached) {
            Rng rng(Rng::derive(stream, i));
            const auto t0 = Clock::now();
            cached = classical_plan(solver, inst, est, cfg, rng);
            acc.wall += seconds_since(t0);
            have_cached = true;
        }
        plan = &cached;
        acc.add(evaluate_a_priori(*plan, inst, rec));
    }
    ExperimentRow row;
    row.label = cfg.label;
    row.solver = solver;
    row.n = inst.n_customers;
    row.k = inst.n_vehicles;
    row.mode = mode_name(ObservationMode::a_priori);
    row.seed = seed;
    row.scenarios = acc.n;
    row.mean_cost = acc.mean();
    row.std_cost = acc.stddev();
    row.wall_seconds = acc.wall;
    return row;
}

ExperimentRow evaluate_policy(const std::string& solver, const PolicyParams& policy,
                              const InstanceSpec& inst, const Environment& env,
                              const ExperimentConfig& cfg, ObservationMode mode,
                              std::uint64_t seed) {
    RowAccum acc;
    for (std::size_t i = 0; i < env.test.records.size(); ++i) {
        const auto& rec = env.test.records[i];
        const EstimateVector& est = estimate_for(env, cfg, i);
        const DecodeConfig dc = decode_config_for(solver, cfg, Rng::derive(seed, 0xDEC0DEull + i));
        const auto t0 = Clock::now();
        const Solution sol = decode(policy, inst, rec, est, dc, mode);
        acc.wall += seconds_since(t0);
        acc.add(sol.realized_cost);
    }
    ExperimentRow row;
    row.label = cfg.label;
    row.solver = solver;
    row.n = inst.n_customers;
    row.k = inst.n_vehicles;
    row.mode = mode_name(mode);
    row.seed = seed;
    row.scenarios = acc.n;
    row.mean_cost = acc.mean();
    row.std_cost = acc.stddev();
    row.wall_seconds = acc.wall;
    return row;
}

std::vector<std::pair<std::string, std::string>> config_pins(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> pins;
    const auto join_ints = [](const auto& xs) {
        std::ostringstream os;
        for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
        return os.str();
    };
    std::string modes;
    for (std::size_t i = 0; i < cfg.modes.size(); ++i)
        modes += (i ? "," : "") + mode_name(cfg.modes[i]);
    std::string solvers;
    for (std::size_t i = 0; i < cfg.solvers.size(); ++i)
        solvers += (i ? "," : "") + cfg.solvers[i];
    pins.emplace_back("demand_ratios", ratio_name(cfg.demand_ratios));
    pins.emplace_back("cost_ratios", ratio_name(cfg.cost_ratios));
    pins.emplace_back("fill_rate", std::to_string(cfg.fill_rate));
    pins.emplace_back("vehicles", join_ints(cfg.vehicles));
    pins.emplace_back("sizes", join_ints(cfg.sizes));
    pins.emplace_back("estimator", cfg.estimator);
    pins.emplace_back("delivery_mode",
                      cfg.delivery_mode == DeliveryMode::full ? "full" : "partial");
    pins.emplace_back("position_mode",
                      cfg.position_mode == PositionMode::fixed ? "fixed" : "flexible");
    pins.emplace_back("modes", modes);
    pins.emplace_back("solvers", solvers);
    pins.emplace_back("seeds", join_ints(cfg.seeds));
    pins.emplace_back("test_scenarios", std::to_string(cfg.test_scenarios));
    if (!cfg.checkpoint.empty()) pins.emplace_back("checkpoint", cfg.checkpoint);
    for (auto& kv : machine_descriptor()) pins.push_back(kv);
    return pins;
}

void write_header(std::ofstream& out,
                  const std::vector<std::pair<std::string, std::string>>& header) {
    for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
}

}  // namespace

std::vector<std::pair<std::string, std::string>> machine_descriptor() {
    std::vector<std::pair<std::string, std::string>> pins;
    utsname uts{};
    if (uname(&uts) == 0) {
        pins.emplace_back("machine", std::string(uts.sysname) + " " + uts.release + " " +
                                         uts.machine);
    }
#if defined(__VERSION__)
    pins.emplace_back("compiler", __VERSION__);
#endif
    pins.emplace_back("hardware_threads", std::to_string(std::thread::hardware_concurrency()));
    return pins;
}

GeneratorParams experiment_generator(const ExperimentConfig& config, int n,
                                     std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x9e3779b97f4a7c15ull));
    CalibrationSpec spec;
    spec.positions = sample_positions(n, rng);
    spec.demand_ratios = config.demand_ratios;
    spec.cost_ratios = config.cost_ratios;
    spec.demand_scale = 1.0;
    spec.calib_seed = seed;
    return calibrate(spec);
}

InstanceSpec experiment_instance(const ExperimentConfig& config, const GeneratorParams& gen,
                                 int k) {
    InstanceSpec inst;
    inst.positions = gen.positions;
    inst.n_customers = gen.n_customers;
    inst.n_vehicles = k;
    inst.fill_rate = config.fill_rate;
    inst.delivery_mode = config.delivery_mode;
    inst.position_mode = config.position_mode;
    inst.expected_total_demand = mean_total_demand(gen, 4096, Rng::derive(gen.calib_seed, 0xE57));
    inst.capacity = capacity_from_fill_rate(config.fill_rate, inst.expected_total_demand);
    return inst;
}

std::string dataset_path(const std::string& dir, const std::string& role, int n,
                         std::uint64_t seed) {
    std::ostringstream os;
    os << dir << '/' << role << "-n" << n << "-seed" << seed << ".jsonl";
    return os.str();
}

ScenarioSet experiment_dataset(const ExperimentConfig& config, int n, std::uint64_t seed,
                               const std::string& role, int count) {
    std::uint64_t stream = 0;
    if (role == "test")
        stream = Rng::derive(seed, 0x7e57);
    else if (role == "train")
        stream = Rng::derive(seed, 0xb001);
    else if (role == "val")
        stream = Rng::derive(seed, 0x7a1);
    else
        throw std::invalid_argument("experiment: unknown dataset role " + role);
    return generate_dataset(experiment_generator(config, n, seed), count, stream, role);
}

void ExperimentConfig::validate() const {
    if (sizes.empty()) throw std::invalid_argument("experiment: sizes must be nonempty");
    for (int n : sizes)
        if (n != 10 && n != 20 && n != 50 && n != 100)
            throw std::invalid_argument("experiment: sizes must be among {10, 20, 50, 100}");
    if (fill_rate <= 0.0) throw std::invalid_argument("experiment: fill_rate must be positive");
    if (vehicles.empty()) throw std::invalid_argument("experiment: vehicles must be nonempty");
    for (int k : vehicles)
        if (k < 1) throw std::invalid_argument("experiment: vehicles must be >= 1");
    if (estimator != "knn" && estimator != "constant")
        throw std::invalid_argument("experiment: estimator must be knn or constant");
    if (knn_g < 1) throw std::invalid_argument("experiment: knn_g must be >= 1");
    if (knn_pool < knn_g) throw std::invalid_argument("experiment: knn_pool must be >= knn_g");
    if (modes.empty()) throw std::invalid_argument("experiment: modes must be nonempty");
    if (solvers.empty()) throw std::invalid_argument("experiment: solvers must be nonempty");
    bool wants_policy = false;
    for (const auto& s : solvers) {
        if (!known_solver(s)) throw std::invalid_argument("experiment: unknown solver " + s);
        wants_policy = wants_policy || is_policy_solver(s);
    }
    if (seeds.empty()) throw std::invalid_argument("experiment: seeds must be nonempty");
    if (test_scenarios < 1)
        throw std::invalid_argument("experiment: test_scenarios must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("experiment: n_samples must be >= 1");
    if (beam_width < 1) throw std::invalid_argument("experiment: beam_width must be >= 1");
    if (rl_dim < 1) throw std::invalid_argument("experiment: rl_dim must be >= 1");
    if (wants_policy) {
        if (checkpoint.empty())
            throw std::invalid_argument("experiment: policy solvers need a checkpoint");
        if (!std::filesystem::exists(checkpoint))
            throw std::invalid_argument("experiment: missing checkpoint " + checkpoint);
    }
    if (!dataset_dir.empty() && !std::filesystem::is_directory(dataset_dir))
        throw std::invalid_argument("experiment: missing dataset directory " + dataset_dir);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.header = config_pins(config);

    PolicyParams policy;
    bool policy_loaded = false;
    for (const auto& s : config.solvers)
        if (is_policy_solver(s) && !policy_loaded) {
            policy = load_policy(config.checkpoint);
            policy_loaded = true;
        }

    for (int n : config.sizes) {
        if (policy_loaded && policy.n_customers != n)
            throw std::invalid_argument("experiment: checkpoint trained for " +
                                        std::to_string(policy.n_customers) +
                                        " customers cannot serve size " + std::to_string(n));
        for (std::uint64_t seed : config.seeds) {
            const Environment env = build_environment(config, n, seed);
            for (int k : config.vehicles) {
                const InstanceSpec inst = experiment_instance(config, env.gen, k);
                for (const auto& solver : config.solvers) {
                    if (is_policy_solver(solver)) {
                        for (ObservationMode mode : config.modes)
                            report.rows.push_back(
                                evaluate_policy(solver, policy, inst, env, config, mode, seed));
                    } else {
                        const bool wants_a_priori =
                            std::find(config.modes.begin(), config.modes.end(),
                                      ObservationMode::a_priori) != config.modes.end();
                        if (wants_a_priori)
                            report.rows.push_back(
                                evaluate_classical(solver, inst, env, config, seed));
                    }
                }
            }
        }
    }
    return report;
}

AblationReport correlation_ablation(const ExperimentConfig& config) {
    ExperimentConfig base = config;
    base.estimator = "knn";  // both estimator arms are evaluated explicitly
    base.validate();
    if (base.demand_ratios.b <= 0.0 && base.cost_ratios.b <= 0.0)
        throw std::invalid_argument("experiment: ablation needs a correlated base environment");
    if (base.checkpoint.empty() || !std::filesystem::exists(base.checkpoint))
        throw std::invalid_argument("experiment: ablation needs a policy checkpoint");

    const PolicyParams policy = load_policy(base.checkpoint);
    const int n = base.sizes.front();
    if (policy.n_customers != n)
        throw std::invalid_argument("experiment: ablation checkpoint does not match size");

    AblationReport report;
    report.header = config_pins(base);

    const auto decorrelate = [](RatioTargets r) {
        r.gamma += r.b;
        r.b = 0.0;
        return r;
    };

    for (const bool correlated : {true, false}) {
        ExperimentConfig cfg = base;
        cfg.label = correlated ? "correlated" : "uncorrelated";
        if (!correlated) {
            cfg.demand_ratios = decorrelate(cfg.demand_ratios);
            cfg.cost_ratios = decorrelate(cfg.cost_ratios);
        }
        for (std::uint64_t seed : cfg.seeds) {
            const Environment env = build_environment(cfg, n, seed);
            const InstanceSpec inst = experiment_instance(cfg, env.gen, cfg.vehicles.front());

            RowAccum rl_knn, rl_const, aco_knn, aco_const;
            Plan aco_const_plan;
            {
                Rng rng(Rng::derive(seed, 0xAC0ull));
                aco_const_plan = aco(inst, env.const_est, cfg.aco, rng);
            }
            for (std::size_t i = 0; i < env.test.records.size(); ++i) {
                const auto& rec = env.test.records[i];
                rl_knn.add(greedy_decode(policy, inst, rec, env.knn_est[i],
                                         ObservationMode::a_priori)
                               .realized_cost);
                rl_const.add(greedy_decode(policy, inst, rec, env.const_est,
                                           ObservationMode::a_priori)
                                 .realized_cost);
                Rng rng(Rng::derive(Rng::derive(seed, 0xAC1ull), i));
                const Plan p = aco(inst, env.knn_est[i], cfg.aco, rng);
                aco_knn.add(evaluate_a_priori(p, inst, rec));
                aco_const.add(evaluate_a_priori(aco_const_plan, inst, rec));
            }
            AblationRow row;
            row.environment = cfg.label;
            row.seed = seed;
            row.rl_knn = rl_knn.mean();
            row.rl_constant = rl_const.mean();
            row.aco_knn = aco_knn.mean();
            row.aco_constant = aco_const.mean();
            report.rows.push_back(row);
        }
    }
    return report;
}

TimingReport timing_bench(const ExperimentConfig& config) {
    config.validate();
    if (config.timing_instances < 20)
        throw std::invalid_argument("experiment: timing needs >= 20 instances per cell");

    TimingReport report;
    report.header = config_pins(config);
    report.header.emplace_back("timing_instances", std::to_string(config.timing_instances));
    report.header.emplace_back("rl_params", "untrained");

    const int warmup = 2;
    for (int n : config.sizes) {
        ExperimentConfig cfg = config;
        cfg.estimator = "constant";  // timing measures solvers, not estimate construction
        const std::uint64_t seed = cfg.seeds.front();
        ExperimentConfig one = cfg;
        one.test_scenarios = config.timing_instances + warmup;
        const Environment env = build_environment(one, n, seed);
        const InstanceSpec inst = experiment_instance(cfg, env.gen, cfg.vehicles.front());
        PolicyParams stand_in;
        bool have_policy = false;

        for (const auto& solver : config.solvers) {
            std::vector<double> secs;
            if (is_policy_solver(solver) && !have_policy) {
                stand_in = init_policy(n, cfg.rl_dim, Rng::derive(seed, uz(n)));
                have_policy = true;
            }
            for (int i = 0; i < config.timing_instances + warmup; ++i) {
                const auto& rec = env.test.records[uz(i)];
                const auto t0 = Clock::now();
                if (is_policy_solver(solver)) {
                    const DecodeConfig dc =
                        decode_config_for(solver, cfg, Rng::derive(seed, 0xD0ull + uz(i)));
                    decode(stand_in, inst, rec, env.const_est, dc,
                           ObservationMode::reoptimization);
                } else {
                    Rng rng(Rng::derive(seed, 0xE0ull + uz(i)));
                    classical_plan(solver, inst, env.const_est, cfg, rng);
                }
                if (i >= warmup) secs.push_back(seconds_since(t0));
            }
            std::sort(secs.begin(), secs.end());
            TimingRow row;
            row.solver = solver;
            row.n = n;
            row.samples = static_cast<int>(secs.size());
            const std::size_t mid = secs.size() / 2;
            row.median_seconds = secs.size() % 2 == 1
                                     ? secs[mid]
                                     : 0.5 * (secs[mid - 1] + secs[mid]);
            report.rows.push_back(row);
        }
    }
    return report;
}

void ExperimentReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out.precision(17);
    write_header(out, header);
    out << "label,solver,n,k,mode,seed,scenarios,mean_cost,std_cost,wall_seconds,"
           "seconds_per_instance\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.solver << ',' << r.n << ',' << r.k << ',' << r.mode << ','
            << r.seed << ',' << r.scenarios << ',' << r.mean_cost << ',' << r.std_cost << ','
            << r.wall_seconds << ',' << r.seconds_per_instance() << '\n';
}

void ExperimentReport::save_json(const std::string& path) const {
    nlohmann::json j;
    j["header"] = nlohmann::json::object();
    for (const auto& [k, v] : header) j["header"][k] = v;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["label"] = r.label;
        row["solver"] = r.solver;
        row["n"] = r.n;
        row["k"] = r.k;
        row["mode"] = r.mode;
        row["seed"] = r.seed;
        row["scenarios"] = r.scenarios;
        row["mean_cost"] = r.mean_cost;
        row["std_cost"] = r.std_cost;
        row["wall_seconds"] = r.wall_seconds;
        row["seconds_per_instance"] = r.seconds_per_instance();
        j["rows"].push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out << j.dump(2) << '\n';
}

void AblationReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out.precision(17);
    write_header(out, header);
    out << "environment,seed,rl_knn,rl_constant,aco_knn,aco_constant,rl_estimator_gap,"
           "rl_vs_aco_gap\n";
    for (const auto& r : rows)
        out << r.environment << ',' << r.seed << ',' << r.rl_knn << ',' << r.rl_constant << ','
            << r.aco_knn << ',' << r.aco_constant << ',' << r.rl_estimator_gap() << ','
            << r.rl_vs_aco_gap() << '\n';
}

void AblationReport::save_json(const std::string& path) const {
    nlohmann::json j;
    j["header"] = nlohmann::json::object();
    for (const auto& [k, v] : header) j["header"][k] = v;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["environment"] = r.environment;
        row["seed"] = r.seed;
        row["rl_knn"] = r.rl_knn;
        row["rl_constant"] = r.rl_constant;
        row["aco_knn"] = r.aco_knn;
        row["aco_constant"] = r.aco_constant;
        row["rl_estimator_gap"] = r.rl_estimator_gap();
        row["rl_vs_aco_gap"] = r.rl_vs_aco_gap();
        j["rows"].push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out << j.dump(2) << '\n';
}

void TimingReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out.precision(17);
    write_header(out, header);
    out << "solver,n,samples,median_seconds\n";
    for (const auto& r : rows)
        out << r.solver << ',' << r.n << ',' << r.samples << ',' << r.median_seconds << '\n';
}

void TimingReport::save_json(const std::string& path) const {
    nlohmann::json j;
    j["header"] = nlohmann::json::object();
    for (const auto& [k, v] : header) j["header"][k] = v;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["solver"] = r.solver;
        row["n"] = r.n;
        row["samples"] = r.samples;
        row["median_seconds"] = r.median_seconds;
        j["rows"].push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("experiment: cannot write " + path);
    out << j.dump(2) << '\n';
}

std::vector<ExperimentConfig> recipe_configs(const std::string& name,
                                             const ExperimentConfig& base) {
    std::vector<ExperimentConfig> out;
    const auto with = [&base](const std::string& label) {
        ExperimentConfig c = base;
        c.label = label;
        return c;
    };
    if (name == "baselines") {
        ExperimentConfig c = with("baselines");
        c.solvers = kClassicalSolvers;
        c.modes = {ObservationMode::a_priori};
        out.push_back(std::move(c));
    } else if (name == "inference") {
        ExperimentConfig c = with("inference");
        c.solvers = kPolicySolvers;
        c.modes = {ObservationMode::a_priori, ObservationMode::reoptimization};
        out.push_back(std::move(c));
    } else if (name == "estimators") {
        for (const std::string est : {"knn", "constant"}) {
            ExperimentConfig c = with(est);
            c.estimator = est;
            c.modes = {ObservationMode::a_priori};
            out.push_back(std::move(c));
        }
    } else if (name == "ratios") {
        for (const RatioTargets r :
             {RatioTargets{0.8, 0.2, 0.0}, RatioTargets{0.6, 0.2, 0.2},
              RatioTargets{0.4, 0.3, 0.3}}) {
            ExperimentConfig c = with(ratio_name(r));
            c.demand_ratios = r;
            c.cost_ratios = r;
            out.push_back(std::move(c));
        }
    } else if (name == "stochasticity") {
        const RatioTargets off{1.0, 0.0, 0.0};
        ExperimentConfig det = with("deterministic");
        det.demand_ratios = off;
        det.cost_ratios = off;
        ExperimentConfig demand_only = with("demand-only");
        demand_only.cost_ratios = off;
        ExperimentConfig cost_only = with("cost-only");
        cost_only.demand_ratios = off;
        ExperimentConfig both = with("both");
        out = {std::move(det), std::move(demand_only), std::move(cost_only), std::move(both)};
    } else if (name == "fill") {
        for (const double phi : {0.1, 0.5, 0.9}) {
            ExperimentConfig c = with("phi-" + std::to_string(phi).substr(0, 3));
            c.fill_rate = phi;
            out.push_back(std::move(c));
        }
    } else if (name == "vehicles") {
        ExperimentConfig c = with("vehicles");
        c.vehicles = {1, 2, 3, 5};
        out.push_back(std::move(c));
    } else {
        throw std::invalid_argument("experiment: unknown recipe " + name);
    }
    return out;
}

ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
    ExperimentConfig cfg;
    cfg.label = kv.get_string("label", cfg.label);
    cfg.sizes = kv.get_ints("sizes", cfg.sizes);
    const auto ratios = [&kv](const std::string& key, RatioTargets fallback) {
        const auto xs =
            kv.get_doubles(key, {fallback.a, fallback.b, fallback.gamma});
        if (xs.size() != 3)
            throw std::invalid_argument("config: key '" + key + "' needs three values");
        return RatioTargets{xs[0], xs[1], xs[2]};
    };
    cfg.demand_ratios = ratios("demand_ratios", cfg.demand_ratios);
    cfg.cost_ratios = ratios("cost_ratios", cfg.cost_ratios);
    cfg.fill_rate = kv.get_double("fill_rate", cfg.fill_rate);
    cfg.vehicles = kv.get_ints("vehicles", cfg.vehicles);
    cfg.estimator = kv.get_string("estimator", cfg.estimator);
    cfg.knn_g = kv.get_int("knn_g", cfg.knn_g);
    cfg.knn_pool = kv.get_int("knn_pool", cfg.knn_pool);
    const std::string position = kv.get_string("position_mode", "fixed");
    if (position == "fixed")
        cfg.position_mode = PositionMode::fixed;
    else if (position == "flexible")
        cfg.position_mode = PositionMode::flexible;
    else
        throw std::invalid_argument("config: position_mode must be fixed or flexible");
    const std::string delivery = kv.get_string("delivery_mode", "partial");
    if (delivery == "partial")
        cfg.delivery_mode = DeliveryMode::partial;
    else if (delivery == "full")
        cfg.delivery_mode = DeliveryMode::full;
    else
        throw std::invalid_argument("config: delivery_mode must be partial or full");
    cfg.modes.clear();
    for (const auto& m : kv.get_strings("modes", {"a_priori"})) {
        if (m == "a_priori")
            cfg.modes.push_back(ObservationMode::a_priori);
        else if (m == "reoptimization")
            cfg.modes.push_back(ObservationMode::reoptimization);
        else
            throw std::invalid_argument("config: unknown observation mode " + m);
    }
    cfg.solvers = kv.get_strings("solvers", cfg.solvers);
    cfg.seeds = kv.get_u64s("seeds", cfg.seeds);
    cfg.test_scenarios = kv.get_int("test_scenarios", cfg.test_scenarios);
    cfg.checkpoint = kv.get_string("checkpoint", cfg.checkpoint);
    cfg.dataset_dir = kv.get_string("dataset_dir", cfg.dataset_dir);
    cfg.tabu.k_max = kv.get_int("tabu_k_max", cfg.tabu.k_max);
    cfg.tabu.tenure = kv.get_int("tabu_tenure", cfg.tabu.tenure);
    cfg.tabu.candidates = kv.get_int("tabu_candidates", cfg.tabu.candidates);
    cfg.tabu.restart_after = kv.get_int("tabu_restart_after", cfg.tabu.restart_after);
    cfg.tabu.kick = kv.get_int("tabu_kick", cfg.tabu.kick);
    cfg.aco.pheromone_importance = kv.get_double("aco_pheromone", cfg.aco.pheromone_importance);
    cfg.aco.heuristic_importance = kv.get_double("aco_heuristic", cfg.aco.heuristic_importance);
    cfg.aco.n_ants = kv.get_int("aco_ants", cfg.aco.n_ants);
    cfg.aco.evaporation = kv.get_double("aco_evaporation", cfg.aco.evaporation);
    cfg.aco.iterations = kv.get_int("aco_iterations", cfg.aco.iterations);
    cfg.n_samples = kv.get_int("n_samples", cfg.n_samples);
    cfg.beam_width = kv.get_int("beam_width", cfg.beam_width);
    cfg.rl_dim = kv.get_int("rl_dim", cfg.rl_dim);
    cfg.timing_instances = kv.get_int("timing_instances", cfg.timing_instances);
    return cfg;
}

}  // namespace svrp
