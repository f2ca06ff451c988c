// svrp: command line front end over the core library. Subcommands cover the
// dataset lifecycle (generate), single-instance solving (solve), policy
// training (train), experiment recipes (evaluate), and timing (bench-time).
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "svrp/classic.hpp"
#include "svrp/config.hpp"
#include "svrp/decode.hpp"
#include "svrp/env.hpp"
#include "svrp/estimate.hpp"
#include "svrp/experiment.hpp"
#include "svrp/policy.hpp"
#include "svrp/scenario.hpp"
#include "svrp/train.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    CLI::Option* seed_opt = nullptr;  // distinguishes an explicit seed from the default

    bool seed_given() const { return seed_opt != nullptr && seed_opt->count() > 0; }
};

// --config / --seed / --out are accepted by every subcommand; --seed falls
// back to the SVRP_SEED environment variable when the flag is absent.
void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value configuration file")
        ->check(CLI::ExistingFile);
    opts.seed_opt = cmd->add_option("--seed", opts.seed, "master seed")->envname("SVRP_SEED");
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
}

svrp::KeyValueConfig load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) return {};
    return svrp::KeyValueConfig::from_file(opts.config_path);
}

void warn_unread(const svrp::KeyValueConfig& kv) {
    const auto unread = kv.unread_keys();
    if (unread.empty()) return;
    std::cerr << "warning: unused config keys:";
    for (const auto& key : unread) std::cerr << ' ' << key;
    std::cerr << '\n';
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

void write_json_summary(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

struct GenerateOpts {
    int n = 10;
    int count = 1000;
    std::string role = "test";
};

int run_generate(const CommonOpts& common, const GenerateOpts& gen) {
    const svrp::KeyValueConfig kv = load_config(common);
    const svrp::ExperimentConfig base = svrp::experiment_from_config(kv);
    warn_unread(kv);
    const svrp::ScenarioSet set =
        svrp::experiment_dataset(base, gen.n, common.seed, gen.role, gen.count);
    fs::create_directories(common.out_dir);
    const std::string path = svrp::dataset_path(common.out_dir, gen.role, gen.n, common.seed);
    svrp::save_jsonl(set, path);
    std::cout << "wrote " << path << " (" << set.records.size() << " scenarios)\n";
    return 0;
}

struct SolveOpts {
    std::string solver = "cw";
    int n = 10;
    int k = 1;
    int scenario = 0;
    std::string mode = "a_priori";
    std::string checkpoint;
    std::string estimator;
    std::string solution_path;
};

bool is_policy_solver(const std::string& solver) {
    return solver == "rl-greedy" || solver == "rl-sample" || solver == "rl-beam";
}

int run_solve(const CommonOpts& common, const SolveOpts& so) {
    const svrp::KeyValueConfig kv = load_config(common);
    svrp::ExperimentConfig base = svrp::experiment_from_config(kv);
    warn_unread(kv);
    if (!so.checkpoint.empty()) base.checkpoint = so.checkpoint;
    if (!so.estimator.empty()) base.estimator = so.estimator;
    const svrp::ObservationMode mode = so.mode == "reoptimization"
                                           ? svrp::ObservationMode::reoptimization
                                           : svrp::ObservationMode::a_priori;
    if (!is_policy_solver(so.solver) && mode != svrp::ObservationMode::a_priori)
        throw std::invalid_argument("solve: classical solvers evaluate a-priori plans only");

    const svrp::GeneratorParams gen = svrp::experiment_generator(base, so.n, common.seed);
    const svrp::InstanceSpec inst = svrp::experiment_instance(base, gen, so.k);
    // Records are seeded per index, so generating scenario+1 of them yields
    // the same realization the full campaign test set holds at that index.
    const svrp::ScenarioSet test =
        svrp::experiment_dataset(base, so.n, common.seed, "test", so.scenario + 1);
    const svrp::ScenarioRecord& rec = test.records.back();

    svrp::EstimateVector est;
    if (base.estimator == "knn") {
        const svrp::ScenarioSet pool =
            svrp::experiment_dataset(base, so.n, common.seed, "train", base.knn_pool);
        est = svrp::knn_estimate(rec.w, pool, base.knn_g);
    } else {
        est = svrp::constant_estimate(gen);
    }

    svrp::Solution sol;
    if (is_policy_solver(so.solver)) {
        if (base.checkpoint.empty() || !fs::exists(base.checkpoint))
            throw std::invalid_argument("solve: missing checkpoint " + base.checkpoint);
        const svrp::PolicyParams params = svrp::load_policy(base.checkpoint);
        if (params.n_customers != so.n)
            throw std::invalid_argument("solve: checkpoint trained for " +
                                        std::to_string(params.n_customers) + " customers");
        svrp::DecodeConfig dc;
        if (so.solver == "rl-sample") {
            dc.strategy = svrp::DecodeConfig::Strategy::sampling;
            dc.n_samples = base.n_samples;
        } else if (so.solver == "rl-beam") {
            dc.strategy = svrp::DecodeConfig::Strategy::beam;
            dc.beam_width = base.beam_width;
        }
        dc.seed = svrp::Rng::derive(svrp::Rng::derive(common.seed, 0x502),
                                    static_cast<std::uint64_t>(so.scenario));
        sol = svrp::decode(params, inst, rec, est, dc, mode);
    } else {
        svrp::Rng rng(svrp::Rng::derive(svrp::Rng::derive(common.seed, 0x501),
                                        static_cast<std::uint64_t>(so.scenario)));
        svrp::Plan plan;
        if (so.solver == "cw")
            plan = svrp::clarke_wright(inst, est);
        else if (so.solver == "tabu")
            plan = svrp::tabu_search(inst, est, base.tabu, rng);
        else
            plan = svrp::aco(inst, est, base.aco, rng);
        svrp::evaluate_a_priori(plan, inst, rec, &sol);
    }

    std::cout.precision(17);
    std::cout << "solver=" << so.solver << " n=" << so.n << " k=" << so.k
              << " seed=" << common.seed << " scenario=" << so.scenario
              << " estimator=" << base.estimator << " mode=" << so.mode
              << " cost=" << sol.realized_cost << '\n';
    if (!so.solution_path.empty()) {
        std::ofstream out(so.solution_path);
        if (!out) throw std::runtime_error("cannot write " + so.solution_path);
        out << svrp::solution_to_json(sol) << '\n';
        std::cout << "wrote " << so.solution_path << '\n';
    }
    return 0;
}

struct TrainOpts {
    int n = 0;        // 0: take from config
    int updates = -1; // <0: take from config
    std::string checkpoint;
};

int run_train(const CommonOpts& common, const TrainOpts& to) {
    const svrp::KeyValueConfig kv = load_config(common);
    svrp::ExperimentConfig base = svrp::experiment_from_config(kv);

    svrp::TrainConfig tc;
    tc.n_customers = kv.get_int("train_n", tc.n_customers);
    tc.dim = kv.get_int("train_dim", tc.dim);
    tc.batch_size = kv.get_int("train_batch", tc.batch_size);
    tc.updates = kv.get_int("train_updates", tc.updates);
    tc.policy_lr = kv.get_double("train_policy_lr", tc.policy_lr);
    tc.baseline_lr = kv.get_double("train_baseline_lr", tc.baseline_lr);
    tc.clip_norm = kv.get_double("train_clip", tc.clip_norm);
    tc.validation_every = kv.get_int("train_validation_every", tc.validation_every);
    tc.validation_scenarios = kv.get_int("train_validation_scenarios", tc.validation_scenarios);
    tc.normalize_advantages = kv.get_bool("train_normalize_advantages", false);
    const int pool_count = kv.get_int("train_scenarios", 5000);
    const int k = kv.get_int("train_k", 1);
    std::string checkpoint = kv.get_string("train_checkpoint", "");
    warn_unread(kv);

    if (to.n > 0) tc.n_customers = to.n;
    if (to.updates >= 0) tc.updates = to.updates;
    if (!to.checkpoint.empty()) checkpoint = to.checkpoint;
    tc.seed = common.seed;
    const int n = tc.n_customers;
    const std::string stem = "n" + std::to_string(n) + "-seed" + std::to_string(common.seed);
    if (checkpoint.empty()) checkpoint = out_path(common, "policy-" + stem + ".json");
    tc.checkpoint_path = checkpoint;
    const bool validating = tc.validation_every > 0;

    svrp::ScenarioSet pool, val;
    if (base.dataset_dir.empty()) {
        pool = svrp::experiment_dataset(base, n, common.seed, "train", pool_count);
        if (validating)
            val = svrp::experiment_dataset(base, n, common.seed, "val", tc.validation_scenarios);
    } else {
        pool = svrp::load_jsonl(svrp::dataset_path(base.dataset_dir, "train", n, common.seed));
        if (validating)
            val = svrp::load_jsonl(svrp::dataset_path(base.dataset_dir, "val", n, common.seed));
    }
    const svrp::GeneratorParams gen = base.dataset_dir.empty()
                                          ? svrp::experiment_generator(base, n, common.seed)
                                          : svrp::params_from_calibration(pool.calibration);
    const svrp::InstanceSpec inst = svrp::experiment_instance(base, gen, k);

    auto [params, report] = svrp::train(tc, inst, pool, val);
    svrp::save_policy(checkpoint, params);
    const std::string csv = out_path(common, "train-" + stem + ".csv");
    report.save_csv(csv);

    nlohmann::json summary;
    summary["n_customers"] = n;
    summary["dim"] = tc.dim;
    summary["batch_size"] = tc.batch_size;
    summary["updates"] = tc.updates;
    summary["seed"] = common.seed;
    summary["episodes"] = static_cast<long>(tc.updates) * tc.batch_size;
    summary["wall_seconds"] = report.wall_seconds;
    summary["best_update"] = report.best_update;
    summary["best_validation"] = report.best_validation;
    summary["final_mean_cost"] = report.mean_cost.empty() ? 0.0 : report.mean_cost.back();
    summary["checkpoint"] = checkpoint;
    summary["csv"] = csv;
    const std::string json_path = out_path(common, "train-" + stem + ".json");
    write_json_summary(json_path, summary);

    std::cout.precision(6);
    std::cout << "trained " << tc.updates << " updates (" << tc.updates * tc.batch_size
              << " episodes) in " << report.wall_seconds << " s\n";
    if (report.best_update >= 0)
        std::cout << "best validation " << report.best_validation << " at update "
                  << report.best_update << '\n';
    std::cout << "wrote " << checkpoint << '\n'
              << "wrote " << csv << '\n'
              << "wrote " << json_path << '\n';
    return 0;
}

void print_experiment_rows(const svrp::ExperimentReport& report) {
    std::cout.precision(6);
    for (const auto& r : report.rows)
        std::cout << r.label << " solver=" << r.solver << " n=" << r.n << " k=" << r.k
                  << " mode=" << r.mode << " seed=" << r.seed << " mean=" << r.mean_cost
                  << " std=" << r.std_cost << '\n';
}

int run_evaluate(const CommonOpts& common, const std::string& recipe) {
    const svrp::KeyValueConfig kv = load_config(common);
    svrp::ExperimentConfig base = svrp::experiment_from_config(kv);
    warn_unread(kv);
    if (common.seed_given()) base.seeds = {common.seed};

    if (recipe == "ablation") {
        const svrp::AblationReport report = svrp::correlation_ablation(base);
        const std::string csv = out_path(common, "ablation.csv");
        const std::string json = out_path(common, "ablation.json");
        report.save_csv(csv);
        report.save_json(json);
        std::cout.precision(6);
        for (const auto& r : report.rows)
            std::cout << r.environment << " seed=" << r.seed << " rl_knn=" << r.rl_knn
                      << " rl_constant=" << r.rl_constant << " aco_knn=" << r.aco_knn
                      << " aco_constant=" << r.aco_constant << '\n';
        std::cout << "wrote " << csv << '\n' << "wrote " << json << '\n';
        return 0;
    }

    svrp::ExperimentReport merged;
    merged.header.emplace_back("recipe", recipe);
    {
        std::ostringstream seeds;
        for (std::size_t i = 0; i < base.seeds.size(); ++i)
            seeds << (i > 0 ? " " : "") << base.seeds[i];
        merged.header.emplace_back("seeds", seeds.str());
    }
    merged.header.emplace_back("test_scenarios", std::to_string(base.test_scenarios));
    for (auto& pin : svrp::machine_descriptor()) merged.header.push_back(std::move(pin));
    for (const svrp::ExperimentConfig& cfg : svrp::recipe_configs(recipe, base)) {
        svrp::ExperimentReport rep = svrp::run_experiment(cfg);
        merged.rows.insert(merged.rows.end(), rep.rows.begin(), rep.rows.end());
    }
    const std::string csv = out_path(common, recipe + ".csv");
    const std::string json = out_path(common, recipe + ".json");
    merged.save_csv(csv);
    merged.save_json(json);
    print_experiment_rows(merged);
    std::cout << "wrote " << csv << '\n' << "wrote " << json << '\n';
    return 0;
}

int run_bench_time(const CommonOpts& common, const std::vector<int>& sizes) {
    const svrp::KeyValueConfig kv = load_config(common);
    svrp::ExperimentConfig base = svrp::experiment_from_config(kv);
    warn_unread(kv);
    if (common.seed_given()) base.seeds = {common.seed};
    if (!sizes.empty()) base.sizes = sizes;

    const svrp::TimingReport report = svrp::timing_bench(base);
    const std::string csv = out_path(common, "timing.csv");
    const std::string json = out_path(common, "timing.json");
    report.save_csv(csv);
    report.save_json(json);
    std::cout.precision(6);
    for (const auto& r : report.rows)
        std::cout << r.solver << " n=" << r.n << " median_seconds=" << r.median_seconds
                  << " samples=" << r.samples << '\n';
    std::cout << "wrote " << csv << '\n' << "wrote " << json << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic vehicle routing laboratory"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CommonOpts common;

    auto* generate = app.add_subcommand("generate", "write a scenario dataset (JSON lines)");
    GenerateOpts gen_opts;
    add_common(generate, common);
    generate->add_option("--n", gen_opts.n, "customers per instance")
        ->check(CLI::PositiveNumber);
    generate->add_option("--count", gen_opts.count, "number of scenarios")
        ->check(CLI::PositiveNumber);
    generate->add_option("--role", gen_opts.role, "dataset role")
        ->check(CLI::IsMember({"test", "train", "val"}));

    auto* solve = app.add_subcommand("solve", "solve one scenario with one solver");
    SolveOpts solve_opts;
    add_common(solve, common);
    solve->add_option("--solver", solve_opts.solver, "solver")
        ->check(CLI::IsMember({"cw", "tabu", "aco", "rl-greedy", "rl-sample", "rl-beam"}));
    solve->add_option("--n", solve_opts.n, "customers")->check(CLI::PositiveNumber);
    solve->add_option("--k", solve_opts.k, "vehicles")->check(CLI::PositiveNumber);
    solve->add_option("--scenario", solve_opts.scenario, "test scenario index")
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--mode", solve_opts.mode, "observation mode")
        ->check(CLI::IsMember({"a_priori", "reoptimization"}));
    solve->add_option("--checkpoint", solve_opts.checkpoint, "policy checkpoint (rl solvers)");
    solve->add_option("--estimator", solve_opts.estimator, "estimate source")
        ->check(CLI::IsMember({"knn", "constant"}));
    solve->add_option("--solution", solve_opts.solution_path, "write the solution as JSON");

    auto* train = app.add_subcommand("train", "train a policy (train_* config keys)");
    TrainOpts train_opts;
    add_common(train, common);
    train->add_option("--n", train_opts.n, "customers (overrides train_n)")
        ->check(CLI::PositiveNumber);
    train->add_option("--updates", train_opts.updates, "updates (overrides train_updates)")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--checkpoint", train_opts.checkpoint, "checkpoint output path");

    auto* evaluate = app.add_subcommand("evaluate", "run a named experiment recipe");
    std::string recipe;
    add_common(evaluate, common);
    evaluate->add_option("--recipe", recipe, "recipe name")->required();

    auto* bench = app.add_subcommand("bench-time", "median per-instance solver seconds");
    std::vector<int> bench_sizes;
    add_common(bench, common);
    bench->add_option("--sizes", bench_sizes, "instance sizes (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return run_generate(common, gen_opts);
        if (solve->parsed()) return run_solve(common, solve_opts);
        if (train->parsed()) return run_train(common, train_opts);
        if (evaluate->parsed()) return run_evaluate(common, recipe);
        if (bench->parsed()) return run_bench_time(common, bench_sizes);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
