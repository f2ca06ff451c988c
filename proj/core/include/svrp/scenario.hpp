#ifndef SVRP_SCENARIO_HPP
#define SVRP_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "svrp/instance.hpp"
#include "svrp/mat.hpp"
#include "svrp/rng.hpp"

namespace svrp {

// Three weather components (temperature, pressure, humidity proxies), each in [-1, 1].
using WeatherSample = std::array<double, 3>;

struct RatioTargets {
    double a = 1.0;
    double b = 0.0;
    double gamma = 0.0;

    bool operator==(const RatioTargets&) const = default;
};

// Everything needed to rebuild GeneratorParams deterministically; persisted in dataset headers.
struct CalibrationSpec {
    std::vector<Vec2> positions;
    RatioTargets demand_ratios;
    RatioTargets cost_ratios;
    double demand_scale = 1.0;
    double noise_corr = 0.0;
    std::uint64_t calib_seed = 0;
};

// Per-variable model: theta_i = theta_bar_i + sum_mn alpha_imn w_m w_n + eps_i.
// Variables are indexed demands first (customer i -> i-1), then directed cost
// draws row-major over i in [1..N], j in [0..N]; diagonal slots are inert.
struct GeneratorParams {
    int n_customers = 0;
    std::vector<Vec2> positions;
    double demand_scale = 1.0;
    RatioTargets demand_ratios;
    RatioTargets cost_ratios;
    double noise_corr = 0.0;
    std::uint64_t calib_seed = 0;
    Mat base_cost;  // symmetric Euclidean distances, zero diagonal

    std::vector<double> theta_bar;
    std::vector<std::array<double, 9>> alpha;
    std::vector<double> sigma;

    int n_variables() const { return n_customers + n_customers * (n_customers + 1); }
    static int demand_var(int customer) { return customer - 1; }
    int cost_var(int i, int j) const { return n_customers + (i - 1) * (n_customers + 1) + j; }
};

struct ScenarioRecord {
    WeatherSample w{};
    std::vector<double> demands;  // per customer, >= 0
    Mat costs;                    // (N+1)x(N+1), symmetric, zero diagonal, >= 0

    bool operator==(const ScenarioRecord&) const = default;
};

struct ScenarioSet {
    std::vector<ScenarioRecord> records;
    std::uint64_t seed = 0;
    std::string role;  // train / validation / test
    CalibrationSpec calibration;

    int n_customers() const;
};

WeatherSample sample_weather(Rng& rng);

// Rescales random alpha coefficients and noise sigmas so the second-moment
// shares (A, B, Gamma) of every variable hit the spec targets. Deterministic
// given the calibration spec. Rejects ratios that do not sum to 1 or have A = 0.
GeneratorParams calibrate(const CalibrationSpec& spec);

ScenarioRecord realize(const GeneratorParams& params, const WeatherSample& w, Rng& rng);

// Record r uses its own stream seeded with derive(seed, r), so generation is
// order-independent.
ScenarioSet generate_dataset(const GeneratorParams& params, int count, std::uint64_t seed,
                             const std::string& role);

enum class VariableFamily { all, demand, cost };

// Monte-Carlo estimate of the mean (A, B, Gamma) shares across variables.
RatioTargets empirical_ratios(const GeneratorParams& params, int n_draws, Rng& rng,
                              VariableFamily family = VariableFamily::all);

// Mean of the realized (clamped) total demand; used to derive capacity.
double mean_total_demand(const GeneratorParams& params, int n_samples, std::uint64_t seed);

void save_jsonl(const ScenarioSet& set, const std::string& path);
ScenarioSet load_jsonl(const std::string& path);

// Rebuilds the generator a dataset was produced with.
GeneratorParams params_from_calibration(const CalibrationSpec& spec);

}  // namespace svrp

#endif
