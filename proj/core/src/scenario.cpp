#include "svrp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace svrp {

namespace {

constexpr int kCalibrationDraws = 20000;

// u = vec(w w^T), row-major 3x3.
std::array<double, 9> weather_products(const WeatherSample& w) {
    std::array<double, 9> u;
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) u[m * 3 + n] = w[m] * w[n];
    return u;
}

double dot9(const std::array<double, 9>& a, const std::array<double, 9>& b) {
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += a[k] * b[k];
    return s;
}

void validate_ratios(const RatioTargets& r, const char* what) {
    if (r.a < 0.0 || r.b < 0.0 || r.gamma < 0.0)
        throw std::invalid_argument(std::string(what) + ": ratio components must be >= 0");
    if (std::abs(r.a + r.b + r.gamma - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": ratios must sum to 1");
    if (r.a == 0.0)
        throw std::invalid_argument(std::string(what) +
                                    ": A = 0 unsupported, the constant term is fixed");
}

Mat euclidean_matrix(const std::vector<Vec2>& positions) {
    const int n = static_cast<int>(positions.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = i == j ? 0.0 : euclidean(positions[i], positions[j]);
    return m;
}

}  // namespace

int ScenarioSet::n_customers() const {
    return records.empty() ? 0 : static_cast<int>(records.front().demands.size());
}

WeatherSample sample_weather(Rng& rng) {
    return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

GeneratorParams calibrate(const CalibrationSpec& spec) {
    validate_ratios(spec.demand_ratios, "calibrate demand ratios");
    validate_ratios(spec.cost_ratios, "calibrate cost ratios");
    if (spec.demand_scale <= 0.0) throw std::invalid_argument("calibrate: demand_scale must be > 0");
    if (spec.noise_corr < 0.0 || spec.noise_corr >= 1.0)
        throw std::invalid_argument("calibrate: noise_corr must be in [0, 1)");
    if (spec.positions.size() < 2) throw std::invalid_argument("calibrate: need depot plus customers");

    GeneratorParams p;
    p.n_customers = static_cast<int>(spec.positions.size()) - 1;
    p.positions = spec.positions;
    p.demand_scale = spec.demand_scale;
    p.demand_ratios = spec.demand_ratios;
    p.cost_ratios = spec.cost_ratios;
    p.noise_corr = spec.noise_corr;
    p.calib_seed = spec.calib_seed;
    p.base_cost = euclidean_matrix(spec.positions);

    const int v = p.n_variables();
    p.theta_bar.assign(v, 0.0);
    p.alpha.assign(v, std::array<double, 9>{});
    p.sigma.assign(v, 0.0);

    Rng rng(spec.calib_seed);

    // Empirical second-moment matrix of u over the calibration draws; the
    // weather moment of alpha.u is then the quadratic form alpha^T M alpha.
    std::array<double, 81> moment{};
    for (int d = 0; d < kCalibrationDraws; ++d) {
        const auto u = weather_products(sample_weather(rng));
        for (int r = 0; r < 9; ++r)
            for (int c = 0; c < 9; ++c) moment[r * 9 + c] += u[r] * u[c];
    }
    for (double& x : moment) x /= kCalibrationDraws;

    auto quad_form = [&moment](const std::array<double, 9>& g) {
        double s = 0.0;
        for (int r = 0; r < 9; ++r) {
            double row = 0.0;
            for (int c = 0; c < 9; ++c) row += moment[r * 9 + c] * g[c];
            s += g[r] * row;
        }
        return s;
    };

    auto fill_variable = [&](int id, double theta, const RatioTargets& ratios) {
        p.theta_bar[id] = theta;
        if (theta == 0.0) return;
        if (ratios.b > 0.0) {
            std::array<double, 9> g;
            double q = 0.0;
            do {
                for (double& x : g) x = rng.normal();
                q = quad_form(g);
            } while (q <= 0.0);
            const double scale = std::sqrt((ratios.b / ratios.a) * theta * theta / q);
            for (int k = 0; k < 9; ++k) p.alpha[id][k] = scale * g[k];
        }
        if (ratios.gamma > 0.0) p.sigma[id] = std::sqrt(ratios.gamma / ratios.a) * std::abs(theta);
    };

    for (int i = 1; i <= p.n_customers; ++i)
        fill_variable(GeneratorParams::demand_var(i), spec.demand_scale, spec.demand_ratios);
    for (int i = 1; i <= p.n_customers; ++i)
        for (int j = 0; j <= p.n_customers; ++j) {
            if (j == i) continue;
            fill_variable(p.cost_var(i, j), p.base_cost(i, j), spec.cost_ratios);
        }
    return p;
}

GeneratorParams params_from_calibration(const CalibrationSpec& spec) { return calibrate(spec); }

ScenarioRecord realize(const GeneratorParams& params, const WeatherSample& w, Rng& rng) {
    const int n = params.n_customers;
    const auto u = weather_products(w);

    const double rho = params.noise_corr;
    const double shared = rho > 0.0 ? rng.normal() : 0.0;
    const double w_shared = std::sqrt(rho);
    const double w_own = std::sqrt(1.0 - rho);
    auto noise = [&](int id) {
        if (params.sigma[id] == 0.0) return 0.0;
        return params.sigma[id] * (w_shared * shared + w_own * rng.normal());
    };

    ScenarioRecord rec;
    rec.w = w;
    rec.demands.resize(n);
    for (int i = 1; i <= n; ++i) {
        const int id = GeneratorParams::demand_var(i);
        const double theta = params.theta_bar[id] + dot9(params.alpha[id], u) + noise(id);
        rec.demands[i - 1] = std::max(0.0, theta);
    }

    // Directed draws; pairs of customer arcs are averaged, depot arcs mirrored.
    Mat directed(n + 1, n + 1);
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (j == i) continue;
            const int id = params.cost_var(i, j);
            directed(i, j) = params.theta_bar[id] + dot9(params.alpha[id], u) + noise(id);
        }

    rec.costs = Mat(n + 1, n + 1);
    for (int i = 1; i <= n; ++i) {
        const double c = std::max(0.0, directed(i, 0));
        rec.costs(i, 0) = c;
        rec.costs(0, i) = c;
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const double c = std::max(0.0, 0.5 * (directed(i, j) + directed(j, i)));
            rec.costs(i, j) = c;
            rec.costs(j, i) = c;
        }
    return rec;
}

ScenarioSet generate_dataset(const GeneratorParams& params, int count, std::uint64_t seed,
                             const std::string& role) {
    if (count < 1) throw std::invalid_argument("generate_dataset: count must be >= 1");
    ScenarioSet set;
    set.seed = seed;
    set.role = role;
    set.calibration.positions = params.positions;
    set.calibration.demand_ratios = params.demand_ratios;
    set.calibration.cost_ratios = params.cost_ratios;
    set.calibration.demand_scale = params.demand_scale;
    set.calibration.noise_corr = params.noise_corr;
    set.calibration.calib_seed = params.calib_seed;
    set.records.reserve(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
        const WeatherSample w = sample_weather(rng);
        set.records.push_back(realize(params, w, rng));
    }
    return set;
}

RatioTargets empirical_ratios(const GeneratorParams& params, int n_draws, Rng& rng,
                              VariableFamily family) {
    if (n_draws < 1000) throw std::invalid_argument("empirical_ratios: need at least 10^3 draws");
    const int v = params.n_variables();
    const int n = params.n_customers;

    std::vector<int> ids;
    const int lo = family == VariableFamily::cost ? n : 0;
    const int hi = family == VariableFamily::demand ? n : v;
    for (int id = lo; id < hi; ++id)
        if (params.theta_bar[id] != 0.0 || params.sigma[id] != 0.0 ||
            dot9(params.alpha[id], params.alpha[id]) != 0.0)
            ids.push_back(id);
    if (ids.empty()) throw std::invalid_argument("empirical_ratios: no active variables");

    std::vector<double> weather_ms(ids.size(), 0.0);
    for (int d = 0; d < n_draws; ++d) {
        const auto u = weather_products(sample_weather(rng));
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const double term = dot9(params.alpha[ids[k]], u);
            weather_ms[k] += term * term;
        }
    }

    RatioTargets out{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const int id = ids[k];
        const double ma = params.theta_bar[id] * params.theta_bar[id];
        const double mb = weather_ms[k] / n_draws;
        const double mg = params.sigma[id] * params.sigma[id];
        const double total = ma + mb + mg;
        out.a += ma / total;
        out.b += mb / total;
        out.gamma += mg / total;
    }
    out.a /= static_cast<double>(ids.size());
    out.b /= static_cast<double>(ids.size());
    out.gamma /= static_cast<double>(ids.size());
    return out;
}

double mean_total_demand(const GeneratorParams& params, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("mean_total_demand: n_samples must be >= 1");
    double total = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(s)));
        const WeatherSample w = sample_weather(rng);
        const ScenarioRecord rec = realize(params, w, rng);
        for (double d : rec.demands) total += d;
    }
    return total / n_samples;
}

namespace {

using nlohmann::json;

json ratios_to_json(const RatioTargets& r) { return json::array({r.a, r.b, r.gamma}); }

RatioTargets ratios_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void save_jsonl(const ScenarioSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_jsonl: cannot open " + path);

    json positions = json::array();
    for (const Vec2& p : set.calibration.positions) positions.push_back(json::array({p.x, p.y}));
    json header = {
        {"kind", "svrp-scenarios"},
        {"seed", set.seed},
        {"role", set.role},
        {"count", set.records.size()},
        {"n_customers", set.n_customers()},
        {"calibration",
         {{"positions", positions},
          {"demand_ratios", ratios_to_json(set.calibration.demand_ratios)},
          {"cost_ratios", ratios_to_json(set.calibration.cost_ratios)},
          {"demand_scale", set.calibration.demand_scale},
          {"noise_corr", set.calibration.noise_corr},
          {"calib_seed", set.calibration.calib_seed}}},
    };
    out << header.dump() << '\n';
    for (const ScenarioRecord& rec : set.records) {
        json line = {{"w", rec.w}, {"demands", rec.demands}, {"costs", rec.costs.a}};
        out << line.dump() << '\n';
    }
    if (!out) throw std::runtime_error("save_jsonl: write failed for " + path);
}

ScenarioSet load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_jsonl: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_jsonl: empty file " + path);

    json header = json::parse(line);
    if (header.value("kind", "") != "svrp-scenarios")
        throw std::runtime_error("load_jsonl: not a scenario dataset: " + path);

    ScenarioSet set;
    set.seed = header.at("seed").get<std::uint64_t>();
    set.role = header.at("role").get<std::string>();
    const json& calib = header.at("calibration");
    for (const json& p : calib.at("positions"))
        set.calibration.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    set.calibration.demand_ratios = ratios_from_json(calib.at("demand_ratios"));
    set.calibration.cost_ratios = ratios_from_json(calib.at("cost_ratios"));
    set.calibration.demand_scale = calib.at("demand_scale").get<double>();
    set.calibration.noise_corr = calib.at("noise_corr").get<double>();
    set.calibration.calib_seed = calib.at("calib_seed").get<std::uint64_t>();

    const int n = header.at("n_customers").get<int>();
    const auto count = header.at("count").get<std::size_t>();
    set.records.reserve(count);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ScenarioRecord rec;
        const auto& w = j.at("w");
        rec.w = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()};
        rec.demands = j.at("demands").get<std::vector<double>>();
        rec.costs = Mat(n + 1, n + 1);
        rec.costs.a = j.at("costs").get<std::vector<double>>();
        if (static_cast<int>(rec.demands.size()) != n ||
            rec.costs.a.size() != static_cast<std::size_t>((n + 1) * (n + 1)))
            throw std::runtime_error("load_jsonl: record dimensions do not match header");
        set.records.push_back(std::move(rec));
    }
    if (set.records.size() != count)
        throw std::runtime_error("load_jsonl: record count does not match header");
    return set;
}

}  // namespace svrp
