#include "svrp/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "svrp/classic.hpp"
#include "svrp/estimate.hpp"

namespace svrp {

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

int sample_action(const std::vector<double>& probs, const std::vector<char>& mask, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    int last = -1;
    for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
        if (!mask[uz(a)]) continue;
        last = a;
        acc += probs[uz(a)];
        if (u < acc) return a;
    }
    if (last < 0) throw std::runtime_error("train: no feasible action");
    return last;
}

struct Decision {
    Tape::Var logp;
    Tape::Var baseline;
    double baseline_value = 0.0;
    double logp_value = 0.0;
    int step = 0;
};

struct Episode {
    std::vector<Decision> decisions;
    std::vector<double> step_costs;
};

// One sampled episode under reoptimization observations, recorded on the
// policy's tape. The tape stays valid until the next begin().
Episode rollout_episode(TapePolicy& tp, const InstanceSpec& inst, const ScenarioRecord& rec,
                        Rng& rng) {
    tp.begin(rec);
    EnvState s = reset(inst, rec);
    Episode ep;
    int guard = 0;
    while (!s.done) {
        if (++guard > inst.max_steps())
            throw std::runtime_error("train: exceeded step budget");
        std::vector<int> actions;
        for (int k = 0; k < inst.n_vehicles; ++k) {
            const auto mask = coordinated_mask(s, inst, k, actions);
            auto out = tp.step(s, k, mask);
            const int a = sample_action(out.prob_values, mask, rng);
            Decision d;
            d.logp = tp.log_prob(out, a);
            d.baseline = out.baseline;
            d.baseline_value = out.baseline_value;
            d.logp_value = std::log(out.prob_values[uz(a)]);
            d.step = static_cast<int>(ep.step_costs.size());
            ep.decisions.push_back(d);
            actions.push_back(a);
        }
        StepResult res = step(s, inst, rec, actions);
        ep.step_costs.push_back(res.cost);
        s = std::move(res.state);
    }
    return ep;
}

std::vector<Array*> network_arrays(PolicyParams& params) {
    std::vector<Array*> out;
    for (auto& [name, arr] : params.net.named()) out.push_back(arr);
    return out;
}

std::vector<Array*> baseline_arrays(PolicyParams& params) {
    return {&params.baseline_w, &params.baseline_b};
}

// Scales the group's gradient down to max_norm when it exceeds it. Rejects
// non-finite gradients before they can reach the optimizer.
void clip_gradients(PolicyParams& params, const std::vector<Array*>& group, double max_norm) {
    double sq = 0.0;
    for (const Array* a : group)
        for (double g : a->grad) sq += g * g;
    if (!std::isfinite(sq)) {
        for (auto& [name, arr] : params.named())
            for (double g : arr->grad)
                if (!std::isfinite(g))
                    throw std::runtime_error("train: non-finite gradient in " + name);
        throw std::runtime_error("train: non-finite gradient norm");
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double f = max_norm / norm;
        for (Array* a : group)
            for (double& g : a->grad) g *= f;
    }
}

void check_finite_params(const PolicyParams& params) {
    for (auto& [name, arr] : params.named())
        for (double x : arr->data)
            if (!std::isfinite(x))
                throw std::runtime_error("train: non-finite parameter in " + name);
}

double validation_cost(const PolicyParams& params, const InstanceSpec& inst,
                       const ScenarioSet& val_set, const EstimateVector& est, int cap) {
    const int n = std::min<int>(cap, static_cast<int>(val_set.records.size()));
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        total += greedy_decode(params, inst, val_set.records[uz(i)], est,
                               ObservationMode::reoptimization)
                     .realized_cost;
    return total / n;
}

}  // namespace

void TrainConfig::validate() const {
    if (n_customers < 1) throw std::invalid_argument("train config: n_customers must be >= 1");
    if (dim < 1) throw std::invalid_argument("train config: dim must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (updates < 0) throw std::invalid_argument("train config: updates must be >= 0");
    if (policy_lr <= 0.0 || baseline_lr <= 0.0)
        throw std::invalid_argument("train config: learning rates must be positive");
    if (clip_norm <= 0.0) throw std::invalid_argument("train config: clip_norm must be positive");
    if (validation_every < 0)
        throw std::invalid_argument("train config: validation_every must be >= 0");
    if (validation_scenarios < 1)
        throw std::invalid_argument("train config: validation_scenarios must be >= 1");
}

std::vector<double> suffix_returns(const std::vector<double>& step_costs) {
    std::vector<double> out(step_costs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = step_costs.size(); i-- > 0;) {
        acc += step_costs[i];
        out[i] = acc;
    }
    return out;
}

std::vector<std::vector<double>> compute_advantages(
    const std::vector<double>& step_costs, const std::vector<std::vector<double>>& baselines) {
    if (step_costs.empty()) throw std::invalid_argument("compute_advantages: empty episode");
    if (baselines.size() != step_costs.size())
        throw std::invalid_argument("compute_advantages: baseline shape mismatch");
    const auto returns = suffix_returns(step_costs);
    std::vector<std::vector<double>> adv(baselines.size());
    for (std::size_t t = 0; t < baselines.size(); ++t) {
        adv[t].reserve(baselines[t].size());
        for (double b : baselines[t]) adv[t].push_back(returns[t] - b);
    }
    return adv;
}

Adam::Adam(std::vector<Array*> arrays, double lr) : arrays_(std::move(arrays)), lr_(lr) {
    if (lr_ <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
    for (Array* a : arrays_) {
        a->ensure_grad();
        m_.emplace_back(a->data.size(), 0.0);
        v_.emplace_back(a->data.size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < arrays_.size(); ++i) {
        Array* a = arrays_[i];
        for (std::size_t j = 0; j < a->data.size(); ++j) {
            const double g = a->grad[j];
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
            a->data[j] -= lr_ * (m_[i][j] / bc1) / (std::sqrt(v_[i][j] / bc2) + eps_);
        }
    }
}

UpdateStats accumulate_batch_gradients(PolicyParams& params, const InstanceSpec& inst,
                                       std::span<const ScenarioRecord* const> batch, Rng& rng,
                                       bool normalize_advantages) {
    if (batch.empty()) throw std::invalid_argument("train: empty batch");
    const int s_count = static_cast<int>(batch.size());

    // Seeding each episode up front lets the normalization probe replay the
    // exact same episodes it measured.
    std::vector<std::uint64_t> seeds(uz(s_count));
    for (auto& s : seeds) s = rng.next_u64();

    double adv_scale = 1.0;
    if (normalize_advantages) {
        TapePolicy probe(params, inst);
        double sum = 0.0, sumsq = 0.0;
        long n = 0;
        for (int i = 0; i < s_count; ++i) {
            Rng ep_rng(seeds[uz(i)]);
            const Episode ep = rollout_episode(probe, inst, *batch[uz(i)], ep_rng);
            const auto returns = suffix_returns(ep.step_costs);
            for (const Decision& d : ep.decisions) {
                const double a = returns[uz(d.step)] - d.baseline_value;
                sum += a;
                sumsq += a * a;
                ++n;
            }
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
        adv_scale = 1.0 / std::max(std::sqrt(var), 1e-8);
    }

    TapePolicy tp(params, inst);
    UpdateStats stats;
    for (int i = 0; i < s_count; ++i) {
        Rng ep_rng(seeds[uz(i)]);
        const Episode ep = rollout_episode(tp, inst, *batch[uz(i)], ep_rng);
        const auto returns = suffix_returns(ep.step_costs);
        const double d_count = static_cast<double>(ep.decisions.size());

        Tape& tape = tp.tape();
        Tape::Var total;
        double ep_policy = 0.0, ep_baseline = 0.0;
        for (const Decision& d : ep.decisions) {
            const double ret = returns[uz(d.step)];
            const double adv = ret - d.baseline_value;
            // The advantage enters as a constant: REINFORCE treats it as a
            // weight, and the baseline head must not shrink it through the
            // policy term.
            Tape::Var term = tape.scale(d.logp, adv * adv_scale);
            Tape::Var diff = tape.add_scalar(d.baseline, -ret);
            term = tape.add(term, tape.mul(diff, diff));
            total = total.valid() ? tape.add(total, term) : term;
            ep_policy += adv * d.logp_value;
            ep_baseline += adv * adv;
        }
        tape.backward(tape.scale(total, 1.0 / (d_count * static_cast<double>(s_count))));

        stats.mean_cost += std::accumulate(ep.step_costs.begin(), ep.step_costs.end(), 0.0);
        stats.policy_loss += ep_policy / d_count;
        stats.baseline_loss += ep_baseline / d_count;
    }
    stats.mean_cost /= static_cast<double>(s_count);
    stats.policy_loss /= static_cast<double>(s_count);
    stats.baseline_loss /= static_cast<double>(s_count);
    return stats;
}

UpdateStats reinforce_update(PolicyParams& params, const InstanceSpec& inst,
                             std::span<const ScenarioRecord* const> batch, Adam& policy_opt,
                             Adam& baseline_opt, double clip_norm, Rng& rng,
                             bool normalize_advantages) {
    if (batch.empty()) throw std::invalid_argument("train: empty batch");
    for (auto& [name, arr] : params.named()) {
        arr->ensure_grad();
        arr->zero_grad();
    }
    const UpdateStats stats =
        accumulate_batch_gradients(params, inst, batch, rng, normalize_advantages);
    clip_gradients(params, network_arrays(params), clip_norm);
    clip_gradients(params, baseline_arrays(params), clip_norm);
    policy_opt.step();
    baseline_opt.step();
    check_finite_params(params);
    return stats;
}

std::pair<PolicyParams, TrainReport> train(const TrainConfig& config, const InstanceSpec& inst,
                                           const ScenarioSet& train_set,
                                           const ScenarioSet& val_set) {
    config.validate();
    if (inst.n_customers != config.n_customers)
        throw std::invalid_argument("train: instance size disagrees with config");
    if (train_set.records.empty()) throw std::invalid_argument("train: training dataset missing");
    const bool validating = config.validation_every > 0 && config.updates > 0;
    if (validating && val_set.records.empty())
        throw std::invalid_argument("train: validation dataset missing");

    PolicyParams params = init_policy(config.n_customers, config.dim, config.seed);
    Adam policy_opt(network_arrays(params), config.policy_lr);
    Adam baseline_opt(baseline_arrays(params), config.baseline_lr);
    Rng rng(Rng::derive(config.seed, 1));

    EstimateVector est;
    if (validating) est = constant_estimate(params_from_calibration(val_set.calibration));

    const auto t0 = std::chrono::steady_clock::now();
    const auto since_start = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    TrainReport report;
    PolicyParams best = params;
    double best_val = std::numeric_limits<double>::infinity();
    const int n_records = static_cast<int>(train_set.records.size());

    for (int u = 0; u < config.updates; ++u) {
        std::vector<const ScenarioRecord*> batch(uz(config.batch_size));
        for (auto& rec : batch) rec = &train_set.records[uz(rng.uniform_int(n_records))];
        const UpdateStats stats =
            reinforce_update(params, inst, batch, policy_opt, baseline_opt, config.clip_norm,
                             rng, config.normalize_advantages);
        report.mean_cost.push_back(stats.mean_cost);
        report.policy_loss.push_back(stats.policy_loss);
        report.baseline_loss.push_back(stats.baseline_loss);
        report.elapsed.push_back(since_start());

        const bool last = u + 1 == config.updates;
        if (validating && ((u + 1) % config.validation_every == 0 || last)) {
            const double vc =
                validation_cost(params, inst, val_set, est, config.validation_scenarios);
            report.validation_at.push_back(u);
            report.validation_cost.push_back(vc);
            if (vc < best_val) {
                best_val = vc;
                report.best_update = u;
                report.best_validation = vc;
                best = params;
                if (!config.checkpoint_path.empty()) {
                    save_policy(config.checkpoint_path, params);
                    report.checkpoint = config.checkpoint_path;
                }
            }
        }
    }
    report.wall_seconds = since_start();

    if (!validating || report.best_update < 0) best = params;
    return {std::move(best), std::move(report)};
}

void TrainReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("train report: cannot write " + path);
    out.precision(17);
    out << "update,mean_cost,policy_loss,baseline_loss,elapsed_seconds,validation_cost\n";
    std::size_t vi = 0;
    for (std::size_t u = 0; u < mean_cost.size(); ++u) {
        out << u << ',' << mean_cost[u] << ',' << policy_loss[u] << ',' << baseline_loss[u]
            << ',' << elapsed[u] << ',';
        if (vi < validation_at.size() && validation_at[vi] == static_cast<int>(u)) {
            out << validation_cost[vi];
            ++vi;
        }
        out << '\n';
    }
}

}  // namespace svrp
