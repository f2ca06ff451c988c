#include "svrp/decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svrp {

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

int argmax_action(const std::vector<double>& probs, const std::vector<char>& mask) {
    int best = -1;
    for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
        if (!mask[uz(a)]) continue;
        if (best < 0 || probs[uz(a)] > probs[uz(best)]) best = a;
    }
    if (best < 0) throw std::runtime_error("decode: no feasible action");
    return best;
}

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
    if (last < 0) throw std::runtime_error("decode: no feasible action");
    return last;
}

// Executed-episode bookkeeping shared by every strategy so that width-1 beam
// search and greedy build bit-identical Solutions.
struct RolloutTrace {
    std::vector<std::vector<int>> walks, tours;
    std::vector<RecourseEvent> recourse;
    std::vector<char> seen;
    double cost = 0.0;

    void init(const InstanceSpec& inst) {
        walks.assign(uz(inst.n_vehicles), std::vector<int>{0});
        tours.assign(uz(inst.n_vehicles), {});
        seen.assign(uz(inst.n_customers + 1), 0);
        recourse.clear();
        cost = 0.0;
    }

    void apply(const EnvState& before, const std::vector<int>& actions, const StepResult& res) {
        for (std::size_t k = 0; k < actions.size(); ++k) {
            const int a = actions[k];
            const int pos = before.positions[k];
            if (a != pos) walks[k].push_back(a);
            if (a == 0 && pos != 0) tours[k].push_back(0);
            if (a >= 1 && !seen[uz(a)]) {
                seen[uz(a)] = 1;
                tours[k].push_back(a);
            }
        }
        cost += res.cost;
        recourse.insert(recourse.end(), res.recourse.begin(), res.recourse.end());
    }

    Solution finish() {
        Solution s;
        s.tours.reserve(tours.size());
        for (auto t : tours) {
            while (!t.empty() && t.back() == 0) t.pop_back();
            std::vector<int> bookended{0};
            bookended.insert(bookended.end(), t.begin(), t.end());
            if (!t.empty()) bookended.push_back(0);
            s.tours.push_back(std::move(bookended));
        }
        s.walks = walks;
        s.recourse = recourse;
        s.realized_cost = cost;
        return s;
    }
};

Plan plan_from_trace(const RolloutTrace& trace, const InstanceSpec& inst) {
    Plan plan;
    for (const auto& t : trace.tours) {
        std::vector<int> route;
        for (int node : t) {
            if (node == 0) {
                if (!route.empty()) plan.routes.push_back(std::move(route));
                route = {};
            } else {
                route.push_back(node);
            }
        }
        if (!route.empty()) plan.routes.push_back(std::move(route));
    }
    // A zero demand estimate can keep a customer out of the surrogate walk;
    // cover it anyway so the plan stays valid whatever the realization says.
    std::vector<char> covered(uz(inst.n_customers + 1), 0);
    for (const auto& r : plan.routes)
        for (int c : r) covered[uz(c)] = 1;
    for (int c = 1; c <= inst.n_customers; ++c)
        if (!covered[uz(c)]) plan.routes.push_back({c});
    return plan;
}

enum class Pick { greedy, sample };

// One full rollout on `driving` (the realization under reoptimization, the
// estimate record a priori).
RolloutTrace run_rollout(const PolicyParams& policy, const InstanceSpec& inst,
                         const ScenarioRecord& driving, Pick pick, Rng* rng) {
    FastPolicy fp(policy, inst);
    fp.begin(driving);
    EnvState s = reset(inst, driving);
    RolloutTrace trace;
    trace.init(inst);
    int guard = 0;
    while (!s.done) {
        if (++guard > inst.max_steps())
            throw std::runtime_error("decode: exceeded step budget");
        std::vector<int> actions;
        for (int k = 0; k < inst.n_vehicles; ++k) {
            const auto mask = coordinated_mask(s, inst, k, actions);
            const auto& probs = fp.step(s, k, mask);
            actions.push_back(pick == Pick::greedy ? argmax_action(probs, mask)
                                                   : sample_action(probs, mask, *rng));
        }
        const StepResult res = step(s, inst, driving, actions);
        trace.apply(s, actions, res);
        s = res.state;
    }
    return trace;
}

Solution finish_mode(const RolloutTrace& trace, const InstanceSpec& inst,
                     const ScenarioRecord& scenario, ObservationMode mode) {
    if (mode == ObservationMode::reoptimization) {
        RolloutTrace copy = trace;
        return copy.finish();
    }
    Solution sol;
    evaluate_a_priori(plan_from_trace(trace, inst), inst, scenario, &sol);
    return sol;
}

struct Beam {
    EnvState state;
    FastPolicy fp;
    RolloutTrace trace;
    double logp = 0.0;
    std::vector<int> pending;
};

}  // namespace

std::vector<char> coordinated_mask(const EnvState& state, const InstanceSpec& inst,
                                   int vehicle, const std::vector<int>& claimed) {
    const auto mask = feasible_mask(state, inst, state.demands, vehicle);
    auto out = mask;
    for (int a : claimed)
        if (a >= 1) out[uz(a)] = 0;
    for (char m : out)
        if (m) return out;
    return mask;
}

Solution greedy_decode(const PolicyParams& policy, const InstanceSpec& inst,
                       const ScenarioRecord& scenario, const EstimateVector& estimates,
                       ObservationMode mode) {
    const ScenarioRecord driving =
        mode == ObservationMode::reoptimization ? scenario : as_record(estimates, scenario.w);
    const RolloutTrace trace = run_rollout(policy, inst, driving, Pick::greedy, nullptr);
    return finish_mode(trace, inst, scenario, mode);
}

Solution sample_decode(const PolicyParams& policy, const InstanceSpec& inst,
                       const ScenarioRecord& scenario, const EstimateVector& estimates,
                       int n_s, ObservationMode mode, Rng& rng) {
    if (n_s < 1) throw std::invalid_argument("sample_decode: n_s must be positive");
    const ScenarioRecord driving =
        mode == ObservationMode::reoptimization ? scenario : as_record(estimates, scenario.w);
    std::vector<std::uint64_t> seeds;
    seeds.reserve(uz(n_s));
    for (int i = 0; i < n_s; ++i) seeds.push_back(rng.next_u64());
    Solution best;
    bool have = false;
    for (std::uint64_t seed : seeds) {
        Rng sub(seed);
        const RolloutTrace trace = run_rollout(policy, inst, driving, Pick::sample, &sub);
        Solution sol = finish_mode(trace, inst, scenario, mode);
        if (!have || sol.realized_cost < best.realized_cost) {
            best = std::move(sol);
            have = true;
        }
    }
    return best;
}

Solution beam_decode(const PolicyParams& policy, const InstanceSpec& inst,
                     const ScenarioRecord& scenario, const EstimateVector& estimates,
                     int n_b, ObservationMode mode) {
    if (n_b < 1) throw std::invalid_argument("beam_decode: n_b must be positive");
    const ScenarioRecord driving =
        mode == ObservationMode::reoptimization ? scenario : as_record(estimates, scenario.w);

    std::vector<Beam> live(1);
    live[0].state = reset(inst, driving);
    live[0].fp = FastPolicy(policy, inst);
    live[0].fp.begin(driving);
    live[0].trace.init(inst);
    std::vector<Beam> bank;

    int guard = 0;
    while (!live.empty()) {
        if (++guard > inst.max_steps())
            throw std::runtime_error("beam_decode: exceeded step budget");
        for (int k = 0; k < inst.n_vehicles; ++k) {
            std::vector<Beam> children;
            for (Beam& beam : live) {
                const auto mask = coordinated_mask(beam.state, inst, k, beam.pending);
                const auto probs = beam.fp.step(beam.state, k, mask);
                for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
                    if (!mask[uz(a)] || probs[uz(a)] <= 0.0) continue;
                    Beam child = beam;
                    child.pending.push_back(a);
                    child.logp += std::log(probs[uz(a)]);
                    children.push_back(std::move(child));
                }
            }
            if (children.empty()) throw std::runtime_error("beam_decode: dead end");
            // stable top-k keeps generation order (lower action index) on ties
            std::stable_sort(children.begin(), children.end(),
                             [](const Beam& a, const Beam& b) { return a.logp > b.logp; });
            if (static_cast<int>(children.size()) > n_b) children.resize(uz(n_b));
            live = std::move(children);
        }
        std::vector<Beam> still_live;
        for (Beam& beam : live) {
            const StepResult res = step(beam.state, inst, driving, beam.pending);
            beam.trace.apply(beam.state, beam.pending, res);
            beam.state = res.state;
            beam.pending.clear();
            if (beam.state.done)
                bank.push_back(std::move(beam));
            else
                still_live.push_back(std::move(beam));
        }
        live = std::move(still_live);
    }
    if (bank.empty()) throw std::runtime_error("beam_decode: no completed rollout");

    Solution best;
    bool have = false;
    for (const Beam& beam : bank) {
        Solution sol = finish_mode(beam.trace, inst, scenario, mode);
        if (!have || sol.realized_cost < best.realized_cost) {
            best = std::move(sol);
            have = true;
        }
    }
    return best;
}

Solution decode(const PolicyParams& policy, const InstanceSpec& inst,
                const ScenarioRecord& scenario, const EstimateVector& estimates,
                const DecodeConfig& config, ObservationMode mode) {
    switch (config.strategy) {
        case DecodeConfig::Strategy::greedy:
            return greedy_decode(policy, inst, scenario, estimates, mode);
        case DecodeConfig::Strategy::sampling: {
            Rng rng(config.seed);
            return sample_decode(policy, inst, scenario, estimates, config.n_samples, mode, rng);
        }
        case DecodeConfig::Strategy::beam:
            return beam_decode(policy, inst, scenario, estimates, config.beam_width, mode);
    }
    throw std::invalid_argument("decode: unknown strategy");
}

}  // namespace svrp
