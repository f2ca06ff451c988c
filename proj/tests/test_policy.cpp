#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "svrp/env.hpp"
#include "svrp/policy.hpp"
#include "util.hpp"

using namespace svrp;

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

struct EpisodeFixture {
    GeneratorParams params;
    InstanceSpec inst;
    ScenarioRecord rec;
    std::vector<int> actions;

    EpisodeFixture(int n, std::uint64_t seed, int dim, PolicyParams* policy) {
        params = calibrate(test::layout_spec(n, {0.6, 0.2, 0.2}, seed));
        inst = test::make_instance(params, 0.5, 1);
        Rng rng(seed + 1);
        rec = realize(params, sample_weather(rng), rng);
        *policy = init_policy(n, dim, seed + 2);
        // Greedy rollout recorded once; the action list is then replayed
        // verbatim by every finite-difference evaluation.
        FastPolicy fp(*policy, inst);
        fp.begin(rec);
        EnvState s = reset(inst, rec);
        while (!s.done) {
            const auto mask = feasible_mask(s, inst, s.demands, 0);
            const auto& probs = fp.step(s, 0, mask);
            int best = -1;
            for (int a = 0; a < static_cast<int>(probs.size()); ++a)
                if (mask[uz(a)] && (best < 0 || probs[uz(a)] > probs[uz(best)])) best = a;
            actions.push_back(best);
            s = step(s, inst, rec, {best}).state;
        }
    }

    // Sum of step log-probs along the recorded action sequence.
    double replay_logprob(PolicyParams& policy) const {
        TapePolicy tp(policy, inst);
        tp.begin(rec);
        EnvState s = reset(inst, rec);
        double total = 0.0;
        for (int a : actions) {
            const auto mask = feasible_mask(s, inst, s.demands, 0);
            const auto st = tp.step(s, 0, mask);
            total += std::log(st.prob_values[uz(a)]);
            s = step(s, inst, rec, {a}).state;
        }
        return total;
    }
};

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("encode_position returns node coordinates") {
    const auto params = calibrate(test::layout_spec(4, {1.0, 0.0, 0.0}, 21));
    const auto inst = test::make_instance(params, 0.5, 1);
    const Vec2 depot = encode_position(0, inst);
    CHECK(depot.x == 0.5);
    CHECK(depot.y == 0.5);
    const Vec2 c2 = encode_position(2, inst);
    CHECK(c2.x == inst.positions[2].x);
    CHECK(c2.y == inst.positions[2].y);
    CHECK_THROWS_AS(encode_position(5, inst), std::invalid_argument);
}

TEST_CASE("forward zeroes masked nodes and normalizes the rest") {
    const auto params = calibrate(test::layout_spec(5, {0.6, 0.2, 0.2}, 22));
    const auto inst = test::make_instance(params, 0.5, 1);
    Rng rng(7);
    const auto rec = realize(params, sample_weather(rng), rng);
    auto policy = init_policy(5, 8, 3);
    EnvState s = reset(inst, rec);
    const auto obs = build_observation(inst, s, rec, ObservationMode::reoptimization);
    const std::vector<double> h(8, 0.0), c(8, 0.0);

    const auto mask = feasible_mask(s, inst, s.demands, 0);
    const auto out = forward(obs, h, c, 0, mask, policy);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.probs.size(); ++i) {
        if (!mask[i]) CHECK(out.probs[i] == 0.0);
        sum += out.probs[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    std::vector<char> narrower = mask;
    narrower[1] = 0;
    const auto out2 = forward(obs, h, c, 0, narrower, policy);
    CHECK(out2.probs[1] == 0.0);
    CHECK(out2.baseline == out.baseline);  // baseline reads the state, not the mask
}

TEST_CASE("zero parameters spread probability uniformly over feasible nodes") {
    const auto params = calibrate(test::layout_spec(4, {0.6, 0.2, 0.2}, 23));
    const auto inst = test::make_instance(params, 0.5, 1);
    Rng rng(9);
    const auto rec = realize(params, sample_weather(rng), rng);
    auto policy = init_policy(4, 8, 4);
    for (auto& [name, arr] : policy.named()) arr->data.assign(arr->data.size(), 0.0);
    EnvState s = reset(inst, rec);
    const auto obs = build_observation(inst, s, rec, ObservationMode::reoptimization);
    const auto mask = feasible_mask(s, inst, s.demands, 0);
    int live = 0;
    for (char m : mask) live += m;
    const auto out = forward(obs, std::vector<double>(8, 0.0), std::vector<double>(8, 0.0), 0,
                             mask, policy);
    for (std::size_t i = 0; i < out.probs.size(); ++i)
        if (mask[i]) CHECK(out.probs[i] == doctest::Approx(1.0 / live).epsilon(1e-12));
}

TEST_CASE("permuting node rows permutes the distribution") {
    const auto params = calibrate(test::layout_spec(6, {0.6, 0.2, 0.2}, 24));
    const auto inst = test::make_instance(params, 0.5, 1);
    Rng rng(11);
    const auto rec = realize(params, sample_weather(rng), rng);
    auto policy = init_policy(6, 8, 5);
    EnvState s = reset(inst, rec);
    auto obs = build_observation(inst, s, rec, ObservationMode::reoptimization);
    std::vector<char> mask = feasible_mask(s, inst, s.demands, 0);
    mask[3] = 0;

    const std::vector<int> perm{0, 4, 1, 6, 2, 5, 3};  // depot fixed
    Observation pobs = obs;
    std::vector<char> pmask(mask.size());
    for (int i = 0; i < obs.node_inputs.rows; ++i) {
        for (int cidx = 0; cidx < obs.node_inputs.cols; ++cidx)
            pobs.node_inputs(i, cidx) = obs.node_inputs(perm[uz(i)], cidx);
        pmask[uz(i)] = mask[uz(perm[uz(i)])];
    }
    const std::vector<double> h(8, 0.0), c(8, 0.0);
    const auto base = forward(obs, h, c, 0, mask, policy);
    const auto permuted = forward(pobs, h, c, 0, pmask, policy);
    for (int i = 0; i < obs.node_inputs.rows; ++i)
        CHECK(permuted.probs[uz(i)] ==
              doctest::Approx(base.probs[uz(perm[uz(i)])]).epsilon(1e-9));
    CHECK(permuted.baseline == doctest::Approx(base.baseline).epsilon(1e-9));
}

TEST_CASE("log_prob hand values and masked action rejection") {
    CHECK(log_prob({1.0}, 0) == 0.0);
    CHECK(log_prob({0.25, 0.75}, 0) == doctest::Approx(-1.3863).epsilon(1e-4));
    CHECK_THROWS_AS(log_prob({0.0, 1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(log_prob({1.0}, 2), std::invalid_argument);
}

TEST_CASE("reference forward, fast path, and tape path agree along an episode") {
    const auto params = calibrate(test::layout_spec(5, {0.6, 0.2, 0.2}, 25));
    const auto inst = test::make_instance(params, 0.5, 1);
    Rng rng(13);
    const auto rec = realize(params, sample_weather(rng), rng);
    auto policy = init_policy(5, 8, 6);

    FastPolicy fp(policy, inst);
    fp.begin(rec);
    TapePolicy tp(policy, inst);
    tp.begin(rec);
    std::vector<double> h(8, 0.0), c(8, 0.0);

    EnvState s = reset(inst, rec);
    int guard = 0;
    while (!s.done && guard++ < 40) {
        const auto mask = feasible_mask(s, inst, s.demands, 0);
        const auto obs = build_observation(inst, s, rec, ObservationMode::reoptimization);
        const auto ref = forward(obs, h, c, 0, mask, policy);
        const auto& fast = fp.step(s, 0, mask);
        const auto rec_step = tp.step(s, 0, mask);
        for (std::size_t i = 0; i < ref.probs.size(); ++i) {
            CHECK(fast[i] == ref.probs[i]);
            CHECK(rec_step.prob_values[i] == doctest::Approx(ref.probs[i]).epsilon(1e-14));
        }
        CHECK(rec_step.baseline_value == doctest::Approx(ref.baseline).epsilon(1e-12));
        h = ref.h_next;
        c = ref.c_next;
        int act = 0;
        for (int a = static_cast<int>(ref.probs.size()) - 1; a >= 0; --a)
            if (mask[uz(a)]) {
                act = a;
                break;
            }
        s = step(s, inst, rec, {act}).state;
    }
    CHECK(s.done);
}

TEST_CASE("episode log-prob gradient matches finite differences") {
    PolicyParams policy;
    const EpisodeFixture fx(3, 31, 6, &policy);
    REQUIRE(fx.actions.size() >= 3);

    for (auto& [name, arr] : policy.named()) {
        arr->ensure_grad();
        arr->zero_grad();
    }
    {
        TapePolicy tp(policy, fx.inst);
        tp.begin(fx.rec);
        EnvState s = reset(fx.inst, fx.rec);
        Tape::Var loss{};
        for (int a : fx.actions) {
            const auto mask = feasible_mask(s, fx.inst, s.demands, 0);
            const auto st = tp.step(s, 0, mask);
            const Tape::Var lp = tp.log_prob(st, a);
            loss = loss.valid() ? tp.tape().add(loss, lp) : lp;
            s = step(s, fx.inst, fx.rec, {a}).state;
        }
        tp.tape().backward(loss);
    }

    auto mutable_policy = policy;
    const double eps = 1e-5;
    for (std::size_t ai = 0; ai < policy.named().size(); ++ai) {
        Array* arr = mutable_policy.named()[ai].second;
        const Array* ref = policy.named()[ai].second;
        for (std::size_t i = 0; i < arr->data.size(); ++i) {
            const double save = arr->data[i];
            arr->data[i] = save + eps;
            const double fp = fx.replay_logprob(mutable_policy);
            arr->data[i] = save - eps;
            const double fm = fx.replay_logprob(mutable_policy);
            arr->data[i] = save;
            const double fd = (fp - fm) / (2.0 * eps);
            const double g = ref->grad[i];
            const double denom = std::max({1e-6, std::abs(fd), std::abs(g)});
            CHECK(std::abs(fd - g) / denom <= 1e-4);
        }
    }
}

TEST_CASE("policy checkpoints round trip through json") {
    auto policy = init_policy(4, 8, 17);
    const std::string path = "policy_ckpt_roundtrip.json";
    save_policy(path, policy);
    const auto loaded = load_policy(path);
    std::remove(path.c_str());
    CHECK(loaded.n_customers == policy.n_customers);
    for (std::size_t i = 0; i < policy.named().size(); ++i)
        CHECK(std::as_const(policy).named()[i].second->data ==
              std::as_const(loaded).named()[i].second->data);
    CHECK_THROWS_AS(load_policy("does_not_exist.json"), std::runtime_error);
}

TEST_CASE("two vehicles keep separate memory streams") {
    const auto params = calibrate(test::layout_spec(6, {0.6, 0.2, 0.2}, 26));
    auto inst = test::make_instance(params, 0.5, 2);
    Rng rng(19);
    const auto rec = realize(params, sample_weather(rng), rng);
    auto policy = init_policy(6, 8, 20);
    FastPolicy fp(policy, inst);
    fp.begin(rec);
    EnvState s = reset(inst, rec);
    const auto m0 = feasible_mask(s, inst, s.demands, 0);
    const auto m1 = feasible_mask(s, inst, s.demands, 1);
    fp.step(s, 0, m0);
    fp.step(s, 1, m1);
    const std::vector<double> interleaved = fp.step(s, 0, m0);

    FastPolicy fresh(policy, inst);
    fresh.begin(rec);
    fresh.step(s, 0, m0);
    const std::vector<double> isolated = fresh.step(s, 0, m0);
    CHECK(interleaved == isolated);  // vehicle 1's update left stream 0 alone
}

}  // TEST_SUITE
