#include "svrp/policy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace svrp {

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

// [w(3), remaining demand, cost row]; depot carries zero demand.
void fill_node_row(double* row, const ScenarioRecord& rec, const std::vector<double>& demands,
                   int node, int n) {
    row[0] = rec.w[0];
    row[1] = rec.w[1];
    row[2] = rec.w[2];
    row[3] = node == 0 ? 0.0 : demands[uz(node - 1)];
    for (int j = 0; j <= n; ++j) row[4 + j] = rec.costs(node, j);
}

std::vector<double> lstm_input(const Vec2& pos, double load, double capacity) {
    return {pos.x, pos.y, load / capacity};
}

double baseline_value(const double* h, const Mat& embeds, const PolicyParams& p) {
    const int d = p.net.dim;
    std::vector<double> in(uz(2 * d), 0.0);
    for (int j = 0; j < d; ++j) in[uz(j)] = h[j];
    for (int r = 0; r < embeds.rows; ++r)
        for (int j = 0; j < d; ++j) in[uz(d + j)] += embeds(r, j);
    const double inv = 1.0 / static_cast<double>(embeds.rows);
    for (int j = 0; j < d; ++j) in[uz(d + j)] *= inv;
    double b = p.baseline_b.data[0];
    for (int j = 0; j < 2 * d; ++j) b += in[uz(j)] * p.baseline_w.data[uz(j)];
    return b;
}

}  // namespace

std::vector<std::pair<std::string, Array*>> PolicyParams::named() {
    auto out = net.named();
    out.emplace_back("baseline_w", &baseline_w);
    out.emplace_back("baseline_b", &baseline_b);
    return out;
}

std::vector<std::pair<std::string, const Array*>> PolicyParams::named() const {
    std::vector<std::pair<std::string, const Array*>> out;
    for (auto& [name, arr] : const_cast<PolicyParams*>(this)->named()) out.emplace_back(name, arr);
    return out;
}

PolicyParams init_policy(int n_customers, int dim, std::uint64_t seed) {
    if (n_customers < 1) throw std::invalid_argument("init_policy: need at least one customer");
    Rng rng(seed);
    PolicyParams p;
    p.n_customers = n_customers;
    p.net = init_layer_params(n_customers + 5, 3, dim, rng);
    p.baseline_w = init_array({2 * dim, 1}, 2 * dim, rng);
    p.baseline_b = init_array({1}, 2 * dim, rng);
    return p;
}

void save_policy(const std::string& path, const PolicyParams& params) {
    nlohmann::json j;
    j["kind"] = "svrp-policy";
    j["dim"] = params.net.dim;
    j["input_dim"] = params.net.input_dim;
    j["x_dim"] = params.net.x_dim;
    j["n_customers"] = params.n_customers;
    j["params"] = arrays_to_json(params.named());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_policy: cannot open " + path);
    out << j.dump() << "\n";
}

PolicyParams load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_policy: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("kind", "") != "svrp-policy")
        throw std::runtime_error("load_policy: unrecognized checkpoint");
    const int n = j.at("n_customers").get<int>();
    const int dim = j.at("dim").get<int>();
    PolicyParams p = init_policy(n, dim, 0);
    if (j.at("input_dim").get<int>() != p.net.input_dim ||
        j.at("x_dim").get<int>() != p.net.x_dim)
        throw std::runtime_error("load_policy: dimension mismatch");
    arrays_from_json(j.at("params"), p.named());
    return p;
}

Vec2 encode_position(int node, const InstanceSpec& inst) {
    if (node < 0 || node >= inst.nodes())
        throw std::invalid_argument("encode_position: node out of range");
    return inst.positions[uz(node)];
}

Observation build_observation(const InstanceSpec& inst, const EnvState& state,
                              const ScenarioRecord& perceived, ObservationMode mode) {
    const int n = inst.n_customers;
    if (static_cast<int>(state.demands.size()) != n || perceived.costs.rows != n + 1)
        throw std::invalid_argument("build_observation: dimension mismatch");
    Observation obs;
    obs.node_inputs = Mat(n + 1, n + 5);
    for (int i = 0; i <= n; ++i)
        fill_node_row(obs.node_inputs.row_ptr(i), perceived, state.demands, i, n);
    obs.loads = state.loads;
    for (int node : state.positions) obs.positions_xy.push_back(encode_position(node, inst));
    obs.capacity = inst.capacity;
    obs.mode = mode;
    return obs;
}

ForwardResult forward(const Observation& obs, const std::vector<double>& h,
                      const std::vector<double>& c, int vehicle,
                      const std::vector<char>& mask, const PolicyParams& params) {
    const int d = params.net.dim;
    if (static_cast<int>(h.size()) != d || static_cast<int>(c.size()) != d)
        throw std::invalid_argument("forward: memory width mismatch");
    if (vehicle < 0 || vehicle >= static_cast<int>(obs.loads.size()))
        throw std::invalid_argument("forward: vehicle out of range");

    const Mat embeds = embed_nodes(obs.node_inputs, params.net);
    ForwardResult out;
    out.h_next.assign(uz(d), 0.0);
    out.c_next.assign(uz(d), 0.0);
    const auto x = lstm_input(obs.positions_xy[uz(vehicle)], obs.loads[uz(vehicle)],
                              obs.capacity);
    lstm_step(x.data(), h.data(), c.data(), params.net, out.h_next.data(), out.c_next.data());
    const auto logits = attention_logits(embeds, out.h_next.data(), params.net);
    out.probs = masked_softmax(logits, mask);
    out.baseline = baseline_value(out.h_next.data(), embeds, params);
    return out;
}

double log_prob(const std::vector<double>& probs, int action) {
    if (action < 0 || action >= static_cast<int>(probs.size()))
        throw std::invalid_argument("log_prob: action out of range");
    if (probs[uz(action)] <= 0.0) throw std::invalid_argument("log_prob: masked action");
    return std::log(probs[uz(action)]);
}

FastPolicy::FastPolicy(const PolicyParams& params, const InstanceSpec& inst)
    : params_(&params), inst_(&inst) {
    if (params.n_customers != inst.n_customers)
        throw std::invalid_argument("FastPolicy: params built for a different instance size");
}

void FastPolicy::begin(const ScenarioRecord& perceived) {
    perceived_ = &perceived;
    const int n = inst_->n_customers;
    const int d = params_->net.dim;
    embeds_ = Mat(n + 1, d);
    w1e_ = Mat(n + 1, d);
    snapshot_.assign(uz(n), -1.0);
    h_.assign(uz(inst_->n_vehicles), std::vector<double>(uz(d), 0.0));
    c_.assign(uz(inst_->n_vehicles), std::vector<double>(uz(d), 0.0));
}

void FastPolicy::refresh_rows(const std::vector<double>& demands) {
    const int n = inst_->n_customers;
    const int d = params_->net.dim;
    std::vector<double> row(uz(n + 5));
    std::vector<double> pre(uz(d));
    for (int i = 0; i <= n; ++i) {
        if (i > 0 && demands[uz(i - 1)] == snapshot_[uz(i - 1)]) continue;
        if (i == 0 && snapshot_[0] >= 0.0 && n > 0) continue;  // depot row is static
        fill_node_row(row.data(), *perceived_, demands, i, n);
        Mat one(1, n + 5);
        std::copy(row.begin(), row.end(), one.a.begin());
        const Mat e = embed_nodes(one, params_->net);
        std::copy(e.a.begin(), e.a.end(), embeds_.row_ptr(i));
        for (int j = 0; j < d; ++j) pre[uz(j)] = 0.0;
        const double* er = embeds_.row_ptr(i);
        for (int k = 0; k < d; ++k) {
            const double ek = er[k];
            if (ek == 0.0) continue;
            const double* wrow = params_->net.attn_w1.data.data() + static_cast<std::ptrdiff_t>(k) * d;
            for (int j = 0; j < d; ++j) pre[uz(j)] += ek * wrow[j];
        }
        std::copy(pre.begin(), pre.end(), w1e_.row_ptr(i));
    }
    for (int i = 0; i < n; ++i) snapshot_[uz(i)] = demands[uz(i)];
}

const std::vector<double>& FastPolicy::step(const EnvState& state, int vehicle,
                                            const std::vector<char>& mask) {
    refresh_rows(state.demands);
    const int d = params_->net.dim;
    const auto x = lstm_input(encode_position(state.positions[uz(vehicle)], *inst_),
                              state.loads[uz(vehicle)], inst_->capacity);
    std::vector<double> hn(uz(d)), cn(uz(d));
    lstm_step(x.data(), h_[uz(vehicle)].data(), c_[uz(vehicle)].data(), params_->net,
              hn.data(), cn.data());
    h_[uz(vehicle)] = hn;
    c_[uz(vehicle)] = cn;

    std::vector<double> w2h(uz(d), 0.0);
    for (int k = 0; k < d; ++k) {
        const double hk = hn[uz(k)];
        if (hk == 0.0) continue;
        const double* wrow = params_->net.attn_w2.data.data() + static_cast<std::ptrdiff_t>(k) * d;
        for (int j = 0; j < d; ++j) w2h[uz(j)] += hk * wrow[j];
    }
    std::vector<double> logits(uz(embeds_.rows));
    for (int r = 0; r < embeds_.rows; ++r) {
        const double* pre = w1e_.row_ptr(r);
        double u = 0.0;
        for (int j = 0; j < d; ++j)
            u += params_->net.attn_v.data[uz(j)] * std::tanh(pre[j] + w2h[uz(j)]);
        logits[uz(r)] = u;
    }
    probs_ = masked_softmax(logits, mask);
    return probs_;
}

TapePolicy::TapePolicy(PolicyParams& params, const InstanceSpec& inst)
    : params_(&params), inst_(&inst) {
    if (params.n_customers != inst.n_customers)
        throw std::invalid_argument("TapePolicy: params built for a different instance size");
}

void TapePolicy::make_leaves() {
    embed_w_ = tape_.leaf(params_->net.embed_w);
    embed_b_ = tape_.leaf(params_->net.embed_b);
    wi_ = tape_.leaf(params_->net.lstm_wi);
    bi_ = tape_.leaf(params_->net.lstm_bi);
    wf_ = tape_.leaf(params_->net.lstm_wf);
    bf_ = tape_.leaf(params_->net.lstm_bf);
    wo_ = tape_.leaf(params_->net.lstm_wo);
    bo_ = tape_.leaf(params_->net.lstm_bo);
    wc_ = tape_.leaf(params_->net.lstm_wc);
    bc_ = tape_.leaf(params_->net.lstm_bc);
    w1_ = tape_.leaf(params_->net.attn_w1);
    w2_ = tape_.leaf(params_->net.attn_w2);
    v_ = tape_.leaf(params_->net.attn_v);
    bw_ = tape_.leaf(params_->baseline_w);
    bb_ = tape_.leaf(params_->baseline_b);
}

void TapePolicy::begin(const ScenarioRecord& perceived) {
    perceived_ = &perceived;
    tape_.reset();
    make_leaves();
    const int n = inst_->n_customers;
    const int d = params_->net.dim;
    embed_vars_.assign(uz(n + 1), Tape::Var{});
    w1e_vars_.assign(uz(n + 1), Tape::Var{});
    embeds_ = Mat(n + 1, d);
    snapshot_.assign(uz(n), -1.0);
    const std::vector<double> zeros(uz(d), 0.0);
    h_.assign(uz(inst_->n_vehicles), Tape::Var{});
    c_.assign(uz(inst_->n_vehicles), Tape::Var{});
    for (int k = 0; k < inst_->n_vehicles; ++k) {
        h_[uz(k)] = tape_.constant(zeros);
        c_[uz(k)] = tape_.constant(zeros);
    }
}

void TapePolicy::refresh_rows(const std::vector<double>& demands) {
    const int n = inst_->n_customers;
    std::vector<double> row(uz(n + 5));
    for (int i = 0; i <= n; ++i) {
        if (embed_vars_[uz(i)].valid()) {
            if (i == 0) continue;
            if (demands[uz(i - 1)] == snapshot_[uz(i - 1)]) continue;
        }
        fill_node_row(row.data(), *perceived_, demands, i, n);
        const Tape::Var rv = tape_.constant(row);
        embed_vars_[uz(i)] = tape_.tanh_(tape_.affine(rv, embed_w_, embed_b_));
        w1e_vars_[uz(i)] = tape_.affine(embed_vars_[uz(i)], w1_, Tape::Var{});
        const auto vals = tape_.values(embed_vars_[uz(i)]);
        std::copy(vals.begin(), vals.end(), embeds_.row_ptr(i));
    }
    for (int i = 0; i < n; ++i) snapshot_[uz(i)] = demands[uz(i)];
}

TapePolicy::Step TapePolicy::step(const EnvState& state, int vehicle,
                                  const std::vector<char>& mask) {
    refresh_rows(state.demands);
    const int n = inst_->n_customers;
    const int d = params_->net.dim;
    const auto x = lstm_input(encode_position(state.positions[uz(vehicle)], *inst_),
                              state.loads[uz(vehicle)], inst_->capacity);
    const Tape::Var z = tape_.concat(tape_.constant(x), h_[uz(vehicle)]);
    const Tape::Var gi = tape_.sigmoid_(tape_.affine(z, wi_, bi_));
    const Tape::Var gf = tape_.sigmoid_(tape_.affine(z, wf_, bf_));
    const Tape::Var go = tape_.sigmoid_(tape_.affine(z, wo_, bo_));
    const Tape::Var gc = tape_.tanh_(tape_.affine(z, wc_, bc_));
    const Tape::Var cn = tape_.add(tape_.mul(gf, c_[uz(vehicle)]), tape_.mul(gi, gc));
    const Tape::Var hn = tape_.mul(go, tape_.tanh_(cn));
    h_[uz(vehicle)] = hn;
    c_[uz(vehicle)] = cn;

    const Tape::Var w2h = tape_.affine(hn, w2_, Tape::Var{});
    std::vector<Tape::Var> us;
    us.reserve(uz(n + 1));
    for (int i = 0; i <= n; ++i)
        us.push_back(tape_.dot(tape_.tanh_(tape_.add(w1e_vars_[uz(i)], w2h)), v_));
    const Tape::Var logits = tape_.stack(us);

    Step s;
    s.probs = tape_.masked_softmax(logits, mask);
    const auto pv = tape_.values(s.probs);
    s.prob_values.assign(pv.begin(), pv.end());

    // Baseline input is detached: the head trains without pushing gradient
    // into the shared embedder or memory.
    std::vector<double> bin(uz(2 * d), 0.0);
    const auto hv = tape_.values(hn);
    for (int j = 0; j < d; ++j) bin[uz(j)] = hv[uz(j)];
    for (int r = 0; r < embeds_.rows; ++r)
        for (int j = 0; j < d; ++j) bin[uz(d + j)] += embeds_(r, j);
    const double inv = 1.0 / static_cast<double>(embeds_.rows);
    for (int j = 0; j < d; ++j) bin[uz(d + j)] *= inv;
    s.baseline = tape_.affine(tape_.constant(bin), bw_, bb_);
    s.baseline_value = tape_.values(s.baseline)[0];
    return s;
}

Tape::Var TapePolicy::log_prob(const Step& s, int action) {
    if (action < 0 || action >= static_cast<int>(s.prob_values.size()))
        throw std::invalid_argument("log_prob: action out of range");
    if (s.prob_values[uz(action)] <= 0.0)
        throw std::invalid_argument("log_prob: masked action");
    return tape_.log_(tape_.pick(s.probs, action));
}

}  // namespace svrp
