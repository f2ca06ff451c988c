#include "svrp/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace svrp {

namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += x^T W (+ b), W stored fan_in x fan_out row-major.
void affine_forward(const double* x, int in, const double* w, const double* b, double* y,
                    int out) {
    for (int j = 0; j < out; ++j) y[j] = b ? b[j] : 0.0;
    for (int i = 0; i < in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* wrow = w + static_cast<std::ptrdiff_t>(i) * out;
        for (int j = 0; j < out; ++j) y[j] += xi * wrow[j];
    }
}

}  // namespace

Array::Array(std::vector<int> s) : shape(std::move(s)) {
    data.assign(uz(shape_size(shape)), 0.0);
}

void Array::ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

void Array::zero_grad() { grad.assign(data.size(), 0.0); }

int shape_size(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("shape_size: nonpositive dimension");
        n *= d;
    }
    return n;
}

Array init_array(std::vector<int> shape, int fan_in, Rng& rng) {
    Array a(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
    for (double& v : a.data) v = rng.uniform(-bound, bound);
    return a;
}

std::vector<std::pair<std::string, Array*>> LayerParams::named() {
    return {{"embed_w", &embed_w}, {"embed_b", &embed_b}, {"lstm_wi", &lstm_wi},
            {"lstm_bi", &lstm_bi}, {"lstm_wf", &lstm_wf}, {"lstm_bf", &lstm_bf},
            {"lstm_wo", &lstm_wo}, {"lstm_bo", &lstm_bo}, {"lstm_wc", &lstm_wc},
            {"lstm_bc", &lstm_bc}, {"attn_w1", &attn_w1}, {"attn_w2", &attn_w2},
            {"attn_v", &attn_v}};
}

std::vector<std::pair<std::string, const Array*>> LayerParams::named() const {
    std::vector<std::pair<std::string, const Array*>> out;
    for (auto& [name, arr] : const_cast<LayerParams*>(this)->named()) out.emplace_back(name, arr);
    return out;
}

LayerParams init_layer_params(int input_dim, int x_dim, int dim, Rng& rng) {
    if (input_dim < 1 || x_dim < 1 || dim < 1)
        throw std::invalid_argument("init_layer_params: dimensions must be positive");
    LayerParams p;
    p.dim = dim;
    p.input_dim = input_dim;
    p.x_dim = x_dim;
    p.embed_w = init_array({input_dim, dim}, input_dim, rng);
    p.embed_b = init_array({dim}, input_dim, rng);
    const int zin = x_dim + dim;
    for (Array* w : {&p.lstm_wi, &p.lstm_wf, &p.lstm_wo, &p.lstm_wc})
        *w = init_array({zin, dim}, zin, rng);
    for (Array* b : {&p.lstm_bi, &p.lstm_bf, &p.lstm_bo, &p.lstm_bc})
        *b = init_array({dim}, zin, rng);
    p.attn_w1 = init_array({dim, dim}, dim, rng);
    p.attn_w2 = init_array({dim, dim}, dim, rng);
    p.attn_v = init_array({dim}, dim, rng);
    return p;
}

Mat embed_nodes(const Mat& node_inputs, const LayerParams& p) {
    if (node_inputs.cols != p.input_dim)
        throw std::invalid_argument("embed_nodes: input width mismatch");
    Mat out(node_inputs.rows, p.dim);
    for (int r = 0; r < node_inputs.rows; ++r) {
        affine_forward(node_inputs.row_ptr(r), p.input_dim, p.embed_w.data.data(),
                       p.embed_b.data.data(), out.row_ptr(r), p.dim);
        for (int j = 0; j < p.dim; ++j) out(r, j) = std::tanh(out(r, j));
    }
    return out;
}

void lstm_step(const double* x, const double* h, const double* c, const LayerParams& p,
               double* h_out, double* c_out) {
    const int d = p.dim;
    std::vector<double> z(uz(p.x_dim + d));
    std::copy(x, x + p.x_dim, z.begin());
    std::copy(h, h + d, z.begin() + p.x_dim);
    std::vector<double> gi(uz(d)), gf(uz(d)), go(uz(d)), gc(uz(d));
    affine_forward(z.data(), p.x_dim + d, p.lstm_wi.data.data(), p.lstm_bi.data.data(), gi.data(), d);
    affine_forward(z.data(), p.x_dim + d, p.lstm_wf.data.data(), p.lstm_bf.data.data(), gf.data(), d);
    affine_forward(z.data(), p.x_dim + d, p.lstm_wo.data.data(), p.lstm_bo.data.data(), go.data(), d);
    affine_forward(z.data(), p.x_dim + d, p.lstm_wc.data.data(), p.lstm_bc.data.data(), gc.data(), d);
    for (int j = 0; j < d; ++j) {
        const double i = sigmoid(gi[uz(j)]);
        const double f = sigmoid(gf[uz(j)]);
        const double o = sigmoid(go[uz(j)]);
        const double g = std::tanh(gc[uz(j)]);
        c_out[j] = f * c[j] + i * g;
        h_out[j] = o * std::tanh(c_out[j]);
    }
}

std::vector<double> attention_logits(const Mat& embeddings, const double* memory_h,
                                     const LayerParams& p) {
    if (embeddings.cols != p.dim)
        throw std::invalid_argument("attention_logits: embedding width mismatch");
    const int d = p.dim;
    std::vector<double> w2h(uz(d));
    affine_forward(memory_h, d, p.attn_w2.data.data(), nullptr, w2h.data(), d);
    std::vector<double> logits(uz(embeddings.rows));
    std::vector<double> t(uz(d));
    for (int r = 0; r < embeddings.rows; ++r) {
        affine_forward(embeddings.row_ptr(r), d, p.attn_w1.data.data(), nullptr, t.data(), d);
        double u = 0.0;
        for (int j = 0; j < d; ++j) u += p.attn_v.data[uz(j)] * std::tanh(t[uz(j)] + w2h[uz(j)]);
        logits[uz(r)] = u;
    }
    return logits;
}

std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<char>& mask) {
    if (logits.size() != mask.size())
        throw std::invalid_argument("masked_softmax: size mismatch");
    double mx = -1e300;
    bool any = false;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            any = true;
            mx = std::max(mx, logits[i]);
        }
    }
    if (!any) throw std::invalid_argument("masked_softmax: all entries masked");
    std::vector<double> out(logits.size(), 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        out[i] = std::exp(logits[i] - mx);
        z += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= z;
    return out;
}

const Tape::Node& Tape::node(Var v) const {
    if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
        throw std::runtime_error("tape: invalid node reference");
    return nodes_[uz(v.id)];
}

Tape::Var Tape::push(Op op, int n, int p0, int p1, int p2) {
    Node nd;
    nd.op = op;
    nd.p0 = p0;
    nd.p1 = p1;
    nd.p2 = p2;
    nd.off = static_cast<int>(vals_.size());
    nd.n = n;
    vals_.resize(vals_.size() + uz(n), 0.0);
    nodes_.push_back(nd);
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::leaf(Array& param) {
    param.ensure_grad();
    Var v = push(Op::leaf, param.size());
    nodes_.back().param = &param;
    std::copy(param.data.begin(), param.data.end(), val(v.id));
    return v;
}

Tape::Var Tape::constant(std::span<const double> x) {
    Var v = push(Op::constant, static_cast<int>(x.size()));
    std::copy(x.begin(), x.end(), val(v.id));
    return v;
}

Tape::Var Tape::affine(Var x, Var w, Var b) {
    const int xn = node(x).n;
    const int wn = node(w).n;
    if (wn % xn != 0) throw std::invalid_argument("tape affine: shape mismatch");
    const int out = wn / xn;
    if (b.valid() && node(b).n != out) throw std::invalid_argument("tape affine: bias mismatch");
    Var y = push(Op::affine, out, x.id, w.id, b.valid() ? b.id : -1);
    affine_forward(val(x.id), xn, val(w.id), b.valid() ? val(b.id) : nullptr, val(y.id), out);
    return y;
}

Tape::Var Tape::add(Var a, Var b) {
    const int n = node(a).n;
    if (n != node(b).n) throw std::invalid_argument("tape add: size mismatch");
    Var y = push(Op::add, n, a.id, b.id);
    const double* pa = val(a.id);
    const double* pb = val(b.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = pa[i] + pb[i];
    return y;
}

Tape::Var Tape::mul(Var a, Var b) {
    const int n = node(a).n;
    if (n != node(b).n) throw std::invalid_argument("tape mul: size mismatch");
    Var y = push(Op::mul, n, a.id, b.id);
    const double* pa = val(a.id);
    const double* pb = val(b.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = pa[i] * pb[i];
    return y;
}

Tape::Var Tape::tanh_(Var x) {
    const int n = node(x).n;
    Var y = push(Op::tanh_fn, n, x.id);
    const double* px = val(x.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = std::tanh(px[i]);
    return y;
}

Tape::Var Tape::sigmoid_(Var x) {
    const int n = node(x).n;
    Var y = push(Op::sigmoid_fn, n, x.id);
    const double* px = val(x.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = sigmoid(px[i]);
    return y;
}

Tape::Var Tape::log_(Var x) {
    const int n = node(x).n;
    Var y = push(Op::log_fn, n, x.id);
    const double* px = val(x.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = std::log(px[i]);
    return y;
}

Tape::Var Tape::concat(Var a, Var b) {
    const int an = node(a).n;
    const int bn = node(b).n;
    Var y = push(Op::concat, an + bn, a.id, b.id);
    std::copy(val(a.id), val(a.id) + an, val(y.id));
    std::copy(val(b.id), val(b.id) + bn, val(y.id) + an);
    return y;
}

Tape::Var Tape::dot(Var a, Var b) {
    const int n = node(a).n;
    if (n != node(b).n) throw std::invalid_argument("tape dot: size mismatch");
    Var y = push(Op::dot, 1, a.id, b.id);
    const double* pa = val(a.id);
    const double* pb = val(b.id);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += pa[i] * pb[i];
    *val(y.id) = s;
    return y;
}

Tape::Var Tape::sum(Var x) {
    const int n = node(x).n;
    Var y = push(Op::sum, 1, x.id);
    const double* px = val(x.id);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += px[i];
    *val(y.id) = s;
    return y;
}

Tape::Var Tape::pick(Var x, int index) {
    if (index < 0 || index >= node(x).n)
        throw std::invalid_argument("tape pick: index out of range");
    Var y = push(Op::pick, 1, x.id);
    nodes_.back().index = index;
    *val(y.id) = val(x.id)[index];
    return y;
}

Tape::Var Tape::scale(Var x, double c) {
    const int n = node(x).n;
    Var y = push(Op::scale, n, x.id);
    nodes_.back().c = c;
    const double* px = val(x.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = c * px[i];
    return y;
}

Tape::Var Tape::add_scalar(Var x, double c) {
    const int n = node(x).n;
    Var y = push(Op::add_scalar, n, x.id);
    nodes_.back().c = c;
    const double* px = val(x.id);
    double* py = val(y.id);
    for (int i = 0; i < n; ++i) py[i] = px[i] + c;
    return y;
}

Tape::Var Tape::stack(std::span<const Var> scalars) {
    if (scalars.empty()) throw std::invalid_argument("tape stack: empty");
    for (Var s : scalars)
        if (node(s).n != 1) throw std::invalid_argument("tape stack: parents must be scalars");
    const int eoff = static_cast<int>(extra_.size());
    for (Var s : scalars) extra_.push_back(s.id);
    Var y = push(Op::stack, static_cast<int>(scalars.size()));
    nodes_.back().extra_off = eoff;
    nodes_.back().extra_n = static_cast<int>(scalars.size());
    double* py = val(y.id);
    for (std::size_t i = 0; i < scalars.size(); ++i) py[i] = *val(scalars[i].id);
    return y;
}

Tape::Var Tape::mean_stack(std::span<const Var> vectors) {
    if (vectors.empty()) throw std::invalid_argument("tape mean_stack: empty");
    const int n = node(vectors[0]).n;
    for (Var v : vectors)
        if (node(v).n != n) throw std::invalid_argument("tape mean_stack: size mismatch");
    const int eoff = static_cast<int>(extra_.size());
    for (Var v : vectors) extra_.push_back(v.id);
    Var y = push(Op::mean_stack, n);
    nodes_.back().extra_off = eoff;
    nodes_.back().extra_n = static_cast<int>(vectors.size());
    double* py = val(y.id);
    const double inv = 1.0 / static_cast<double>(vectors.size());
    for (Var v : vectors) {
        const double* pv = val(v.id);
        for (int i = 0; i < n; ++i) py[i] += pv[i];
    }
    for (int i = 0; i < n; ++i) py[i] *= inv;
    return y;
}

Tape::Var Tape::masked_softmax(Var logits, const std::vector<char>& mask) {
    const int n = node(logits).n;
    if (static_cast<int>(mask.size()) != n)
        throw std::invalid_argument("tape masked_softmax: size mismatch");
    std::vector<double> in(val(logits.id), val(logits.id) + n);
    std::vector<double> probs = svrp::masked_softmax(in, mask);
    const int moff = static_cast<int>(mask_pool_.size());
    mask_pool_.insert(mask_pool_.end(), mask.begin(), mask.end());
    Var y = push(Op::masked_softmax, n, logits.id);
    nodes_.back().extra_off = moff;
    std::copy(probs.begin(), probs.end(), val(y.id));
    return y;
}

std::span<const double> Tape::values(Var v) const {
    const Node& n = node(v);
    return {vals_.data() + n.off, static_cast<std::size_t>(n.n)};
}

int Tape::size(Var v) const { return node(v).n; }

void Tape::backward(Var scalar_output) {
    const Node& out = node(scalar_output);
    if (out.n != 1) throw std::invalid_argument("backward: output must be scalar");
    grads_.assign(vals_.size(), 0.0);
    grads_[uz(out.off)] = 1.0;
    for (int id = scalar_output.id; id >= 0; --id) {
        const Node& nd = nodes_[uz(id)];
        const double* g = grads_.data() + nd.off;
        bool used = false;
        for (int i = 0; i < nd.n && !used; ++i) used = g[i] != 0.0;
        if (!used) continue;
        switch (nd.op) {
            case Op::leaf:
                for (int i = 0; i < nd.n; ++i) nd.param->grad[uz(i)] += g[i];
                break;
            case Op::constant:
                break;
            case Op::affine: {
                const Node& nx = nodes_[uz(nd.p0)];
                const double* x = val(nd.p0);
                const double* w = val(nd.p1);
                double* gx = grads_.data() + nx.off;
                double* gw = grads_.data() + nodes_[uz(nd.p1)].off;
                for (int i = 0; i < nx.n; ++i) {
                    const double* wrow = w + static_cast<std::ptrdiff_t>(i) * nd.n;
                    double* gwrow = gw + static_cast<std::ptrdiff_t>(i) * nd.n;
                    double acc = 0.0;
                    for (int j = 0; j < nd.n; ++j) {
                        acc += wrow[j] * g[j];
                        gwrow[j] += x[i] * g[j];
                    }
                    gx[i] += acc;
                }
                if (nd.p2 >= 0) {
                    double* gb = grads_.data() + nodes_[uz(nd.p2)].off;
                    for (int j = 0; j < nd.n; ++j) gb[j] += g[j];
                }
                break;
            }
            case Op::add: {
                double* ga = grads_.data() + nodes_[uz(nd.p0)].off;
                double* gb = grads_.data() + nodes_[uz(nd.p1)].off;
                for (int i = 0; i < nd.n; ++i) {
                    ga[i] += g[i];
                    gb[i] += g[i];
                }
                break;
            }
            case Op::mul: {
                const double* a = val(nd.p0);
                const double* b = val(nd.p1);
                double* ga = grads_.data() + nodes_[uz(nd.p0)].off;
                double* gb = grads_.data() + nodes_[uz(nd.p1)].off;
                for (int i = 0; i < nd.n; ++i) {
                    ga[i] += g[i] * b[i];
                    gb[i] += g[i] * a[i];
                }
                break;
            }
            case Op::tanh_fn: {
                const double* y = val(id);
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                for (int i = 0; i < nd.n; ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::sigmoid_fn: {
                const double* y = val(id);
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                for (int i = 0; i < nd.n; ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case Op::log_fn: {
                const double* x = val(nd.p0);
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                for (int i = 0; i < nd.n; ++i) gx[i] += g[i] / x[i];
                break;
            }
            case Op::concat: {
                const Node& na = nodes_[uz(nd.p0)];
                double* ga = grads_.data() + na.off;
                double* gb = grads_.data() + nodes_[uz(nd.p1)].off;
                for (int i = 0; i < na.n; ++i) ga[i] += g[i];
                for (int i = na.n; i < nd.n; ++i) gb[i - na.n] += g[i];
                break;
            }
            case Op::dot: {
                const Node& na = nodes_[uz(nd.p0)];
                const double* a = val(nd.p0);
                const double* b = val(nd.p1);
                double* ga = grads_.data() + na.off;
                double* gb = grads_.data() + nodes_[uz(nd.p1)].off;
                for (int i = 0; i < na.n; ++i) {
                    ga[i] += g[0] * b[i];
                    gb[i] += g[0] * a[i];
                }
                break;
            }
            case Op::sum: {
                const Node& nx = nodes_[uz(nd.p0)];
                double* gx = grads_.data() + nx.off;
                for (int i = 0; i < nx.n; ++i) gx[i] += g[0];
                break;
            }
            case Op::pick:
                grads_[uz(nodes_[uz(nd.p0)].off + nd.index)] += g[0];
                break;
            case Op::scale: {
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                for (int i = 0; i < nd.n; ++i) gx[i] += nd.c * g[i];
                break;
            }
            case Op::add_scalar: {
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                for (int i = 0; i < nd.n; ++i) gx[i] += g[i];
                break;
            }
            case Op::stack:
                for (int i = 0; i < nd.extra_n; ++i) {
                    const int pid = extra_[uz(nd.extra_off + i)];
                    grads_[uz(nodes_[uz(pid)].off)] += g[i];
                }
                break;
            case Op::mean_stack: {
                const double inv = 1.0 / static_cast<double>(nd.extra_n);
                for (int k = 0; k < nd.extra_n; ++k) {
                    const int pid = extra_[uz(nd.extra_off + k)];
                    double* gp = grads_.data() + nodes_[uz(pid)].off;
                    for (int i = 0; i < nd.n; ++i) gp[i] += inv * g[i];
                }
                break;
            }
            case Op::masked_softmax: {
                const double* p = val(id);
                const char* m = mask_pool_.data() + nd.extra_off;
                double* gx = grads_.data() + nodes_[uz(nd.p0)].off;
                double dotpg = 0.0;
                for (int i = 0; i < nd.n; ++i) dotpg += p[i] * g[i];
                for (int i = 0; i < nd.n; ++i) {
                    if (m[i]) gx[i] += p[i] * (g[i] - dotpg);
                }
                break;
            }
        }
    }
}

void Tape::reset() {
    nodes_.clear();
    vals_.clear();
    grads_.clear();
    extra_.clear();
    mask_pool_.clear();
}

nlohmann::json arrays_to_json(
    const std::vector<std::pair<std::string, const Array*>>& arrays) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, arr] : arrays) {
        j[name] = {{"shape", arr->shape}, {"data", arr->data}};
    }
    return j;
}

void arrays_from_json(const nlohmann::json& j,
                      const std::vector<std::pair<std::string, Array*>>& arrays) {
    for (const auto& [name, arr] : arrays) {
        if (!j.contains(name)) throw std::runtime_error("checkpoint: missing array " + name);
        const auto& e = j.at(name);
        const auto shape = e.at("shape").get<std::vector<int>>();
        if (shape != arr->shape) throw std::runtime_error("checkpoint: shape mismatch for " + name);
        const auto data = e.at("data").get<std::vector<double>>();
        if (static_cast<int>(data.size()) != shape_size(shape))
            throw std::runtime_error("checkpoint: data length mismatch for " + name);
        arr->data = data;
    }
}

}  // namespace svrp
