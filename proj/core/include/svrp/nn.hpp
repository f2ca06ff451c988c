#ifndef SVRP_NN_HPP
#define SVRP_NN_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "svrp/mat.hpp"
#include "svrp/rng.hpp"

namespace svrp {

// Dense 64-bit float buffer with an optional gradient buffer of the same
// shape. Gradients accumulate until zero_grad().
struct Array {
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad;

    Array() = default;
    explicit Array(std::vector<int> s);

    int size() const { return static_cast<int>(data.size()); }
    void ensure_grad();
    void zero_grad();
};

int shape_size(const std::vector<int>& shape);

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization.
Array init_array(std::vector<int> shape, int fan_in, Rng& rng);

// Named parameter set for the three layer primitives. Weights are stored
// fan_in x fan_out row-major and applied as y = x^T W + b, so the LSTM gate
// matrices are (x_dim + dim) x dim over the concatenated [x, h] input.
struct LayerParams {
    int dim = 128;
    int input_dim = 0;
    int x_dim = 0;
    Array embed_w, embed_b;
    Array lstm_wi, lstm_bi, lstm_wf, lstm_bf, lstm_wo, lstm_bo, lstm_wc, lstm_bc;
    Array attn_w1, attn_w2, attn_v;

    std::vector<std::pair<std::string, Array*>> named();
    std::vector<std::pair<std::string, const Array*>> named() const;
};

LayerParams init_layer_params(int input_dim, int x_dim, int dim, Rng& rng);

// Plain forward kernels (no gradient recording).

// Shared affine map per node row followed by tanh; rows of node_inputs must
// be input_dim wide, output is rows x dim.
Mat embed_nodes(const Mat& node_inputs, const LayerParams& p);

// Standard gate equations; all buffers are dim wide except x (x_dim).
void lstm_step(const double* x, const double* h, const double* c, const LayerParams& p,
               double* h_out, double* c_out);

// u_i = v . tanh(e_i W1 + h W2) for every embedding row.
std::vector<double> attention_logits(const Mat& embeddings, const double* memory_h,
                                     const LayerParams& p);

// Masked entries get probability exactly 0; the rest are softmax-normalized
// with max-subtraction. mask[i] != 0 means feasible.
std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<char>& mask);

// Reverse-mode tape over vector-valued nodes. Values live in one arena and
// backward() fills a parallel gradient arena, flushing leaf gradients into
// the referenced Array::grad buffers (accumulating across tapes). Spans
// returned by values() are invalidated by the next recorded op.
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    Var leaf(Array& param);
    Var constant(std::span<const double> x);

    // y = x^T W + b; pass an invalid Var as b to skip the bias.
    Var affine(Var x, Var w, Var b);
    Var add(Var a, Var b);
    Var mul(Var a, Var b);
    Var tanh_(Var x);
    Var sigmoid_(Var x);
    Var log_(Var x);
    Var concat(Var a, Var b);
    Var dot(Var a, Var b);
    Var sum(Var x);
    Var pick(Var x, int index);
    Var scale(Var x, double c);
    Var add_scalar(Var x, double c);
    Var stack(std::span<const Var> scalars);
    Var mean_stack(std::span<const Var> vectors);
    Var masked_softmax(Var logits, const std::vector<char>& mask);

    std::span<const double> values(Var v) const;
    int size(Var v) const;

    // Seeds d(output)=1 and runs the reverse sweep; output must be scalar.
    void backward(Var scalar_output);

    void reset();
    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op {
        leaf,
        constant,
        affine,
        add,
        mul,
        tanh_fn,
        sigmoid_fn,
        log_fn,
        concat,
        dot,
        sum,
        pick,
        scale,
        add_scalar,
        stack,
        mean_stack,
        masked_softmax
    };

    struct Node {
        Op op;
        int p0 = -1, p1 = -1, p2 = -1;
        int off = 0, n = 0;
        int extra_off = 0, extra_n = 0;  // stack/mean_stack parents, softmax mask
        int index = 0;                   // pick
        double c = 0.0;                  // scale/add_scalar
        Array* param = nullptr;          // leaf
    };

    Var push(Op op, int n, int p0 = -1, int p1 = -1, int p2 = -1);
    double* val(int id) { return vals_.data() + nodes_[static_cast<std::size_t>(id)].off; }
    const double* val(int id) const {
        return vals_.data() + nodes_[static_cast<std::size_t>(id)].off;
    }
    const Node& node(Var v) const;

    std::vector<Node> nodes_;
    std::vector<double> vals_;
    std::vector<double> grads_;
    std::vector<int> extra_;
    std::vector<char> mask_pool_;
};

// Checkpoint helpers: {"name": {"shape": [...], "data": [...]}} maps.
nlohmann::json arrays_to_json(const std::vector<std::pair<std::string, const Array*>>& arrays);
void arrays_from_json(const nlohmann::json& j,
                      const std::vector<std::pair<std::string, Array*>>& arrays);

}  // namespace svrp

#endif
