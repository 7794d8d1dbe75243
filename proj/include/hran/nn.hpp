#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/tensor.hpp"

namespace hran {

// One GRU direction. Gate convention (pinned; variants differ):
//   z = sigmoid(Wz x + Uz h_prev + bz)
//   r = sigmoid(Wr x + Ur h_prev + br)
//   hc = tanh(Wh x + Uh (r .* h_prev) + bh)
//   h = (1 - z) .* h_prev + z .* hc
struct GruParams {
    Mat wz, uz, wr, ur, wh, uh;  // W: H x I, U: H x H
    Vec bz, br, bh;              // H

    size_t input_dim() const { return wz.cols; }
    size_t hidden_dim() const { return wz.rows; }
};

// tanh-MLP projection scored against a learned query vector.
struct AttentionParams {
    Mat w;  // A x S, square here (A == S)
    Vec b;  // A
    Vec u;  // A, the query
};

struct ModelDims {
    size_t feature_dim = 88;
    size_t hidden_sub = 64;
    size_t hidden_turn = 16;
};

struct ModelFlags {
    bool use_sub_attention = true;
    bool use_turn_attention = true;
};

// Tensors shared between the parameter set and its gradients.
struct ModelTensors {
    GruParams sub_fwd, sub_bwd;    // input D       -> hidden H_sub
    GruParams turn_fwd, turn_bwd;  // input 2*H_sub -> hidden H_turn
    AttentionParams sub_attn;      // S = 2*H_sub
    AttentionParams turn_attn;     // S = 2*H_turn
    Mat w_out;                     // 2 x 2*H_turn
    Vec b_out;                     // 2
};

struct ModelParams : ModelTensors {
    ModelDims dims;
    ModelFlags flags;
};

using Gradients = ModelTensors;

ModelParams make_params(const ModelDims& dims, const ModelFlags& flags);  // zeros
// Glorot-uniform weights, +-0.05 biases and query vectors; all tensors are
// drawn regardless of flags so ablation variants share initializations.
ModelParams init_params(const ModelDims& dims, const ModelFlags& flags, uint64_t seed);
Gradients make_gradients(const ModelParams& params);  // zeros, congruent shapes

// Visits every tensor as (name, vector<double>&) in a fixed order; shared by
// the optimizer, the checkpoint writer, and the finite-difference harness.
template <class Tensors, class F>
void visit_tensors(Tensors& t, F&& f) {
    auto gru = [&f](const std::string& prefix, auto& g) {
        f(prefix + ".wz", g.wz.a);
        f(prefix + ".uz", g.uz.a);
        f(prefix + ".bz", g.bz);
        f(prefix + ".wr", g.wr.a);
        f(prefix + ".ur", g.ur.a);
        f(prefix + ".br", g.br);
        f(prefix + ".wh", g.wh.a);
        f(prefix + ".uh", g.uh.a);
        f(prefix + ".bh", g.bh);
    };
    gru("sub_fwd", t.sub_fwd);
    gru("sub_bwd", t.sub_bwd);
    gru("turn_fwd", t.turn_fwd);
    gru("turn_bwd", t.turn_bwd);
    auto attn = [&f](const std::string& prefix, auto& a) {
        f(prefix + ".w", a.w.a);
        f(prefix + ".b", a.b);
        f(prefix + ".u", a.u);
    };
    attn("sub_attn", t.sub_attn);
    attn("turn_attn", t.turn_attn);
    f(std::string("classifier.w"), t.w_out.a);
    f(std::string("classifier.b"), t.b_out);
}

// --- forward trace -------------------------------------------------------

struct GruStepTrace {
    Vec z, r, hc, h;
};

struct GruSeqTrace {
    std::vector<GruStepTrace> fwd;  // fwd[j]: state after consuming input j
    std::vector<GruStepTrace> bwd;  // bwd[j]: state after consuming inputs N-1..j
};

struct PoolTrace {
    std::vector<Vec> proj;  // u_k = tanh(W h_k + b); empty when attention is off
    Vec weights;            // alpha, uniform when attention is off
    Vec pooled;
};

struct TurnTrace {
    GruSeqTrace gru;
    std::vector<Vec> h_cat;  // h_{i,j}, 2*H_sub each
    PoolTrace pool;          // pooled == t_i
};

struct ForwardTrace {
    std::vector<TurnTrace> turns;
    GruSeqTrace turn_gru;
    std::vector<Vec> turn_h_cat;  // h_i, 2*H_turn each
    PoolTrace turn_pool;          // pooled == s
    Vec logits;                   // W_s s + b_s
    Vec p;                        // softmax(logits), [P(high), P(low)]

    const Vec& turn_attention() const { return turn_pool.weights; }
    const Vec& sub_attention(size_t turn) const { return turns[turn].pool.weights; }
};

// --- operations ----------------------------------------------------------

Vec gru_cell(const Vec& x, const Vec& h_prev, const GruParams& p);

// Concatenated [forward; backward] states per position; zero initial states.
std::vector<Vec> bigru(const std::vector<Vec>& seq, const GruParams& fwd,
                       const GruParams& bwd);

// (embedding, weights)
std::pair<Vec, Vec> attention_pool(const std::vector<Vec>& states,
                                   const AttentionParams& p);

Vec mean_pool(const std::vector<Vec>& states);

// The session must already be normalized (see normalize_session).
ForwardTrace forward(const Session& session, const ModelParams& params);

// -log p_c, with p_c clamped to [1e-12, 1].
double loss(const ForwardTrace& trace, Label label);

// argmax of p; an exact tie predicts High.
Label predict(const ForwardTrace& trace);

Gradients backward(const Session& session, const ModelParams& params,
                   const ForwardTrace& trace, Label label);

// --- checkpoint ----------------------------------------------------------

// Single JSON file; stored values round-trip bit-identically.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

inline constexpr double kProbClamp = 1e-12;

}  // namespace hran
