#include "hran/nn.hpp"

#include <algorithm>
#include <cmath>

#include "hran/errors.hpp"
#include "hran/kernels.hpp"
#include "hran/rng.hpp"

namespace hran {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmax_inplace(Vec& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

using VecRefs = std::vector<const Vec*>;

GruStepTrace gru_step_forward(const Vec& x, const Vec& h_prev, const GruParams& p) {
    const size_t hidden = p.hidden_dim();
    const size_t input = p.input_dim();
    GruStepTrace t;
    t.z.resize(hidden);
    t.r.resize(hidden);
    t.hc.resize(hidden);
    t.h.resize(hidden);

    kernels::matvec_bias(p.wz.a.data(), hidden, input, x.data(), p.bz.data(), t.z.data());
    kernels::matvec_acc(p.uz.a.data(), hidden, hidden, h_prev.data(), t.z.data());
    kernels::matvec_bias(p.wr.a.data(), hidden, input, x.data(), p.br.data(), t.r.data());
    kernels::matvec_acc(p.ur.a.data(), hidden, hidden, h_prev.data(), t.r.data());
    for (size_t i = 0; i < hidden; ++i) {
        t.z[i] = sigmoid(t.z[i]);
        t.r[i] = sigmoid(t.r[i]);
    }

    Vec rh(hidden);
    for (size_t i = 0; i < hidden; ++i) rh[i] = t.r[i] * h_prev[i];
    kernels::matvec_bias(p.wh.a.data(), hidden, input, x.data(), p.bh.data(), t.hc.data());
    kernels::matvec_acc(p.uh.a.data(), hidden, hidden, rh.data(), t.hc.data());
    for (size_t i = 0; i < hidden; ++i) {
        t.hc[i] = std::tanh(t.hc[i]);
        t.h[i] = (1.0 - t.z[i]) * h_prev[i] + t.z[i] * t.hc[i];
    }
    return t;
}

// Accumulates parameter gradients into g; returns (gx, gh_prev).
void gru_step_backward(const Vec& x, const Vec& h_prev, const GruStepTrace& t,
                       const Vec& gh, const GruParams& p, GruParams& g, Vec& gx,
                       Vec& gh_prev) {
    const size_t hidden = p.hidden_dim();
    const size_t input = p.input_dim();

    Vec dzp(hidden), dhcp(hidden), rh(hidden);
    gh_prev.assign(hidden, 0.0);
    for (size_t i = 0; i < hidden; ++i) {
        const double dz = gh[i] * (t.hc[i] - h_prev[i]);
        const double dhc = gh[i] * t.z[i];
        gh_prev[i] = gh[i] * (1.0 - t.z[i]);
        dzp[i] = dz * t.z[i] * (1.0 - t.z[i]);
        dhcp[i] = dhc * (1.0 - t.hc[i] * t.hc[i]);
        rh[i] = t.r[i] * h_prev[i];
    }

    kernels::outer_acc(dhcp.data(), hidden, x.data(), input, g.wh.a.data());
    kernels::outer_acc(dhcp.data(), hidden, rh.data(), hidden, g.uh.a.data());
    kernels::axpy(1.0, dhcp.data(), g.bh.data(), hidden);

    Vec grh(hidden, 0.0);  // grad wrt r .* h_prev
    kernels::matvec_t_acc(p.uh.a.data(), hidden, hidden, dhcp.data(), grh.data());

    Vec drp(hidden);
    for (size_t i = 0; i < hidden; ++i) {
        const double dr = grh[i] * h_prev[i];
        gh_prev[i] += grh[i] * t.r[i];
        drp[i] = dr * t.r[i] * (1.0 - t.r[i]);
    }

    kernels::outer_acc(drp.data(), hidden, x.data(), input, g.wr.a.data());
    kernels::outer_acc(drp.data(), hidden, h_prev.data(), hidden, g.ur.a.data());
    kernels::axpy(1.0, drp.data(), g.br.data(), hidden);
    kernels::matvec_t_acc(p.ur.a.data(), hidden, hidden, drp.data(), gh_prev.data());

    kernels::outer_acc(dzp.data(), hidden, x.data(), input, g.wz.a.data());
    kernels::outer_acc(dzp.data(), hidden, h_prev.data(), hidden, g.uz.a.data());
    kernels::axpy(1.0, dzp.data(), g.bz.data(), hidden);
    kernels::matvec_t_acc(p.uz.a.data(), hidden, hidden, dzp.data(), gh_prev.data());

    gx.assign(input, 0.0);
    kernels::matvec_t_acc(p.wz.a.data(), hidden, input, dzp.data(), gx.data());
    kernels::matvec_t_acc(p.wr.a.data(), hidden, input, drp.data(), gx.data());
    kernels::matvec_t_acc(p.wh.a.data(), hidden, input, dhcp.data(), gx.data());
}

void gru_seq_forward(const VecRefs& inputs, const GruParams& fwd, const GruParams& bwd,
                     GruSeqTrace& trace, std::vector<Vec>& h_cat) {
    const size_t n = inputs.size();
    const size_t hidden = fwd.hidden_dim();
    trace.fwd.resize(n);
    trace.bwd.resize(n);

    const Vec zero(hidden, 0.0);
    const Vec* h_prev = &zero;
    for (size_t j = 0; j < n; ++j) {
        trace.fwd[j] = gru_step_forward(*inputs[j], *h_prev, fwd);
        h_prev = &trace.fwd[j].h;
    }
    h_prev = &zero;
    for (size_t j = n; j-- > 0;) {
        trace.bwd[j] = gru_step_forward(*inputs[j], *h_prev, bwd);
        h_prev = &trace.bwd[j].h;
    }

    h_cat.resize(n);
    for (size_t j = 0; j < n; ++j) {
        h_cat[j].resize(2 * hidden);
        std::copy(trace.fwd[j].h.begin(), trace.fwd[j].h.end(), h_cat[j].begin());
        std::copy(trace.bwd[j].h.begin(), trace.bwd[j].h.end(), h_cat[j].begin() + hidden);
    }
}

// gh_cat holds gradients wrt the concatenated outputs; returns gradients wrt
// the inputs in ginputs.
void gru_seq_backward(const VecRefs& inputs, const GruParams& fwdp, const GruParams& bwdp,
                      const GruSeqTrace& trace, const std::vector<Vec>& gh_cat,
                      GruParams& gfwd, GruParams& gbwd, std::vector<Vec>& ginputs) {
    const size_t n = inputs.size();
    const size_t hidden = fwdp.hidden_dim();
    const Vec zero(hidden, 0.0);

    ginputs.assign(n, Vec(fwdp.input_dim(), 0.0));

    // forward chain, reverse time
    Vec carry(hidden, 0.0), gh(hidden), gx, ghp;
    for (size_t j = n; j-- > 0;) {
        for (size_t i = 0; i < hidden; ++i) gh[i] = gh_cat[j][i] + carry[i];
        const Vec& h_prev = j > 0 ? trace.fwd[j - 1].h : zero;
        gru_step_backward(*inputs[j], h_prev, trace.fwd[j], gh, fwdp, gfwd, gx, ghp);
        kernels::axpy(1.0, gx.data(), ginputs[j].data(), gx.size());
        carry = ghp;
    }

    // backward chain, reverse consumption order means increasing j
    std::fill(carry.begin(), carry.end(), 0.0);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < hidden; ++i) gh[i] = gh_cat[j][hidden + i] + carry[i];
        const Vec& h_prev = j + 1 < n ? trace.bwd[j + 1].h : zero;
        gru_step_backward(*inputs[j], h_prev, trace.bwd[j], gh, bwdp, gbwd, gx, ghp);
        kernels::axpy(1.0, gx.data(), ginputs[j].data(), gx.size());
        carry = ghp;
    }
}

PoolTrace pool_forward(const std::vector<Vec>& states, const AttentionParams& p,
                       bool use_attention) {
    const size_t k = states.size();
    const size_t dim = states.front().size();
    PoolTrace t;
    t.pooled.assign(dim, 0.0);
    if (!use_attention) {
        t.weights.assign(k, 1.0 / static_cast<double>(k));
        for (const Vec& h : states) {
            kernels::axpy(1.0 / static_cast<double>(k), h.data(), t.pooled.data(), dim);
        }
        return t;
    }
    const size_t attn = p.u.size();
    t.proj.resize(k);
    t.weights.resize(k);
    for (size_t i = 0; i < k; ++i) {
        t.proj[i].resize(attn);
        kernels::matvec_bias(p.w.a.data(), attn, dim, states[i].data(), p.b.data(),
                             t.proj[i].data());
        for (double& x : t.proj[i]) x = std::tanh(x);
        t.weights[i] = kernels::dot(t.proj[i].data(), p.u.data(), attn);
    }
    softmax_inplace(t.weights);
    for (size_t i = 0; i < k; ++i) {
        kernels::axpy(t.weights[i], states[i].data(), t.pooled.data(), dim);
    }
    return t;
}

void pool_backward(const std::vector<Vec>& states, const PoolTrace& t, const Vec& gpooled,
                   const AttentionParams& p, bool use_attention, AttentionParams& g,
                   std::vector<Vec>& gstates) {
    const size_t k = states.size();
    const size_t dim = states.front().size();
    gstates.assign(k, Vec(dim, 0.0));
    if (!use_attention) {
        for (size_t i = 0; i < k; ++i) {
            kernels::axpy(1.0 / static_cast<double>(k), gpooled.data(), gstates[i].data(),
                          dim);
        }
        return;
    }
    const size_t attn = p.u.size();
    Vec galpha(k);
    double dotsum = 0.0;
    for (size_t i = 0; i < k; ++i) {
        galpha[i] = kernels::dot(gpooled.data(), states[i].data(), dim);
        dotsum += t.weights[i] * galpha[i];
        kernels::axpy(t.weights[i], gpooled.data(), gstates[i].data(), dim);
    }
    Vec gq(attn);
    for (size_t i = 0; i < k; ++i) {
        const double ge = t.weights[i] * (galpha[i] - dotsum);
        kernels::axpy(ge, t.proj[i].data(), g.u.data(), attn);
        for (size_t a = 0; a < attn; ++a) {
            gq[a] = ge * p.u[a] * (1.0 - t.proj[i][a] * t.proj[i][a]);
        }
        kernels::outer_acc(gq.data(), attn, states[i].data(), dim, g.w.a.data());
        kernels::axpy(1.0, gq.data(), g.b.data(), attn);
        kernels::matvec_t_acc(p.w.a.data(), attn, dim, gq.data(), gstates[i].data());
    }
}

Mat zero_mat(size_t r, size_t c) { return Mat(r, c); }

GruParams make_gru(size_t input, size_t hidden) {
    GruParams g;
    g.wz = zero_mat(hidden, input);
    g.uz = zero_mat(hidden, hidden);
    g.bz.assign(hidden, 0.0);
    g.wr = zero_mat(hidden, input);
    g.ur = zero_mat(hidden, hidden);
    g.br.assign(hidden, 0.0);
    g.wh = zero_mat(hidden, input);
    g.uh = zero_mat(hidden, hidden);
    g.bh.assign(hidden, 0.0);
    return g;
}

AttentionParams make_attn(size_t dim) {
    AttentionParams a;
    a.w = zero_mat(dim, dim);
    a.b.assign(dim, 0.0);
    a.u.assign(dim, 0.0);
    return a;
}

void glorot_fill(Mat& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    for (double& x : m.a) x = rng.uniform(-limit, limit);
}

void small_fill(Vec& v, Rng& rng) {
    for (double& x : v) x = rng.uniform(-0.05, 0.05);
}

void init_gru(GruParams& g, Rng& rng) {
    glorot_fill(g.wz, rng);
    glorot_fill(g.uz, rng);
    small_fill(g.bz, rng);
    glorot_fill(g.wr, rng);
    glorot_fill(g.ur, rng);
    small_fill(g.br, rng);
    glorot_fill(g.wh, rng);
    glorot_fill(g.uh, rng);
    small_fill(g.bh, rng);
}

void init_attn(AttentionParams& a, Rng& rng) {
    glorot_fill(a.w, rng);
    small_fill(a.b, rng);
    small_fill(a.u, rng);
}

}  // namespace

ModelParams make_params(const ModelDims& dims, const ModelFlags& flags) {
    if (dims.feature_dim == 0 || dims.hidden_sub == 0 || dims.hidden_turn == 0) {
        throw validation_error("model dimensions must be positive");
    }
    ModelParams p;
    p.dims = dims;
    p.flags = flags;
    p.sub_fwd = make_gru(dims.feature_dim, dims.hidden_sub);
    p.sub_bwd = make_gru(dims.feature_dim, dims.hidden_sub);
    p.turn_fwd = make_gru(2 * dims.hidden_sub, dims.hidden_turn);
    p.turn_bwd = make_gru(2 * dims.hidden_sub, dims.hidden_turn);
    p.sub_attn = make_attn(2 * dims.hidden_sub);
    p.turn_attn = make_attn(2 * dims.hidden_turn);
    p.w_out = zero_mat(2, 2 * dims.hidden_turn);
    p.b_out.assign(2, 0.0);
    return p;
}

ModelParams init_params(const ModelDims& dims, const ModelFlags& flags, uint64_t seed) {
    ModelParams p = make_params(dims, flags);
    Rng rng(derive_seed(seed, 0x7a7a));
    init_gru(p.sub_fwd, rng);
    init_gru(p.sub_bwd, rng);
    init_gru(p.turn_fwd, rng);
    init_gru(p.turn_bwd, rng);
    init_attn(p.sub_attn, rng);
    init_attn(p.turn_attn, rng);
    glorot_fill(p.w_out, rng);
    small_fill(p.b_out, rng);
    return p;
}

Gradients make_gradients(const ModelParams& params) {
    Gradients g;
    g.sub_fwd = make_gru(params.dims.feature_dim, params.dims.hidden_sub);
    g.sub_bwd = make_gru(params.dims.feature_dim, params.dims.hidden_sub);
    g.turn_fwd = make_gru(2 * params.dims.hidden_sub, params.dims.hidden_turn);
    g.turn_bwd = make_gru(2 * params.dims.hidden_sub, params.dims.hidden_turn);
    g.sub_attn = make_attn(2 * params.dims.hidden_sub);
    g.turn_attn = make_attn(2 * params.dims.hidden_turn);
    g.w_out = zero_mat(2, 2 * params.dims.hidden_turn);
    g.b_out.assign(2, 0.0);
    return g;
}

Vec gru_cell(const Vec& x, const Vec& h_prev, const GruParams& p) {
    if (x.size() != p.input_dim() || h_prev.size() != p.hidden_dim()) {
        throw validation_error("gru_cell: dimension mismatch");
    }
    return gru_step_forward(x, h_prev, p).h;
}

std::vector<Vec> bigru(const std::vector<Vec>& seq, const GruParams& fwd,
                       const GruParams& bwd) {
    if (seq.empty()) throw validation_error("bigru: empty sequence");
    if (fwd.hidden_dim() != bwd.hidden_dim() || fwd.input_dim() != bwd.input_dim()) {
        throw validation_error("bigru: direction parameter shapes differ");
    }
    for (const Vec& x : seq) {
        if (x.size() != fwd.input_dim()) throw validation_error("bigru: dimension mismatch");
    }
    VecRefs refs;
    refs.reserve(seq.size());
    for (const Vec& x : seq) refs.push_back(&x);
    GruSeqTrace trace;
    std::vector<Vec> h_cat;
    gru_seq_forward(refs, fwd, bwd, trace, h_cat);
    return h_cat;
}

std::pair<Vec, Vec> attention_pool(const std::vector<Vec>& states,
                                   const AttentionParams& p) {
    if (states.empty()) throw validation_error("attention_pool: empty state list");
    for (const Vec& h : states) {
        if (h.size() != p.w.cols) throw validation_error("attention_pool: dimension mismatch");
    }
    PoolTrace t = pool_forward(states, p, true);
    return {std::move(t.pooled), std::move(t.weights)};
}

Vec mean_pool(const std::vector<Vec>& states) {
    if (states.empty()) throw validation_error("mean_pool: empty state list");
    Vec out(states.front().size(), 0.0);
    for (const Vec& h : states) {
        kernels::axpy(1.0 / static_cast<double>(states.size()), h.data(), out.data(),
                      out.size());
    }
    return out;
}

ForwardTrace forward(const Session& session, const ModelParams& params) {
    validate_session(session, params.dims.feature_dim);

    ForwardTrace trace;
    trace.turns.resize(session.turns.size());
    VecRefs turn_inputs;
    turn_inputs.reserve(session.turns.size());

    for (size_t i = 0; i < session.turns.size(); ++i) {
        const Turn& turn = session.turns[i];
        VecRefs sub_inputs;
        sub_inputs.reserve(turn.sub_turns.size());
        for (const SubTurn& st : turn.sub_turns) sub_inputs.push_back(&st.features);

        TurnTrace& tt = trace.turns[i];
        gru_seq_forward(sub_inputs, params.sub_fwd, params.sub_bwd, tt.gru, tt.h_cat);
        tt.pool = pool_forward(tt.h_cat, params.sub_attn, params.flags.use_sub_attention);
        turn_inputs.push_back(&tt.pool.pooled);
    }

    gru_seq_forward(turn_inputs, params.turn_fwd, params.turn_bwd, trace.turn_gru,
                    trace.turn_h_cat);
    trace.turn_pool = pool_forward(trace.turn_h_cat, params.turn_attn,
                                   params.flags.use_turn_attention);

    trace.logits.resize(2);
    kernels::matvec_bias(params.w_out.a.data(), 2, params.w_out.cols,
                         trace.turn_pool.pooled.data(), params.b_out.data(),
                         trace.logits.data());
    trace.p = trace.logits;
    softmax_inplace(trace.p);
    return trace;
}

double loss(const ForwardTrace& trace, Label label) {
    if (trace.p.size() != 2) throw validation_error("loss: invalid probability vector");
    const double pc = std::clamp(trace.p[static_cast<size_t>(label)], kProbClamp, 1.0);
    return -std::log(pc);
}

Label predict(const ForwardTrace& trace) {
    return trace.p[0] >= trace.p[1] ? Label::high : Label::low;
}

Gradients backward(const Session& session, const ModelParams& params,
                   const ForwardTrace& trace, Label label) {
    if (trace.turns.size() != session.turns.size() || trace.p.size() != 2 ||
        trace.turn_h_cat.size() != session.turns.size() ||
        (!trace.turn_h_cat.empty() &&
         trace.turn_h_cat.front().size() != 2 * params.dims.hidden_turn)) {
        throw validation_error("backward: trace does not match session/params");
    }

    Gradients g = make_gradients(params);

    // softmax + NLL
    Vec dlogits = trace.p;
    dlogits[static_cast<size_t>(label)] -= 1.0;

    kernels::outer_acc(dlogits.data(), 2, trace.turn_pool.pooled.data(),
                       params.w_out.cols, g.w_out.a.data());
    kernels::axpy(1.0, dlogits.data(), g.b_out.data(), 2);

    Vec gs(params.w_out.cols, 0.0);
    kernels::matvec_t_acc(params.w_out.a.data(), 2, params.w_out.cols, dlogits.data(),
                          gs.data());

    std::vector<Vec> g_turn_h;
    pool_backward(trace.turn_h_cat, trace.turn_pool, gs, params.turn_attn,
                  params.flags.use_turn_attention, g.turn_attn, g_turn_h);

    VecRefs turn_inputs;
    turn_inputs.reserve(trace.turns.size());
    for (const TurnTrace& tt : trace.turns) turn_inputs.push_back(&tt.pool.pooled);

    std::vector<Vec> g_turn_inputs;
    gru_seq_backward(turn_inputs, params.turn_fwd, params.turn_bwd, trace.turn_gru,
                     g_turn_h, g.turn_fwd, g.turn_bwd, g_turn_inputs);

    for (size_t i = 0; i < session.turns.size(); ++i) {
        const TurnTrace& tt = trace.turns[i];
        std::vector<Vec> g_sub_h;
        pool_backward(tt.h_cat, tt.pool, g_turn_inputs[i], params.sub_attn,
                      params.flags.use_sub_attention, g.sub_attn, g_sub_h);

        VecRefs sub_inputs;
        sub_inputs.reserve(session.turns[i].sub_turns.size());
        for (const SubTurn& st : session.turns[i].sub_turns) {
            sub_inputs.push_back(&st.features);
        }
        std::vector<Vec> g_sub_inputs;  // gradients wrt data, unused
        gru_seq_backward(sub_inputs, params.sub_fwd, params.sub_bwd, tt.gru, g_sub_h,
                         g.sub_fwd, g.sub_bwd, g_sub_inputs);
    }
    return g;
}

}  // namespace hran
