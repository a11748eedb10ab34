#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/noise_model.hpp"
#include "qecw/rng.hpp"
#include "qecw/state_vector.hpp"
#include "qecw/validate.hpp"

namespace qecw {

/// Runtime binding of qubit binders to allocated ids.
using Env = std::map<Name, QubitId>;

namespace detail {

struct ExecCtx {
    const NoiseSpec* noise = nullptr; // nullptr or channel none => noiseless
    Rng* rng = nullptr;               // required when noise is stochastic

    bool per_gate() const {
        return noise && noise->location == NoiseLocation::per_gate && noise->stochastic();
    }
    bool per_boundary() const {
        return noise && noise->location == NoiseLocation::per_fragment_boundary &&
               noise->stochastic();
    }
};

inline QubitId resolve(const QubitRef& r, const Env& env) {
    if (!r.is_name()) return r.id();
    auto it = env.find(r.name());
    if (it == env.end()) throw UnboundName("qubit '" + r.name() + "' is not bound");
    return it->second;
}

inline void gate_noise(StateVector& st, ExecCtx& ctx, std::initializer_list<QubitId> qubits) {
    if (!ctx.per_gate()) return;
    std::vector<QubitId> qs(qubits);
    apply_channel(st, *ctx.noise, qs, *ctx.rng);
}

void apply_steps(StateVector& st, const Unitary& u, const Env& env, ExecCtx& ctx,
                 std::vector<QubitId>& forbidden);

inline void apply_step(StateVector& st, const GateStep& step, const Env& env, ExecCtx& ctx,
                       std::vector<QubitId>& forbidden) {
    auto guard = [&](QubitId q) {
        for (QubitId f : forbidden)
            if (f == q)
                throw Error("conditional branch acts on its control qubit #" +
                            std::to_string(q.index));
    };

    if (const auto* r = std::get_if<RotStep>(&step.op)) {
        const QubitId q = resolve(r->target, env);
        guard(q);
        st.apply_rotation(q, r->rotation);
        gate_noise(st, ctx, {q});
    } else if (const auto* w = std::get_if<SwapStep>(&step.op)) {
        const QubitId qa = resolve(w->a, env);
        const QubitId qb = resolve(w->b, env);
        guard(qa);
        guard(qb);
        st.apply_swap(qa, qb);
        gate_noise(st, ctx, {qa, qb});
    } else if (const auto* c = std::get_if<CondStep>(&step.op)) {
        const QubitId ctrl = resolve(c->control, env);
        guard(ctrl);
        StateVector zero_part = st.component(ctrl, false);
        StateVector one_part = st.component(ctrl, true);
        forbidden.push_back(ctrl);
        if (!zero_part.empty_branch()) apply_steps(zero_part, c->when_false, env, ctx, forbidden);
        if (!one_part.empty_branch()) apply_steps(one_part, c->when_true, env, ctx, forbidden);
        forbidden.pop_back();
        st.merge_components(std::move(zero_part), std::move(one_part));
        gate_noise(st, ctx, {ctrl});
    } else {
        const auto& l = std::get<UletStep>(step.op);
        if (env.count(l.binder))
            throw ShadowedBinder("ulet binder '" + l.binder + "' shadows an existing binder");
        const QubitId tmp = st.alloc(l.init);
        Env inner = env;
        inner[l.binder] = tmp;
        apply_steps(st, l.body, inner, ctx, forbidden);
        st.release(tmp, l.init); // AncillaNotReturned when the contract is broken
    }
}

inline void apply_steps(StateVector& st, const Unitary& u, const Env& env, ExecCtx& ctx,
                        std::vector<QubitId>& forbidden) {
    for (const GateStep& s : u.steps) apply_step(st, s, env, ctx, forbidden);
}

} // namespace detail

/// Applies a unitary with name resolution against `env`. Norm is preserved
/// within tolerance; violations indicate a broken circuit and throw.
inline void apply_unitary(StateVector& st, const Unitary& u, const Env& env = {}) {
    detail::ExecCtx ctx;
    std::vector<QubitId> forbidden;
    detail::apply_steps(st, u, env, ctx, forbidden);
    st.check_norm();
}

struct RunOptions {
    NoiseSpec noise{};
};

/// Final snapshot of one seeded evaluation.
struct RunOutcome {
    ResultValue result;
    std::size_t final_qubit_count = 0;
    bool aborted = false;      // a contract error fired mid-circuit
    std::string abort_reason;
};

namespace detail {

struct Frame {
    StateVector state;
    Env env;
    std::map<Name, bool> results;
    std::size_t next_stmt = 0;
    double prob = 1.0;
};

/// Executes statements [frame.next_stmt ..) in run mode (sampling).
inline RunOutcome run_statements(const QProgram& p, Frame frame, ExecCtx ctx) {
    for (std::size_t i = frame.next_stmt; i < p.stmts.size(); ++i) {
        const Statement& stmt = p.stmts[i];
        if (const auto* mk = std::get_if<MkQbitStmt>(&stmt)) {
            if (frame.env.count(mk->binder))
                throw ShadowedBinder("binder '" + mk->binder + "' is already bound");
            frame.env[mk->binder] = frame.state.alloc(mk->init);
        } else if (const auto* ap = std::get_if<ApplyStmt>(&stmt)) {
            std::vector<QubitId> forbidden;
            apply_steps(frame.state, ap->u, frame.env, ctx, forbidden);
            frame.state.check_norm();
        } else if (const auto* ms = std::get_if<MeasureStmt>(&stmt)) {
            const QubitId q = resolve(ms->target, frame.env);
            frame.results[ms->binder] = frame.state.measure(q, *ctx.rng);
        } else if (const auto* rt = std::get_if<ReturnStmt>(&stmt)) {
            ResultValue value;
            for (const Name& n : rt->names) {
                auto it = frame.results.find(n);
                if (it == frame.results.end())
                    throw UnboundName("return references unmeasured binder '" + n + "'");
                value.push_back(it->second);
            }
            return RunOutcome{std::move(value), frame.state.num_qubits(), false, {}};
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&stmt)) {
            frame.state.release(resolve(rl->target, frame.env), rl->expect);
        } else {
            if (ctx.per_boundary()) {
                apply_channel(frame.state, *ctx.noise, frame.state.allocated(), *ctx.rng);
                frame.state.check_norm();
            }
        }
    }
    throw UnboundName("program ended without a return statement");
}

} // namespace detail

/// Executes fragment statements against an existing state and environment,
/// sampling measurements from `rng`. Outcomes are recorded into `results`
/// when provided. Fragments cannot return.
inline void exec_fragment(StateVector& st, const ProgramFragment& frag, Env& env, Rng& rng,
                          std::map<Name, bool>* results = nullptr) {
    detail::ExecCtx ctx;
    ctx.rng = &rng;
    for (const Statement& stmt : frag) {
        if (const auto* mk = std::get_if<MkQbitStmt>(&stmt)) {
            if (env.count(mk->binder))
                throw ShadowedBinder("binder '" + mk->binder + "' is already bound");
            env[mk->binder] = st.alloc(mk->init);
        } else if (const auto* ap = std::get_if<ApplyStmt>(&stmt)) {
            std::vector<QubitId> forbidden;
            detail::apply_steps(st, ap->u, env, ctx, forbidden);
            st.check_norm();
        } else if (const auto* ms = std::get_if<MeasureStmt>(&stmt)) {
            const bool b = st.measure(detail::resolve(ms->target, env), rng);
            if (results) (*results)[ms->binder] = b;
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&stmt)) {
            st.release(detail::resolve(rl->target, env), rl->expect);
        } else if (std::holds_alternative<ReturnStmt>(stmt)) {
            throw Error("fragments cannot contain return statements");
        }
    }
}

/// One seeded evaluation with full outcome details. The caller is expected
/// to have validated the program (the trials harness validates once and
/// then runs many seeds).
inline RunOutcome evaluate_run_details(const QProgram& p, Rng rng, const RunOptions& opts = {}) {
    detail::ExecCtx ctx;
    ctx.noise = &opts.noise;
    ctx.rng = &rng;
    return detail::run_statements(p, detail::Frame{}, ctx);
}

/// Executes the program with a deterministic generator derived from
/// `seed`; identical (program, seed, options) give identical results.
inline ResultValue evaluate_run(const QProgram& p, std::uint64_t seed, const RunOptions& opts = {}) {
    require_valid(p);
    return evaluate_run_details(p, Rng(seed), opts).result;
}

/// Full outcome distribution by branching on both outcomes of every
/// measurement. Supports noiseless programs and deterministic injected
/// faults only; branches below 1e-12 probability are pruned.
inline OutcomeDistribution evaluate_exact(const QProgram& p, const NoiseSpec& noise = {}) {
    if (noise.stochastic())
        throw StochasticNoisePresent("exact evaluation cannot sample a stochastic channel");
    require_valid(p);

    constexpr double kBranchPrune = 1e-12;
    OutcomeDistribution dist;
    detail::ExecCtx ctx; // noiseless

    std::vector<detail::Frame> pending;
    pending.push_back(detail::Frame{});

    while (!pending.empty()) {
        detail::Frame frame = std::move(pending.back());
        pending.pop_back();

        bool open = true;
        for (std::size_t i = frame.next_stmt; open && i < p.stmts.size(); ++i) {
            const Statement& stmt = p.stmts[i];
            if (const auto* mk = std::get_if<MkQbitStmt>(&stmt)) {
                if (frame.env.count(mk->binder))
                    throw ShadowedBinder("binder '" + mk->binder + "' is already bound");
                frame.env[mk->binder] = frame.state.alloc(mk->init);
            } else if (const auto* ap = std::get_if<ApplyStmt>(&stmt)) {
                std::vector<QubitId> forbidden;
                detail::apply_steps(frame.state, ap->u, frame.env, ctx, forbidden);
                frame.state.check_norm();
            } else if (const auto* ms = std::get_if<MeasureStmt>(&stmt)) {
                const QubitId q = detail::resolve(ms->target, frame.env);
                const double p1 = frame.state.prob_one(q);
                for (bool outcome : {false, true}) {
                    const double pb = outcome ? p1 : 1.0 - p1;
                    if (frame.prob * pb <= kBranchPrune) continue;
                    detail::Frame branch = frame;
                    branch.prob *= pb;
                    branch.state.collapse(q, outcome);
                    branch.results[ms->binder] = outcome;
                    branch.next_stmt = i + 1;
                    pending.push_back(std::move(branch));
                }
                open = false;
            } else if (const auto* rt = std::get_if<ReturnStmt>(&stmt)) {
                ResultValue value;
                for (const Name& n : rt->names) {
                    auto it = frame.results.find(n);
                    if (it == frame.results.end())
                        throw UnboundName("return references unmeasured binder '" + n + "'");
                    value.push_back(it->second);
                }
                dist.entries[value] += frame.prob;
                open = false;
            } else if (const auto* rl = std::get_if<ReleaseStmt>(&stmt)) {
                frame.state.release(detail::resolve(rl->target, frame.env), rl->expect);
            } else {
                // noise site: inert without a stochastic channel
            }
        }
        if (open) throw UnboundName("program ended without a return statement");
    }

    double total = 0.0;
    for (const auto& [k, v] : dist.entries) total += v;
    if (std::abs(total - 1.0) > kNormTol)
        throw BrokenInvariant("outcome probabilities do not sum to 1");
    return dist;
}

} // namespace qecw
