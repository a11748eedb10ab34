#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qecw/codes.hpp"
#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/validate.hpp"

namespace qecw {

enum class CorrectionPolicy { after_each_op, every_k, never };

struct TransformOptions {
    CorrectionPolicy policy = CorrectionPolicy::after_each_op;
    int k = 1; // period for every_k

    /// Leave syndrome ancillas allocated instead of measuring and
    /// releasing them, keeping every correction round measurement-free.
    bool keep_syndrome_ancillas = false;

    /// Emit a noise-site marker before each correction round.
    bool noise_sites = true;
};

/// The encoded qubits created so far, most recent first. Parents are
/// pairwise distinct and tuples pairwise disjoint.
class EncodedRegister {
  public:
    void push(EncodedQubit eq) {
        for (const EncodedQubit& e : entries_)
            for (const QubitRef& a : e.qubits)
                for (const QubitRef& b : eq.qubits)
                    if (a == b)
                        throw BrokenInvariant("register tuples overlap at " + a.describe());
        entries_.insert(entries_.begin(), std::move(eq));
    }

    /// The unique entry whose parent equals `q`. Non-parent tuple members
    /// do not match.
    const EncodedQubit& lookup(const QubitRef& q) const {
        for (const EncodedQubit& e : entries_)
            if (e.parent() == q) return e;
        throw UnknownQubit("no encoded qubit with parent " + q.describe());
    }

    const std::vector<EncodedQubit>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

  private:
    std::vector<EncodedQubit> entries_;
};

inline const EncodedQubit& lookup_encoded(const QubitRef& q, const EncodedRegister& reg) {
    return reg.lookup(q);
}

/// One correction round for every register entry, in register order.
inline ProgramFragment correct_all(const EncodedRegister& reg, NameGen& gen,
                                   bool keep_ancillas = false) {
    ProgramFragment frag;
    for (const EncodedQubit& eq : reg.entries()) {
        ProgramFragment one = correction_fragment(eq, gen, keep_ancillas);
        frag.insert(frag.end(), one.begin(), one.end());
    }
    return frag;
}

namespace detail {

struct RewriteCtx {
    const CodeScheme* code = nullptr;
    TransformOptions opts;
    NameGen* gen = nullptr;
    const EncodedRegister* reg = nullptr;
    int ops_since_correction = 0;
};

/// Pure-unitary extension used inside conditional branches and ulet
/// bodies, where correction rounds cannot be spliced. `locals` maps ulet
/// binders in scope to their temporary encoded qubits.
inline Unitary extend_pure(const Unitary& u, RewriteCtx& ctx,
                           const std::map<Name, EncodedQubit>& locals) {
    auto lookup = [&](const QubitRef& q) -> const EncodedQubit& {
        if (q.is_name()) {
            auto it = locals.find(q.name());
            if (it != locals.end()) return it->second;
        }
        return ctx.reg->lookup(q);
    };

    Unitary out;
    for (const GateStep& s : u.steps) {
        if (const auto* r = std::get_if<RotStep>(&s.op)) {
            out.append(lifted_rot(lookup(r->target), r->rotation));
        } else if (const auto* w = std::get_if<SwapStep>(&s.op)) {
            out.append(lifted_swap(lookup(w->a), lookup(w->b)));
        } else if (const auto* c = std::get_if<CondStep>(&s.op)) {
            const EncodedQubit& eqc = lookup(c->control);
            out.append(decode_unitary(eqc));
            out.append(g_cond(eqc.parent(), extend_pure(c->when_false, ctx, locals),
                              extend_pure(c->when_true, ctx, locals)));
            out.append(encode_unitary(eqc));
        } else {
            const auto& l = std::get<UletStep>(s.op);
            out.append(lifted_ulet(*ctx.code, l.init, *ctx.gen,
                                   [&](const EncodedQubit& temp) {
                                       auto inner = locals;
                                       inner.insert_or_assign(l.binder, temp);
                                       return extend_pure(l.body, ctx, inner);
                                   }));
        }
    }
    return out;
}

inline void after_op(std::vector<Statement>& out, RewriteCtx& ctx) {
    if (ctx.opts.noise_sites) out.push_back(NoiseSiteStmt{});
    ++ctx.ops_since_correction;
    const bool due = ctx.opts.policy == CorrectionPolicy::after_each_op ||
                     (ctx.opts.policy == CorrectionPolicy::every_k &&
                      ctx.ops_since_correction >= ctx.opts.k);
    if (!due) return;
    ctx.ops_since_correction = 0;
    ProgramFragment rounds = correct_all(*ctx.reg, *ctx.gen, ctx.opts.keep_syndrome_ancillas);
    out.insert(out.end(), rounds.begin(), rounds.end());
}

/// Per-step dispatch: each top-level step becomes one lifted apply
/// statement followed by a boundary marker and, per policy, correction
/// rounds on all encoded qubits created so far.
inline void extend_into(std::vector<Statement>& out, const Unitary& u, RewriteCtx& ctx) {
    for (const GateStep& s : u.steps) {
        out.push_back(ApplyStmt{extend_pure(u_of({s}), ctx, {})});
        after_op(out, ctx);
    }
}

} // namespace detail

/// Extension of one unitary against an existing register; exposed for
/// direct use and tests. Correction cadence restarts per call.
inline ProgramFragment extend_unitary(const Unitary& u, const EncodedRegister& reg,
                                      const CodeScheme& code, NameGen& gen,
                                      const TransformOptions& opts = {}) {
    detail::RewriteCtx ctx{&code, opts, &gen, &reg, 0};
    std::vector<Statement> out;
    detail::extend_into(out, u, ctx);
    return out;
}

/// Rewrites a valid program over logical qubits into an equivalent program
/// over encoded qubits, inserting correction rounds per policy. Noiseless
/// outcome distributions are preserved.
inline QProgram transform(const QProgram& p, const CodeScheme& code,
                          const TransformOptions& opts = {}) {
    require_valid(p);

    NameGen gen(collect_names(p));
    EncodedRegister reg;
    detail::RewriteCtx ctx{&code, opts, &gen, &reg, 0};

    QProgram out;
    for (const Statement& stmt : p.stmts) {
        if (const auto* mk = std::get_if<MkQbitStmt>(&stmt)) {
            auto [eq, frag] = mk_encoded(code, mk->init, mk->binder, gen);
            out.stmts.insert(out.stmts.end(), frag.begin(), frag.end());
            reg.push(std::move(eq));
        } else if (const auto* ap = std::get_if<ApplyStmt>(&stmt)) {
            detail::extend_into(out.stmts, ap->u, ctx);
        } else if (const auto* ms = std::get_if<MeasureStmt>(&stmt)) {
            ProgramFragment frag = measure_encoded(reg.lookup(ms->target), ms->binder);
            out.stmts.insert(out.stmts.end(), frag.begin(), frag.end());
        } else if (const auto* rt = std::get_if<ReturnStmt>(&stmt)) {
            out.stmts.push_back(*rt);
        } else if (std::holds_alternative<NoiseSiteStmt>(stmt)) {
            // dropped: the rewriter emits its own boundary markers
        } else {
            throw Error("release statements are not supported in source programs");
        }
    }
    return out;
}

/// Adds a boundary marker after each apply statement of a plain program,
/// mirroring where the rewriter places them, so plain and encoded runs see
/// the same storage-noise schedule. Programs that already contain markers
/// are returned unchanged.
inline QProgram insert_noise_sites(const QProgram& p) {
    for (const Statement& s : p.stmts)
        if (std::holds_alternative<NoiseSiteStmt>(s)) return p;
    QProgram out;
    for (const Statement& s : p.stmts) {
        out.stmts.push_back(s);
        if (std::holds_alternative<ApplyStmt>(s)) out.stmts.push_back(NoiseSiteStmt{});
    }
    return out;
}

/// Statement indices of the boundary markers.
inline std::vector<std::size_t> noise_site_indices(const QProgram& p) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.stmts.size(); ++i)
        if (std::holds_alternative<NoiseSiteStmt>(p.stmts[i])) out.push_back(i);
    return out;
}

/// Qubit binders live immediately after statement `site`.
inline std::vector<Name> live_qubits_after(const QProgram& p, std::size_t site) {
    std::vector<Name> live;
    for (std::size_t i = 0; i <= site && i < p.stmts.size(); ++i) {
        if (const auto* mk = std::get_if<MkQbitStmt>(&p.stmts[i])) {
            live.push_back(mk->binder);
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&p.stmts[i])) {
            if (rl->target.is_name())
                std::erase(live, rl->target.name());
        }
    }
    return live;
}

} // namespace qecw
