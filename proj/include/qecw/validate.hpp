#pragma once

#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qecw/ir.hpp"

namespace qecw {

struct Violation {
    std::size_t stmt_index = 0;
    std::string rule;   // stable identifier, e.g. "unbound-name"
    std::string detail; // human-readable context
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& v : violations)
            os << "statement " << v.stmt_index << ": " << v.rule << ": " << v.detail << "\n";
        return os.str();
    }
};

/// Thrown by callers that require a valid program (parser, transformer).
class ValidationFailed : public Error {
  public:
    explicit ValidationFailed(ValidationReport r)
        : Error("program failed validation:\n" + r.to_string()), report(std::move(r)) {}

    ValidationReport report;
};

namespace detail {

struct ValidateCtx {
    ValidationReport* report = nullptr;
    std::size_t index = 0;
    std::set<Name> qubits;    // live qubit binders
    std::set<Name> released;  // formerly live qubit binders
    std::set<Name> results;   // measurement binders
    std::set<Name> binders;   // every binder introduced so far

    void flag(const std::string& rule, const std::string& detail) {
        report->violations.push_back({index, rule, detail});
    }
};

inline void check_qubit_ref(ValidateCtx& c, const QubitRef& r, const std::set<Name>& locals,
                            const std::vector<QubitRef>& banned_controls) {
    for (const QubitRef& ctrl : banned_controls) {
        if (r == ctrl) {
            c.flag("control-in-branch", "conditional branch acts on its control " + r.describe());
            return;
        }
    }
    if (!r.is_name()) {
        c.flag("physical-qubit-reference",
               "programs must reference qubits by binder, found " + r.describe());
        return;
    }
    const Name& n = r.name();
    if (locals.count(n) || c.qubits.count(n)) return;
    if (c.released.count(n)) c.flag("use-after-release", "qubit '" + n + "' was released");
    else if (c.results.count(n)) c.flag("not-a-qubit", "'" + n + "' names a measurement result");
    else c.flag("unbound-name", "qubit '" + n + "' is not bound");
}

inline void check_unitary(ValidateCtx& c, const Unitary& u, std::set<Name> locals,
                          std::vector<QubitRef> banned_controls) {
    for (const GateStep& s : u.steps) {
        if (const auto* r = std::get_if<RotStep>(&s.op)) {
            check_qubit_ref(c, r->target, locals, banned_controls);
        } else if (const auto* w = std::get_if<SwapStep>(&s.op)) {
            check_qubit_ref(c, w->a, locals, banned_controls);
            check_qubit_ref(c, w->b, locals, banned_controls);
            if (w->a == w->b) c.flag("swap-identical", "swap of " + w->a.describe() + " with itself");
        } else if (const auto* cd = std::get_if<CondStep>(&s.op)) {
            check_qubit_ref(c, cd->control, locals, banned_controls);
            auto inner = banned_controls;
            inner.push_back(cd->control);
            check_unitary(c, cd->when_false, locals, inner);
            check_unitary(c, cd->when_true, locals, inner);
        } else {
            const auto& l = std::get<UletStep>(s.op);
            if (!valid_name(l.binder)) {
                c.flag("name-syntax", "ulet binder '" + l.binder + "' is not a valid identifier");
            } else if (locals.count(l.binder) || c.binders.count(l.binder)) {
                c.flag("shadowed-binder", "ulet binder '" + l.binder + "' shadows an existing binder");
            }
            auto inner = locals;
            inner.insert(l.binder);
            check_unitary(c, l.body, std::move(inner), banned_controls);
        }
    }
}

} // namespace detail

/// Static checks: binder scoping and uniqueness, control disjointness,
/// ulet shadowing, swap distinctness, release discipline, and Return
/// placement. Returns all violations; callers decide whether to proceed.
inline ValidationReport validate(const QProgram& p) {
    ValidationReport report;
    detail::ValidateCtx c;
    c.report = &report;
    bool returned = false;

    for (c.index = 0; c.index < p.stmts.size(); ++c.index) {
        const Statement& st = p.stmts[c.index];
        if (returned) {
            c.flag("return-not-last", "statement appears after return");
            continue;
        }
        if (const auto* mk = std::get_if<MkQbitStmt>(&st)) {
            if (!valid_name(mk->binder))
                c.flag("name-syntax", "binder '" + mk->binder + "' is not a valid identifier");
            else if (c.binders.count(mk->binder))
                c.flag("duplicate-binder", "binder '" + mk->binder + "' is already bound");
            c.binders.insert(mk->binder);
            c.qubits.insert(mk->binder);
        } else if (const auto* ap = std::get_if<ApplyStmt>(&st)) {
            detail::check_unitary(c, ap->u, {}, {});
        } else if (const auto* ms = std::get_if<MeasureStmt>(&st)) {
            detail::check_qubit_ref(c, ms->target, {}, {});
            if (!valid_name(ms->binder))
                c.flag("name-syntax", "binder '" + ms->binder + "' is not a valid identifier");
            else if (c.binders.count(ms->binder))
                c.flag("duplicate-binder", "binder '" + ms->binder + "' is already bound");
            c.binders.insert(ms->binder);
            c.results.insert(ms->binder);
        } else if (const auto* rt = std::get_if<ReturnStmt>(&st)) {
            for (const Name& n : rt->names) {
                if (!c.results.count(n))
                    c.flag("unbound-name", "return references '" + n + "', not a measurement result");
            }
            returned = true;
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&st)) {
            detail::check_qubit_ref(c, rl->target, {}, {});
            if (rl->target.is_name() && c.qubits.count(rl->target.name())) {
                c.qubits.erase(rl->target.name());
                c.released.insert(rl->target.name());
            }
        } else {
            // noise site: nothing to check
        }
    }
    if (!returned) {
        c.index = p.stmts.empty() ? 0 : p.stmts.size() - 1;
        c.flag("return-missing", "program has no return statement");
    }
    return report;
}

/// Validates and throws on failure.
inline void require_valid(const QProgram& p) {
    ValidationReport r = validate(p);
    if (!r.ok()) throw ValidationFailed(std::move(r));
}

} // namespace qecw
