#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qecw/errors.hpp"
#include "qecw/rotation.hpp"

namespace qecw {

/// Binder identifier; must match [A-Za-z_][A-Za-z0-9_]*.
using Name = std::string;

inline bool valid_name(const Name& n) {
    if (n.empty()) return false;
    auto head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(n[0])) return false;
    for (std::size_t i = 1; i < n.size(); ++i)
        if (!tail(n[i])) return false;
    return true;
}

/// Physical qubit identity, assigned in allocation order within one
/// evaluation and never reused.
struct QubitId {
    std::uint32_t index = 0;

    friend bool operator==(QubitId a, QubitId b) { return a.index == b.index; }
    friend bool operator<(QubitId a, QubitId b) { return a.index < b.index; }
};

/// A qubit reference inside a program: either a binder name (resolved by
/// the evaluator against the environment built by mkqbit/ulet) or a
/// concrete qubit id (used when circuits are driven directly against a
/// state, e.g. in tests and oracles).
class QubitRef {
  public:
    QubitRef(Name n) : v_(std::move(n)) {}
    QubitRef(const char* n) : v_(Name(n)) {}
    QubitRef(QubitId q) : v_(q) {}

    bool is_name() const { return std::holds_alternative<Name>(v_); }
    const Name& name() const { return std::get<Name>(v_); }
    QubitId id() const { return std::get<QubitId>(v_); }

    std::string describe() const {
        return is_name() ? name() : ("#" + std::to_string(id().index));
    }

    friend bool operator==(const QubitRef& a, const QubitRef& b) { return a.v_ == b.v_; }
    friend bool operator<(const QubitRef& a, const QubitRef& b) { return a.v_ < b.v_; }

  private:
    std::variant<Name, QubitId> v_;
};

struct GateStep;

/// An invertible sequence of gate steps. Composition is a monoid with the
/// empty sequence as identity.
struct Unitary {
    std::vector<GateStep> steps;

    Unitary() = default;
    Unitary(std::vector<GateStep> s) : steps(std::move(s)) {}

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }

    Unitary& append(const Unitary& other);
    Unitary& append(GateStep step);
};

struct RotStep {
    QubitRef target;
    Rotation rotation;
};

struct SwapStep {
    QubitRef a;
    QubitRef b;
};

/// Quantum conditional: applies when_false to the component where the
/// control is 0 and when_true where it is 1. Branches must not act on the
/// control.
struct CondStep {
    QubitRef control;
    Unitary when_false;
    Unitary when_true;
};

/// Scoped temporary qubit: allocated at |init>, visible as `binder` inside
/// `body`, and required to be back at |init> and disentangled at exit.
struct UletStep {
    bool init = false;
    Name binder;
    Unitary body;
};

struct GateStep {
    std::variant<RotStep, SwapStep, CondStep, UletStep> op;
};

bool operator==(const Unitary& a, const Unitary& b);

inline bool operator==(const RotStep& a, const RotStep& b) {
    return a.target == b.target && a.rotation == b.rotation;
}
inline bool operator==(const SwapStep& a, const SwapStep& b) { return a.a == b.a && a.b == b.b; }
inline bool operator==(const CondStep& a, const CondStep& b) {
    return a.control == b.control && a.when_false == b.when_false && a.when_true == b.when_true;
}
inline bool operator==(const UletStep& a, const UletStep& b) {
    return a.init == b.init && a.binder == b.binder && a.body == b.body;
}
inline bool operator==(const GateStep& a, const GateStep& b) { return a.op == b.op; }
inline bool operator==(const Unitary& a, const Unitary& b) { return a.steps == b.steps; }

inline Unitary& Unitary::append(const Unitary& other) {
    steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    return *this;
}

inline Unitary& Unitary::append(GateStep step) {
    steps.push_back(std::move(step));
    return *this;
}

// Step builders.

inline GateStep g_rot(QubitRef target, Rotation r) {
    return GateStep{RotStep{std::move(target), std::move(r)}};
}

inline GateStep g_swap(QubitRef a, QubitRef b) { return GateStep{SwapStep{std::move(a), std::move(b)}}; }

inline GateStep g_cond(QubitRef control, Unitary when_false, Unitary when_true) {
    return GateStep{CondStep{std::move(control), std::move(when_false), std::move(when_true)}};
}

inline GateStep g_ulet(bool init, Name binder, Unitary body) {
    return GateStep{UletStep{init, std::move(binder), std::move(body)}};
}

/// Controlled-X, the workhorse of every encode/syndrome circuit.
inline GateStep g_cnot(QubitRef control, QubitRef target) {
    return g_cond(std::move(control), Unitary{}, Unitary{{g_rot(std::move(target), rot_x())}});
}

inline Unitary u_of(std::vector<GateStep> steps) { return Unitary{std::move(steps)}; }

/// steps(a) followed by steps(b).
inline Unitary compose(Unitary a, const Unitary& b) {
    a.append(b);
    return a;
}

/// Reverses the step order and inverts each step in place.
inline Unitary invert(const Unitary& u) {
    Unitary out;
    out.steps.reserve(u.steps.size());
    for (auto it = u.steps.rbegin(); it != u.steps.rend(); ++it) {
        const GateStep& s = *it;
        if (const auto* r = std::get_if<RotStep>(&s.op)) {
            out.append(g_rot(r->target, r->rotation.dagger()));
        } else if (const auto* w = std::get_if<SwapStep>(&s.op)) {
            out.append(g_swap(w->a, w->b));
        } else if (const auto* c = std::get_if<CondStep>(&s.op)) {
            out.append(g_cond(c->control, invert(c->when_false), invert(c->when_true)));
        } else {
            const auto& l = std::get<UletStep>(s.op);
            out.append(g_ulet(l.init, l.binder, invert(l.body)));
        }
    }
    return out;
}

/// Replaces every reference to `binder` with the concrete qubit `q`.
/// Throws ShadowedBinder if a nested scope rebinds the same name.
inline Unitary substitute(const Unitary& u, const Name& binder, QubitId q) {
    auto sub_ref = [&](const QubitRef& r) -> QubitRef {
        if (r.is_name() && r.name() == binder) return QubitRef(q);
        return r;
    };
    Unitary out;
    out.steps.reserve(u.steps.size());
    for (const GateStep& s : u.steps) {
        if (const auto* r = std::get_if<RotStep>(&s.op)) {
            out.append(g_rot(sub_ref(r->target), r->rotation));
        } else if (const auto* w = std::get_if<SwapStep>(&s.op)) {
            out.append(g_swap(sub_ref(w->a), sub_ref(w->b)));
        } else if (const auto* c = std::get_if<CondStep>(&s.op)) {
            out.append(g_cond(sub_ref(c->control), substitute(c->when_false, binder, q),
                              substitute(c->when_true, binder, q)));
        } else {
            const auto& l = std::get<UletStep>(s.op);
            if (l.binder == binder)
                throw ShadowedBinder("substitute: binder '" + binder + "' is shadowed by a ulet scope");
            out.append(g_ulet(l.init, l.binder, substitute(l.body, binder, q)));
        }
    }
    return out;
}

// Statements.

struct MkQbitStmt {
    bool init = false;
    Name binder;
};

struct ApplyStmt {
    Unitary u;
};

struct MeasureStmt {
    QubitRef target;
    Name binder;

    MeasureStmt(QubitRef t, Name b) : target(std::move(t)), binder(std::move(b)) {}
};

struct ReturnStmt {
    std::vector<Name> names;
};

/// Drops a qubit from the register. The qubit must hold a definite basis
/// value; if `expect` is set, that value must match.
struct ReleaseStmt {
    QubitRef target;
    std::optional<bool> expect;

    ReleaseStmt(QubitRef t, std::optional<bool> e = std::nullopt)
        : target(std::move(t)), expect(e) {}
};

/// Marks a storage point between circuit fragments; a configured noise
/// channel acts on all live qubits here, and fault injection targets
/// these indices. Inert under noiseless evaluation.
struct NoiseSiteStmt {};

using Statement = std::variant<MkQbitStmt, ApplyStmt, MeasureStmt, ReturnStmt, ReleaseStmt, NoiseSiteStmt>;

inline bool operator==(const MkQbitStmt& a, const MkQbitStmt& b) {
    return a.init == b.init && a.binder == b.binder;
}
inline bool operator==(const ApplyStmt& a, const ApplyStmt& b) { return a.u == b.u; }
inline bool operator==(const MeasureStmt& a, const MeasureStmt& b) {
    return a.target == b.target && a.binder == b.binder;
}
inline bool operator==(const ReturnStmt& a, const ReturnStmt& b) { return a.names == b.names; }
inline bool operator==(const ReleaseStmt& a, const ReleaseStmt& b) {
    return a.target == b.target && a.expect == b.expect;
}
inline bool operator==(const NoiseSiteStmt&, const NoiseSiteStmt&) { return true; }

/// Statement sequence without a Return; the splice unit produced by
/// encode/correction builders.
using ProgramFragment = std::vector<Statement>;

struct QProgram {
    std::vector<Statement> stmts;

    friend bool operator==(const QProgram& a, const QProgram& b) { return a.stmts == b.stmts; }
};

/// Measurement outcomes in Return order.
using ResultValue = std::vector<bool>;

inline std::string result_key(const ResultValue& r) {
    if (r.empty()) return "()";
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ',';
        s += r[i] ? "True" : "False";
    }
    return s;
}

struct OutcomeDistribution {
    std::map<ResultValue, double> entries;

    double prob(const ResultValue& r) const {
        auto it = entries.find(r);
        return it == entries.end() ? 0.0 : it->second;
    }
};

/// Half the L1 distance between two distributions.
inline double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
    double acc = 0.0;
    for (const auto& [k, v] : a.entries) acc += std::abs(v - b.prob(k));
    for (const auto& [k, v] : b.entries)
        if (!a.entries.count(k)) acc += v;
    return acc / 2.0;
}

/// Fresh-name source; seeded with every name already used so generated
/// binders never collide with user binders or each other.
class NameGen {
  public:
    NameGen() = default;
    explicit NameGen(std::set<Name> used) : used_(std::move(used)) {}

    void reserve(const Name& n) { used_.insert(n); }

    Name fresh(const std::string& base) {
        if (!used_.count(base)) {
            used_.insert(base);
            return base;
        }
        for (std::uint64_t i = 1;; ++i) {
            Name candidate = base + "_" + std::to_string(i);
            if (!used_.count(candidate)) {
                used_.insert(candidate);
                return candidate;
            }
        }
    }

  private:
    std::set<Name> used_;
};

/// Every binder name appearing anywhere in the program (statement binders
/// and ulet binders, at any depth).
inline std::set<Name> collect_names(const QProgram& p) {
    std::set<Name> out;
    auto walk_unitary = [&](const Unitary& u, auto&& self) -> void {
        for (const GateStep& s : u.steps) {
            if (const auto* c = std::get_if<CondStep>(&s.op)) {
                self(c->when_false, self);
                self(c->when_true, self);
            } else if (const auto* l = std::get_if<UletStep>(&s.op)) {
                out.insert(l->binder);
                self(l->body, self);
            }
        }
    };
    for (const Statement& st : p.stmts) {
        if (const auto* mk = std::get_if<MkQbitStmt>(&st)) out.insert(mk->binder);
        else if (const auto* ap = std::get_if<ApplyStmt>(&st)) walk_unitary(ap->u, walk_unitary);
        else if (const auto* ms = std::get_if<MeasureStmt>(&st)) out.insert(ms->binder);
    }
    return out;
}

} // namespace qecw
