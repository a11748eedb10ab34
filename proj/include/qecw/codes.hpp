#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/rotation.hpp"

namespace qecw {

struct CodeScheme;

/// One logical qubit stored across an ordered tuple of physical qubits.
/// The first entry is the parent: the qubit that carries the logical value
/// at encode/decode boundaries.
struct EncodedQubit {
    const CodeScheme* code = nullptr;
    std::vector<QubitRef> qubits;

    const QubitRef& parent() const { return qubits.front(); }
};

inline const QubitRef& parent_of(const EncodedQubit& eq) { return eq.parent(); }

/// A catalog entry: physical arity plus the builders for the encode
/// circuit, the correction round, and any transversal overrides for
/// lifted single-qubit gates.
struct CodeScheme {
    std::string name;
    int num_physical = 0;

    /// Unitary touching only the given tuple; maps parent a|0>+b|1> with
    /// the remaining qubits at |0> to the codeword.
    std::function<Unitary(std::span<const QubitRef>)> build_encode;

    /// Syndrome extraction plus conditioned fixes. By default syndrome
    /// ancillas are measured and released at the end; with `keep_ancillas`
    /// they are left allocated so the round stays measurement-free.
    std::function<ProgramFragment(std::span<const QubitRef>, NameGen&, bool keep_ancillas)>
        build_correction;

    /// Bitwise implementation for the gate class of `r`, when one exists.
    std::function<std::optional<Unitary>(std::span<const QubitRef>, const Rotation&)> transversal;
};

namespace detail {

/// Nested conditionals over syndrome bits: controls[i] contributes bit i
/// of the syndrome value passed to `action`; syndrome 0 must act as
/// identity (action returns an empty unitary for it).
inline Unitary syndrome_conds(std::span<const QubitRef> controls,
                              const std::function<Unitary(unsigned)>& action, unsigned level = 0,
                              unsigned acc = 0) {
    if (level == controls.size()) return action(acc);
    Unitary when_false = syndrome_conds(controls, action, level + 1, acc);
    Unitary when_true = syndrome_conds(controls, action, level + 1, acc | (1u << level));
    return u_of({g_cond(controls[level], std::move(when_false), std::move(when_true))});
}

inline Unitary bitwise(std::span<const QubitRef> qs, const Rotation& r) {
    Unitary u;
    for (const QubitRef& q : qs) u.append(g_rot(q, r));
    return u;
}

// bit-flip repetition code ---------------------------------------------

inline Unitary bitflip3_encode(std::span<const QubitRef> q) {
    return u_of({g_cnot(q[0], q[1]), g_cnot(q[0], q[2])});
}

/// Parity checks a = q0^q1 and b = q0^q2; syndrome (a,b) selects the
/// flipped qubit: (1,1) -> q0, (1,0) -> q1, (0,1) -> q2.
inline ProgramFragment bitflip3_correction(std::span<const QubitRef> q, NameGen& gen,
                                           bool keep_ancillas) {
    const Name a = gen.fresh("syn_a");
    const Name b = gen.fresh("syn_b");
    const std::vector<QubitRef> controls{QubitRef(a), QubitRef(b)};

    Unitary round = u_of({g_cnot(q[0], a), g_cnot(q[1], a), g_cnot(q[0], b), g_cnot(q[2], b)});
    round.append(syndrome_conds(controls, [&](unsigned s) -> Unitary {
        switch (s) {
        case 3: return u_of({g_rot(q[0], rot_x())});
        case 1: return u_of({g_rot(q[1], rot_x())});
        case 2: return u_of({g_rot(q[2], rot_x())});
        default: return {};
        }
    }));

    ProgramFragment frag;
    frag.push_back(MkQbitStmt{false, a});
    frag.push_back(MkQbitStmt{false, b});
    frag.push_back(ApplyStmt{std::move(round)});
    if (!keep_ancillas) {
        frag.push_back(MeasureStmt(QubitRef(a), gen.fresh("syn_a_m")));
        frag.push_back(MeasureStmt(QubitRef(b), gen.fresh("syn_b_m")));
        frag.push_back(ReleaseStmt(QubitRef(a)));
        frag.push_back(ReleaseStmt(QubitRef(b)));
    }
    return frag;
}

// phase-flip repetition code -------------------------------------------

inline Unitary phaseflip3_encode(std::span<const QubitRef> q) {
    Unitary u = bitflip3_encode(q);
    u.append(bitwise(q, rot_h()));
    return u;
}

/// The bit-flip round conjugated by H on the data qubits.
inline ProgramFragment phaseflip3_correction(std::span<const QubitRef> q, NameGen& gen,
                                             bool keep_ancillas) {
    ProgramFragment frag;
    frag.push_back(ApplyStmt{bitwise(q, rot_h())});
    ProgramFragment inner = bitflip3_correction(q, gen, keep_ancillas);
    frag.insert(frag.end(), inner.begin(), inner.end());
    frag.push_back(ApplyStmt{bitwise(q, rot_h())});
    return frag;
}

// Steane [[7,1,3]] code ------------------------------------------------

/// Check-matrix rows shared by the X- and Z-type stabilizers; column j is
/// the binary representation of j+1, so a single-qubit error at position
/// j produces syndrome value j+1.
inline const std::vector<std::vector<std::size_t>>& steane_rows() {
    static const std::vector<std::vector<std::size_t>> rows{
        {0, 2, 4, 6}, {1, 2, 5, 6}, {3, 4, 5, 6}};
    return rows;
}

/// Spreads the logical operator X0 X1 X2, then superposes each stabilizer
/// generator from a pivot outside all previously touched supports.
inline Unitary steane7_encode(std::span<const QubitRef> q) {
    Unitary u = u_of({g_cnot(q[0], q[1]), g_cnot(q[0], q[2])});
    const std::size_t pivots[3] = {4, 5, 3};
    for (int i = 0; i < 3; ++i) {
        const std::size_t t = pivots[i];
        u.append(g_rot(q[t], rot_h()));
        for (std::size_t j : steane_rows()[static_cast<std::size_t>(i)])
            if (j != t) u.append(g_cnot(q[t], q[j]));
    }
    return u;
}

inline ProgramFragment steane7_correction(std::span<const QubitRef> q, NameGen& gen,
                                          bool keep_ancillas) {
    ProgramFragment frag;

    // Pass 1: Z-type parity checks catch X errors.
    std::vector<QubitRef> zanc;
    for (int i = 0; i < 3; ++i) zanc.emplace_back(gen.fresh("syn_z" + std::to_string(i)));
    {
        Unitary round;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j : steane_rows()[i]) round.append(g_cnot(q[j], zanc[i]));
        round.append(syndrome_conds(zanc, [&](unsigned s) -> Unitary {
            if (s == 0) return {};
            return u_of({g_rot(q[s - 1], rot_x())});
        }));
        for (const QubitRef& a : zanc) frag.push_back(MkQbitStmt{false, a.name()});
        frag.push_back(ApplyStmt{std::move(round)});
    }

    // Pass 2: X-type checks catch Z errors; ancillas read the eigenvalue
    // through phase kickback.
    std::vector<QubitRef> xanc;
    for (int i = 0; i < 3; ++i) xanc.emplace_back(gen.fresh("syn_x" + std::to_string(i)));
    {
        Unitary round;
        for (std::size_t i = 0; i < 3; ++i) {
            round.append(g_rot(xanc[i], rot_h()));
            for (std::size_t j : steane_rows()[i]) round.append(g_cnot(xanc[i], q[j]));
            round.append(g_rot(xanc[i], rot_h()));
        }
        round.append(syndrome_conds(xanc, [&](unsigned s) -> Unitary {
            if (s == 0) return {};
            return u_of({g_rot(q[s - 1], rot_z())});
        }));
        for (const QubitRef& a : xanc) frag.push_back(MkQbitStmt{false, a.name()});
        frag.push_back(ApplyStmt{std::move(round)});
    }

    if (!keep_ancillas) {
        for (const QubitRef& a : zanc) frag.push_back(MeasureStmt(a, gen.fresh(a.name() + "_m")));
        for (const QubitRef& a : xanc) frag.push_back(MeasureStmt(a, gen.fresh(a.name() + "_m")));
        for (const QubitRef& a : zanc) frag.push_back(ReleaseStmt(a));
        for (const QubitRef& a : xanc) frag.push_back(ReleaseStmt(a));
    }
    return frag;
}

} // namespace detail

/// Catalog lookup by stable identifier: bitflip3, phaseflip3, steane7.
inline const CodeScheme& get_code(std::string_view name) {
    static const CodeScheme bitflip3{
        "bitflip3",
        3,
        [](std::span<const QubitRef> q) { return detail::bitflip3_encode(q); },
        [](std::span<const QubitRef> q, NameGen& gen, bool keep) {
            return detail::bitflip3_correction(q, gen, keep);
        },
        [](std::span<const QubitRef> q, const Rotation& r) -> std::optional<Unitary> {
            if (approx_equal(r, rot_x())) return detail::bitwise(q, rot_x());
            return std::nullopt;
        }};
    static const CodeScheme phaseflip3{
        "phaseflip3",
        3,
        [](std::span<const QubitRef> q) { return detail::phaseflip3_encode(q); },
        [](std::span<const QubitRef> q, NameGen& gen, bool keep) {
            return detail::phaseflip3_correction(q, gen, keep);
        },
        [](std::span<const QubitRef> q, const Rotation& r) -> std::optional<Unitary> {
            // In the Hadamard-conjugated codespace the logical Z acts
            // bitwise as X.
            if (approx_equal(r, rot_z())) return detail::bitwise(q, rot_x());
            return std::nullopt;
        }};
    static const CodeScheme steane7{
        "steane7",
        7,
        [](std::span<const QubitRef> q) { return detail::steane7_encode(q); },
        [](std::span<const QubitRef> q, NameGen& gen, bool keep) {
            return detail::steane7_correction(q, gen, keep);
        },
        [](std::span<const QubitRef> q, const Rotation& r) -> std::optional<Unitary> {
            if (approx_equal(r, rot_x())) return detail::bitwise(q, rot_x());
            if (approx_equal(r, rot_z())) return detail::bitwise(q, rot_z());
            if (approx_equal(r, rot_h())) return detail::bitwise(q, rot_h());
            return std::nullopt;
        }};

    if (name == "bitflip3") return bitflip3;
    if (name == "phaseflip3") return phaseflip3;
    if (name == "steane7") return steane7;
    throw UnknownCode("unknown code '" + std::string(name) + "'");
}

inline std::vector<std::string> code_names() { return {"bitflip3", "phaseflip3", "steane7"}; }

inline Unitary encode_unitary(const EncodedQubit& eq) { return eq.code->build_encode(eq.qubits); }

inline Unitary decode_unitary(const EncodedQubit& eq) { return invert(encode_unitary(eq)); }

/// Fragment that allocates the tuple (parent at |init>, the rest at |0>)
/// under `parent_binder` plus generated ancilla binders, then encodes.
inline std::pair<EncodedQubit, ProgramFragment>
mk_encoded(const CodeScheme& code, bool init, const Name& parent_binder, NameGen& gen) {
    std::vector<QubitRef> refs;
    refs.emplace_back(parent_binder);
    for (int i = 1; i < code.num_physical; ++i)
        refs.emplace_back(gen.fresh(parent_binder + "_c" + std::to_string(i)));

    ProgramFragment frag;
    frag.push_back(MkQbitStmt{init, parent_binder});
    for (int i = 1; i < code.num_physical; ++i)
        frag.push_back(MkQbitStmt{false, refs[static_cast<std::size_t>(i)].name()});
    EncodedQubit eq{&code, refs};
    frag.push_back(ApplyStmt{encode_unitary(eq)});
    return {std::move(eq), std::move(frag)};
}

/// One correction round for this tuple.
inline ProgramFragment correction_fragment(const EncodedQubit& eq, NameGen& gen,
                                           bool keep_ancillas = false) {
    return eq.code->build_correction(eq.qubits, gen, keep_ancillas);
}

/// Decode, measure the parent into `result_binder`, re-encode. The logical
/// value is the measured bit; afterwards the tuple encodes the collapsed
/// basis state.
inline ProgramFragment measure_encoded(const EncodedQubit& eq, const Name& result_binder) {
    ProgramFragment frag;
    frag.push_back(ApplyStmt{decode_unitary(eq)});
    frag.push_back(MeasureStmt(eq.parent(), result_binder));
    frag.push_back(ApplyStmt{encode_unitary(eq)});
    return frag;
}

/// Logical single-qubit gate: a transversal override when the catalog has
/// one for this gate class, otherwise decode, rotate the parent, encode.
inline Unitary lifted_rot(const EncodedQubit& eq, const Rotation& r) {
    if (eq.code->transversal) {
        if (auto u = eq.code->transversal(eq.qubits, r)) return *u;
    }
    Unitary u = decode_unitary(eq);
    u.append(g_rot(eq.parent(), r));
    u.append(encode_unitary(eq));
    return u;
}

/// Position-wise physical swap, which realizes logical swap for any code.
inline Unitary lifted_swap(const EncodedQubit& a, const EncodedQubit& b) {
    if (a.code->name != b.code->name)
        throw CodeMismatch("swap between codes " + a.code->name + " and " + b.code->name);
    for (const QubitRef& qa : a.qubits)
        for (const QubitRef& qb : b.qubits)
            if (qa == qb) throw OverlappingTuples("encoded swap with overlapping tuples");
    Unitary u;
    for (std::size_t i = 0; i < a.qubits.size(); ++i) u.append(g_swap(a.qubits[i], b.qubits[i]));
    return u;
}

/// Scoped temporary logical qubit: one physical ulet per tuple member
/// (parent at `init`, the rest at |0>), encode, body, decode. The inner
/// scopes enforce that every ancilla is back at its initial value.
inline Unitary lifted_ulet(const CodeScheme& code, bool init, NameGen& gen,
                           const std::function<Unitary(const EncodedQubit&)>& body) {
    std::vector<QubitRef> refs;
    std::vector<Name> names;
    for (int i = 0; i < code.num_physical; ++i) {
        names.push_back(gen.fresh("tmp_q" + std::to_string(i)));
        refs.emplace_back(names.back());
    }
    EncodedQubit temp{&code, refs};

    Unitary inner = encode_unitary(temp);
    inner.append(body(temp));
    inner.append(decode_unitary(temp));

    for (int i = code.num_physical - 1; i >= 0; --i) {
        const bool leaf_init = (i == 0) ? init : false;
        inner = u_of({g_ulet(leaf_init, names[static_cast<std::size_t>(i)], std::move(inner))});
    }
    return inner;
}

} // namespace qecw
