#pragma once

#include <string>
#include <vector>

#include "qecw/ir.hpp"

namespace qecw {

struct CorpusEntry {
    std::string name;
    QProgram program;
};

namespace corpus {

/// Allocate |0>, flip it, measure: deterministically True.
inline QProgram not_gate() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "q1"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q1", rot_x())})});
    p.stmts.push_back(MeasureStmt("q1", "b"));
    p.stmts.push_back(ReturnStmt{{"b"}});
    return p;
}

/// H then CNOT: outcomes (False,False) and (True,True), each 1/2.
inline QProgram bell_pair() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "a"});
    p.stmts.push_back(MkQbitStmt{false, "b"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("a", rot_h())})});
    p.stmts.push_back(ApplyStmt{u_of({g_cnot("a", "b")})});
    p.stmts.push_back(MeasureStmt("a", "ra"));
    p.stmts.push_back(MeasureStmt("b", "rb"));
    p.stmts.push_back(ReturnStmt{{"ra", "rb"}});
    return p;
}

/// H-Z-H equals X: deterministically True by interference.
inline QProgram interference_hzh() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "q"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_h())})});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_z())})});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_h())})});
    p.stmts.push_back(MeasureStmt("q", "r"));
    p.stmts.push_back(ReturnStmt{{"r"}});
    return p;
}

/// Two qubits with a conditional flip under a deterministic control:
/// outcome (True,True).
inline QProgram conditional_pair() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{true, "a"});
    p.stmts.push_back(MkQbitStmt{false, "b"});
    p.stmts.push_back(ApplyStmt{u_of({g_cnot("a", "b")})});
    p.stmts.push_back(MeasureStmt("a", "ra"));
    p.stmts.push_back(MeasureStmt("b", "rb"));
    p.stmts.push_back(ReturnStmt{{"ra", "rb"}});
    return p;
}

/// Swap then a CNOT routed through a scratch qubit: outcome (False,True).
inline QProgram swap_scratch() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{true, "a"});
    p.stmts.push_back(MkQbitStmt{false, "b"});
    p.stmts.push_back(ApplyStmt{u_of({g_swap("a", "b")})});
    p.stmts.push_back(ApplyStmt{u_of({g_ulet(
        false, "t",
        u_of({g_cnot("a", "t"), g_cnot("t", "b"), g_cnot("a", "t")}))})});
    p.stmts.push_back(MeasureStmt("a", "ra"));
    p.stmts.push_back(MeasureStmt("b", "rb"));
    p.stmts.push_back(ReturnStmt{{"ra", "rb"}});
    return p;
}

/// Superposed control routed through swap and scratch: Bell-like
/// correlations, outcomes (False,False) and (True,True) each 1/2.
inline QProgram entangle_via_scratch() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "a"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("a", rot_h())})});
    p.stmts.push_back(MkQbitStmt{false, "b"});
    p.stmts.push_back(ApplyStmt{u_of({g_swap("a", "b")})});
    p.stmts.push_back(ApplyStmt{u_of({g_ulet(
        false, "t",
        u_of({g_cnot("b", "t"), g_cnot("t", "a"), g_cnot("b", "t")}))})});
    p.stmts.push_back(MeasureStmt("a", "ra"));
    p.stmts.push_back(MeasureStmt("b", "rb"));
    p.stmts.push_back(ReturnStmt{{"ra", "rb"}});
    return p;
}

/// One idle step on a fresh qubit; the storage-noise probe used to compare
/// plain and encoded error rates for bit-flip style channels.
inline QProgram idle_probe() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "q"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_phase(0.0))})});
    p.stmts.push_back(MeasureStmt("q", "r"));
    p.stmts.push_back(ReturnStmt{{"r"}});
    return p;
}

/// H, storage window, H: phase noise in the window flips the outcome, so
/// this probe makes phase-flip channels observable in the Z basis.
inline QProgram phase_probe() {
    QProgram p;
    p.stmts.push_back(MkQbitStmt{false, "q"});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_h())})});
    p.stmts.push_back(ApplyStmt{u_of({g_rot("q", rot_h())})});
    p.stmts.push_back(MeasureStmt("q", "r"));
    p.stmts.push_back(ReturnStmt{{"r"}});
    return p;
}

} // namespace corpus

/// The four programs shipped as files and exercised by the acceptance
/// suite.
inline std::vector<CorpusEntry> builtin_corpus() {
    return {{"not_gate", corpus::not_gate()},
            {"bell_pair", corpus::bell_pair()},
            {"interference_hzh", corpus::interference_hzh()},
            {"conditional_pair", corpus::conditional_pair()}};
}

/// Builtin corpus plus coverage programs for swap, ulet, and the noise
/// probes.
inline std::vector<CorpusEntry> extended_corpus() {
    auto v = builtin_corpus();
    v.push_back({"swap_scratch", corpus::swap_scratch()});
    v.push_back({"entangle_via_scratch", corpus::entangle_via_scratch()});
    v.push_back({"idle_probe", corpus::idle_probe()});
    v.push_back({"phase_probe", corpus::phase_probe()});
    return v;
}

} // namespace qecw
