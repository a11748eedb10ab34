#pragma once

#include <span>
#include <string>

#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/rng.hpp"
#include "qecw/rotation.hpp"
#include "qecw/state_vector.hpp"

namespace qecw {

enum class Channel { none, bit_flip, phase_flip, depolarizing };
enum class NoiseLocation { per_gate, per_fragment_boundary };

struct NoiseSpec {
    Channel channel = Channel::none;
    double p = 0.0;
    NoiseLocation location = NoiseLocation::per_fragment_boundary;

    bool stochastic() const { return channel != Channel::none && p > 0.0; }
};

enum class Pauli { X, Y, Z };

inline Rotation pauli_rotation(Pauli p) {
    switch (p) {
    case Pauli::X: return rot_x();
    case Pauli::Y: return rot_y();
    default: return rot_z();
    }
}

inline std::string pauli_name(Pauli p) {
    switch (p) {
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    default: return "Z";
    }
}

/// Applies the channel independently to each listed qubit: bit_flip is X
/// with probability p, phase_flip is Z with probability p, depolarizing is
/// X, Y or Z each with probability p/3. Exactly one draw per qubit, so the
/// random stream is consumed uniformly regardless of outcomes.
inline void apply_channel(StateVector& st, const NoiseSpec& spec, std::span<const QubitId> qubits,
                          Rng& rng) {
    if (spec.channel == Channel::none || spec.p <= 0.0) return;
    for (QubitId q : qubits) {
        const double u = rng.next_unit();
        switch (spec.channel) {
        case Channel::bit_flip:
            if (u < spec.p) st.apply_rotation(q, rot_x());
            break;
        case Channel::phase_flip:
            if (u < spec.p) st.apply_rotation(q, rot_z());
            break;
        case Channel::depolarizing:
            if (u < spec.p / 3.0) st.apply_rotation(q, rot_x());
            else if (u < 2.0 * spec.p / 3.0) st.apply_rotation(q, rot_y());
            else if (u < spec.p) st.apply_rotation(q, rot_z());
            break;
        case Channel::none:
            break;
        }
    }
}

/// A deterministic Pauli inserted immediately after statement `site`.
struct FaultInjection {
    std::size_t site = 0;
    QubitRef qubit;
    Pauli pauli = Pauli::X;

    FaultInjection(std::size_t s, QubitRef q, Pauli p) : site(s), qubit(std::move(q)), pauli(p) {}
};

/// Returns the program with the fault spliced in right after its site.
/// The target must be a qubit binder that is live at that point.
inline QProgram inject(const QProgram& p, const FaultInjection& f) {
    if (f.site + 1 >= p.stmts.size() && !p.stmts.empty())
        throw BadSite("injection site " + std::to_string(f.site) + " is at or past the return");
    if (p.stmts.empty()) throw BadSite("cannot inject into an empty program");
    if (!f.qubit.is_name()) throw BadSite("injection targets must be qubit binders");

    bool live = false;
    for (std::size_t i = 0; i <= f.site; ++i) {
        if (const auto* mk = std::get_if<MkQbitStmt>(&p.stmts[i])) {
            if (mk->binder == f.qubit.name()) live = true;
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&p.stmts[i])) {
            if (rl->target == f.qubit) live = false;
        }
    }
    if (!live)
        throw BadSite("qubit '" + f.qubit.name() + "' is not live after statement " +
                      std::to_string(f.site));

    QProgram out = p;
    out.stmts.insert(out.stmts.begin() + static_cast<std::ptrdiff_t>(f.site) + 1,
                     ApplyStmt{u_of({g_rot(f.qubit, pauli_rotation(f.pauli))})});
    return out;
}

/// Probability that at least two of three independent flips occur:
/// the logical error rate of one majority-vote round, 3p^2 - 2p^3.
inline double analytic_majority_rate(double p) { return 3.0 * p * p - 2.0 * p * p * p; }

} // namespace qecw
