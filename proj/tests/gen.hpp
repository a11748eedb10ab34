#pragma once

// Seeded random generators for property tests: unitaries drawn from the
// full gate grammar and product-ish random states.

#include <cmath>
#include <string>
#include <vector>

#include "qecw/ir.hpp"
#include "qecw/rng.hpp"
#include "qecw/rotation.hpp"
#include "qecw/state_vector.hpp"

namespace testgen {

inline qecw::Rotation random_rotation(qecw::Rng& rng) {
    switch (rng.next_u64() % 6) {
    case 0: return qecw::rot_x();
    case 1: return qecw::rot_h();
    case 2: return qecw::rot_z();
    case 3: return qecw::rot_s();
    case 4: return qecw::rot_phase(rng.next_unit() * 6.28318530717958648);
    default: {
        const double t = rng.next_unit() * 3.14159265358979324;
        const double phi = rng.next_unit() * 6.28318530717958648;
        const double lam = rng.next_unit() * 6.28318530717958648;
        using A = qecw::Amplitude;
        return qecw::Rotation(A(std::cos(t / 2), 0), -std::polar(std::sin(t / 2), lam),
                              std::polar(std::sin(t / 2), phi),
                              std::polar(std::cos(t / 2), phi + lam));
    }
    }
}

/// Random unitary over `qubits`, depth-bounded, drawn from the full step
/// grammar (rot, swap, cond, ulet).
inline qecw::Unitary random_unitary(qecw::Rng& rng, std::vector<qecw::QubitRef> qubits, int depth,
                                    int& name_counter) {
    using namespace qecw;
    Unitary u;
    if (depth <= 0 || qubits.empty()) return u;
    const int steps = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(depth));
    for (int s = 0; s < steps; ++s) {
        const auto pick = [&](std::size_t n) { return rng.next_u64() % n; };
        switch (pick(qubits.size() >= 2 ? 4 : 2)) {
        case 0:
            u.append(g_rot(qubits[pick(qubits.size())], random_rotation(rng)));
            break;
        case 1: {
            if (qubits.size() < 2) {
                u.append(g_rot(qubits[pick(qubits.size())], random_rotation(rng)));
                break;
            }
            // Compute-use-uncompute so the scratch qubit provably returns
            // to |0>: copy a source bit in, branch on it, copy it back out.
            Name binder = "gen_t" + std::to_string(name_counter++);
            const std::size_t si = pick(qubits.size());
            std::vector<QubitRef> others;
            for (std::size_t i = 0; i < qubits.size(); ++i)
                if (i != si) others.push_back(qubits[i]);
            Unitary body;
            body.append(g_cnot(qubits[si], binder));
            body.append(g_cond(binder, random_unitary(rng, others, depth / 2, name_counter),
                               random_unitary(rng, others, depth / 2, name_counter)));
            body.append(g_cnot(qubits[si], binder));
            u.append(g_ulet(false, binder, body));
            break;
        }
        case 2: {
            const std::size_t i = pick(qubits.size());
            std::size_t j = pick(qubits.size() - 1);
            if (j >= i) ++j;
            u.append(g_swap(qubits[i], qubits[j]));
            break;
        }
        default: {
            const std::size_t c = pick(qubits.size());
            std::vector<QubitRef> rest;
            for (std::size_t i = 0; i < qubits.size(); ++i)
                if (i != c) rest.push_back(qubits[i]);
            u.append(g_cond(qubits[c], random_unitary(rng, rest, depth / 2, name_counter),
                            random_unitary(rng, rest, depth / 2, name_counter)));
            break;
        }
        }
    }
    return u;
}

/// Entangled-ish random state: random rotations on every qubit, then a
/// ring of CNOTs, then another rotation layer.
inline void randomize_state(qecw::Rng& rng, qecw::StateVector& st,
                            const std::vector<qecw::QubitId>& qubits) {
    for (qecw::QubitId q : qubits) st.apply_rotation(q, random_rotation(rng));
    for (std::size_t i = 0; i + 1 < qubits.size(); ++i) {
        qecw::StateVector zero = st.component(qubits[i], false);
        qecw::StateVector one = st.component(qubits[i], true);
        one.apply_rotation(qubits[i + 1], qecw::rot_x());
        st.merge_components(std::move(zero), std::move(one));
    }
    for (qecw::QubitId q : qubits) st.apply_rotation(q, random_rotation(rng));
}

} // namespace testgen
