#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/rng.hpp"
#include "qecw/rotation.hpp"

namespace qecw {

/// A basis configuration: one boolean per allocated qubit.
using BasisState = std::map<QubitId, bool>;

/// Terms whose squared mass of disagreement is below this are treated as
/// numerical noise during ulet/release checks and projected away.
inline constexpr double kDisentangleTol = 1e-9;

inline constexpr double kNormTol = 1e-9;

/// Sparse complex-amplitude map over the allocated qubits.
///
/// Each term keys a 64-bit mask whose bit i is the value of the i-th live
/// slot; slots are kept in allocation order and compacted on release, so
/// qubit ids held by callers stay valid while the storage stays dense.
/// Terms are kept in an ordered map so every fold over amplitudes is
/// performed in a platform-independent order.
class StateVector {
  public:
    using Mask = std::uint64_t;

    StateVector() { terms_[0] = Amplitude(1.0, 0.0); }

    double prune_threshold = 1e-12;

    std::size_t num_qubits() const { return slots_.size(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<QubitId>& allocated() const { return slots_; }

    bool is_allocated(QubitId q) const {
        return std::find(slots_.begin(), slots_.end(), q) != slots_.end();
    }

    /// Extends every term with a fresh qubit at |init>. Ids are assigned
    /// by a monotone counter and never reused within one evaluation.
    QubitId alloc(bool init) {
        if (slots_.size() >= 64) throw TooManyQubits("more than 64 live qubits");
        QubitId q{next_index_++};
        const int slot = static_cast<int>(slots_.size());
        slots_.push_back(q);
        if (init) {
            std::map<Mask, Amplitude> next;
            const Mask bit = Mask(1) << slot;
            for (const auto& [m, a] : terms_) next.emplace(m | bit, a);
            terms_ = std::move(next);
        }
        return q;
    }

    /// Removes a qubit that holds a definite basis value in every term
    /// (violating terms below kDisentangleTol squared mass are projected
    /// away; more than that throws). If `expect` is set the definite value
    /// must equal it.
    void release(QubitId q, std::optional<bool> expect = std::nullopt) {
        const int slot = slot_of(q);
        const Mask bit = Mask(1) << slot;

        double mass0 = 0.0, mass1 = 0.0;
        for (const auto& [m, a] : terms_) ((m & bit) ? mass1 : mass0) += std::norm(a);
        bool value = mass1 > mass0;
        if (expect) {
            const double off_mass = *expect ? mass0 : mass1;
            if (off_mass >= kDisentangleTol)
                throw AncillaNotReturned("temporary qubit #" + std::to_string(q.index) +
                                         " not returned to its initial value");
            value = *expect;
        } else {
            const double off_mass = std::min(mass0, mass1);
            if (off_mass >= kDisentangleTol)
                throw AncillaNotReturned("released qubit #" + std::to_string(q.index) +
                                         " is still entangled");
        }

        const Mask low = bit - 1;
        std::map<Mask, Amplitude> next;
        double kept = 0.0;
        for (const auto& [m, a] : terms_) {
            if (((m & bit) != 0) != value) continue; // numerical-noise projection
            kept += std::norm(a);
            next.emplace((m & low) | ((m >> (slot + 1)) << slot), a);
        }
        terms_ = std::move(next);
        slots_.erase(slots_.begin() + slot);
        // Restore the mass held before projection; the state may be a
        // sub-normalized branch component, so scale by ratio, not to 1.
        const double total = mass0 + mass1;
        if (kept > 0.0 && total > 0.0) {
            const double s = std::sqrt(total / kept);
            for (auto& [m, a] : terms_) a *= s;
        }
    }

    void apply_rotation(QubitId q, const Rotation& r) {
        const Mask bit = Mask(1) << slot_of(q);
        std::map<Mask, Amplitude> next;
        for (const auto& [m, a] : terms_) {
            if ((m & bit) == 0) {
                accumulate(next, m, r.m00() * a);
                accumulate(next, m | bit, r.m10() * a);
            } else {
                accumulate(next, m & ~bit, r.m01() * a);
                accumulate(next, m, r.m11() * a);
            }
        }
        terms_ = std::move(next);
        prune();
    }

    void apply_swap(QubitId qa, QubitId qb) {
        if (qa == qb) throw Error("swap of a qubit with itself");
        const Mask ba = Mask(1) << slot_of(qa);
        const Mask bb = Mask(1) << slot_of(qb);
        std::map<Mask, Amplitude> next;
        for (const auto& [m, a] : terms_) {
            Mask out = m;
            const bool va = m & ba, vb = m & bb;
            if (va != vb) out ^= (ba | bb);
            next.emplace(out, a);
        }
        terms_ = std::move(next);
    }

    double prob_one(QubitId q) const {
        const Mask bit = Mask(1) << slot_of(q);
        double p = 0.0;
        for (const auto& [m, a] : terms_)
            if (m & bit) p += std::norm(a);
        return std::min(1.0, p);
    }

    /// Projects onto `value` for qubit q and renormalizes.
    void collapse(QubitId q, bool value) {
        const Mask bit = Mask(1) << slot_of(q);
        double kept = 0.0;
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (((it->first & bit) != 0) == value) {
                kept += std::norm(it->second);
                ++it;
            } else {
                it = terms_.erase(it);
            }
        }
        if (kept <= 0.0) throw BrokenInvariant("collapse onto an outcome of probability zero");
        renormalize(kept);
    }

    /// Samples the qubit, collapses, and returns the outcome. Always
    /// consumes exactly one draw.
    bool measure(QubitId q, Rng& rng) {
        const double p1 = prob_one(q);
        const bool outcome = rng.next_unit() < p1;
        collapse(q, outcome);
        return outcome;
    }

    double norm_sq() const {
        double n = 0.0;
        for (const auto& [m, a] : terms_) n += std::norm(a);
        return n;
    }

    void check_norm() const {
        if (std::abs(norm_sq() - 1.0) > kNormTol)
            throw BrokenInvariant("state norm drifted beyond tolerance");
    }

    /// Amplitude of a fully specified basis configuration. The domain must
    /// equal the allocated set.
    Amplitude amplitude(const BasisState& basis) const {
        if (basis.size() != slots_.size()) throw MismatchedRegisters("basis domain mismatch");
        Mask m = 0;
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            auto it = basis.find(slots_[i]);
            if (it == basis.end()) throw MismatchedRegisters("basis domain mismatch");
            if (it->second) m |= Mask(1) << i;
        }
        auto it = terms_.find(m);
        return it == terms_.end() ? Amplitude(0.0, 0.0) : it->second;
    }

    /// fn(const BasisState&, Amplitude) over every stored term.
    template <typename F> void for_each_term(F&& fn) const {
        for (const auto& [m, a] : terms_) {
            BasisState b;
            for (std::size_t i = 0; i < slots_.size(); ++i) b[slots_[i]] = (m >> i) & 1;
            fn(b, a);
        }
    }

    /// Sub-state holding only the terms where `q` equals `value`; same
    /// slot layout and id counter. Not normalized.
    StateVector component(QubitId q, bool value) const {
        const Mask bit = Mask(1) << slot_of(q);
        StateVector out = *this;
        for (auto it = out.terms_.begin(); it != out.terms_.end();) {
            if (((it->first & bit) != 0) == value) ++it;
            else it = out.terms_.erase(it);
        }
        return out;
    }

    /// Reunites two components produced by `component` after branch
    /// application. Layouts must agree; the id counter advances past both.
    void merge_components(StateVector&& zero_part, StateVector&& one_part) {
        if (zero_part.slots_ != one_part.slots_)
            throw BrokenInvariant("conditional branches ended with different registers");
        slots_ = zero_part.slots_;
        next_index_ = std::max(zero_part.next_index_, one_part.next_index_);
        terms_ = std::move(zero_part.terms_);
        for (auto& [m, a] : one_part.terms_) accumulate(terms_, m, a);
        prune();
    }

    bool empty_branch() const { return terms_.empty(); }

  private:
    int slot_of(QubitId q) const {
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i] == q) return static_cast<int>(i);
        throw UnallocatedQubit("qubit #" + std::to_string(q.index) + " is not allocated");
    }

    static void accumulate(std::map<Mask, Amplitude>& into, Mask m, Amplitude a) {
        auto [it, inserted] = into.emplace(m, a);
        if (!inserted) it->second += a;
    }

    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) < prune_threshold) it = terms_.erase(it);
            else ++it;
        }
    }

    void renormalize(double mass) {
        if (mass <= 0.0) return;
        const double s = 1.0 / std::sqrt(mass);
        for (auto& [m, a] : terms_) a *= s;
    }

    std::vector<QubitId> slots_;
    std::map<Mask, Amplitude> terms_;
    std::uint32_t next_index_ = 0;
};

/// |<a|b>|^2. Requires the same allocated qubit set (any order).
inline double fidelity(const StateVector& a, const StateVector& b) {
    auto sa = a.allocated();
    auto sb = b.allocated();
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) throw MismatchedRegisters("fidelity over different qubit sets");
    Amplitude inner(0.0, 0.0);
    a.for_each_term([&](const BasisState& basis, Amplitude va) {
        inner += std::conj(va) * b.amplitude(basis);
    });
    return std::norm(inner);
}

} // namespace qecw
