#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "qecw/errors.hpp"

namespace qecw {

using Amplitude = std::complex<double>;

/// Tolerance for the unitarity check at construction and for gate-class
/// matching (transversal overrides).
inline constexpr double kUnitaryTol = 1e-9;

/// An arbitrary single-qubit 2x2 unitary. Every single-qubit operation is
/// one of these; named constructors cover the common gates and keep a tag
/// so the serializer can emit the sugar form instead of a raw matrix.
class Rotation {
  public:
    enum class Tag { general, identity, pauli_x, pauli_y, pauli_z, hadamard, s_gate, phase };

    Rotation(Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11,
             Tag tag = Tag::general, double theta = 0.0)
        : m00_(m00), m01_(m01), m10_(m10), m11_(m11), tag_(tag), theta_(theta) {
        check_unitarity();
    }

    Amplitude m00() const { return m00_; }
    Amplitude m01() const { return m01_; }
    Amplitude m10() const { return m10_; }
    Amplitude m11() const { return m11_; }
    Tag tag() const { return tag_; }
    double theta() const { return theta_; }

    /// Conjugate transpose.
    Rotation dagger() const {
        Tag t = Tag::general;
        double th = 0.0;
        switch (tag_) {
        case Tag::identity:
        case Tag::pauli_x:
        case Tag::pauli_y:
        case Tag::pauli_z:
        case Tag::hadamard:
            t = tag_; // self-adjoint
            break;
        case Tag::s_gate:
            t = Tag::phase;
            th = -std::numbers::pi / 2.0;
            break;
        case Tag::phase:
            t = Tag::phase;
            th = -theta_;
            break;
        case Tag::general:
            break;
        }
        return Rotation(std::conj(m00_), std::conj(m10_), std::conj(m01_), std::conj(m11_), t, th);
    }

  private:
    void check_unitarity() const {
        // Rows of M must be orthonormal: M * M^dagger = I.
        const auto r00 = m00_ * std::conj(m00_) + m01_ * std::conj(m01_);
        const auto r01 = m00_ * std::conj(m10_) + m01_ * std::conj(m11_);
        const auto r11 = m10_ * std::conj(m10_) + m11_ * std::conj(m11_);
        if (std::abs(r00 - 1.0) > kUnitaryTol || std::abs(r11 - 1.0) > kUnitaryTol ||
            std::abs(r01) > kUnitaryTol) {
            throw NotUnitary("2x2 matrix is not unitary within tolerance");
        }
    }

    Amplitude m00_, m01_, m10_, m11_;
    Tag tag_;
    double theta_;
};

inline bool operator==(const Rotation& a, const Rotation& b) {
    return a.m00() == b.m00() && a.m01() == b.m01() && a.m10() == b.m10() && a.m11() == b.m11();
}

inline bool approx_equal(const Rotation& a, const Rotation& b, double tol = kUnitaryTol) {
    return std::abs(a.m00() - b.m00()) <= tol && std::abs(a.m01() - b.m01()) <= tol &&
           std::abs(a.m10() - b.m10()) <= tol && std::abs(a.m11() - b.m11()) <= tol;
}

inline Rotation rot_identity() {
    return Rotation(1.0, 0.0, 0.0, 1.0, Rotation::Tag::identity);
}

inline Rotation rot_x() {
    return Rotation(0.0, 1.0, 1.0, 0.0, Rotation::Tag::pauli_x);
}

inline Rotation rot_y() {
    return Rotation(0.0, Amplitude(0.0, -1.0), Amplitude(0.0, 1.0), 0.0, Rotation::Tag::pauli_y);
}

inline Rotation rot_z() {
    return Rotation(1.0, 0.0, 0.0, -1.0, Rotation::Tag::pauli_z);
}

inline Rotation rot_h() {
    const double s = 1.0 / std::sqrt(2.0);
    return Rotation(s, s, s, -s, Rotation::Tag::hadamard);
}

inline Rotation rot_s() {
    return Rotation(1.0, 0.0, 0.0, Amplitude(0.0, 1.0), Rotation::Tag::s_gate);
}

/// diag(1, e^{i theta}).
inline Rotation rot_phase(double theta) {
    return Rotation(1.0, 0.0, 0.0, std::polar(1.0, theta), Rotation::Tag::phase, theta);
}

} // namespace qecw
