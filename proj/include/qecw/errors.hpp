#pragma once

#include <stdexcept>
#include <string>

namespace qecw {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A gate or measurement targeted a qubit id that is not allocated.
class UnallocatedQubit : public Error {
  public:
    using Error::Error;
};

/// A name was referenced before being bound (or after its scope ended).
class UnboundName : public Error {
  public:
    using Error::Error;
};

/// A scoped temporary qubit was left entangled or flipped at scope exit,
/// or a released qubit did not hold a definite basis value.
class AncillaNotReturned : public Error {
  public:
    using Error::Error;
};

/// Two states over different qubit sets were compared.
class MismatchedRegisters : public Error {
  public:
    using Error::Error;
};

/// A 2x2 matrix failed the unitarity check at construction.
class NotUnitary : public Error {
  public:
    using Error::Error;
};

/// The live-qubit capacity of the sparse representation was exceeded.
class TooManyQubits : public Error {
  public:
    using Error::Error;
};

/// Exact evaluation was requested while a stochastic channel is active.
class StochasticNoisePresent : public Error {
  public:
    using Error::Error;
};

/// Requested code name is not in the catalog.
class UnknownCode : public Error {
  public:
    using Error::Error;
};

/// Two encoded qubits of different codes were combined.
class CodeMismatch : public Error {
  public:
    using Error::Error;
};

/// Two encoded qubits share physical qubits.
class OverlappingTuples : public Error {
  public:
    using Error::Error;
};

/// A program manipulated a qubit the rewriter never saw created.
class UnknownQubit : public Error {
  public:
    using Error::Error;
};

/// A binder substitution hit a scope that rebinds the same name.
class ShadowedBinder : public Error {
  public:
    using Error::Error;
};

/// A fault injection site is out of bounds or targets a dead qubit.
class BadSite : public Error {
  public:
    using Error::Error;
};

/// An internal invariant (norm preservation, probability bookkeeping)
/// was violated; indicates a bug, not bad input.
class BrokenInvariant : public Error {
  public:
    using Error::Error;
};

/// Program document could not be decoded.
class SyntaxError : public Error {
  public:
    using Error::Error;
};

/// Program document has a version this build does not understand.
class UnsupportedVersion : public Error {
  public:
    using Error::Error;
};

} // namespace qecw
