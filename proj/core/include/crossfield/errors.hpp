#pragma once

#include <stdexcept>
#include <string>

namespace crossfield {

// Base class for all recoverable library errors. Hard contract violations
// (non-finite fields, broken invariants) use these; soft conditions that the
// pipeline can continue past are reported through flags or diagnostics
// structs instead.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PolygonOutOfBounds : Error {
    using Error::Error;
};
struct NonSimplePolygon : Error {
    using Error::Error;
};
struct DegenerateCorner : Error {
    using Error::Error;
};
struct EmptyBand : Error {
    using Error::Error;
};
struct NotNormalized : Error {
    using Error::Error;
};
struct AmbiguousWinding : Error {
    using Error::Error;
};
struct StagnantTrace : Error {
    using Error::Error;
};
struct NonManifoldNode : Error {
    using Error::Error;
};
struct EulerViolation : Error {
    using Error::Error;
};
struct SolverDiverged : Error {
    using Error::Error;
};
struct NonConformingInterface : Error {
    using Error::Error;
};
struct InvalidArgument : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace crossfield
