#pragma once

#include <stdexcept>
#include <string>

namespace locout {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file (ragged rows, non-numeric cells, empty file).
class parse_error : public error {
public:
    using error::error;
};

// Input data violates a documented contract (duplicate rows under
// mode=error, all columns constant, label/score length mismatch).
class validation_error : public error {
public:
    using error::error;
};

// A parameter is outside its valid range (k, alpha, rho, ...).
class parameter_error : public error {
public:
    using error::error;
};

// A core cannot support a projection, e.g. a column is constant within
// the core so the per-core scale estimate collapses to zero.
class degenerate_core_error : public error {
public:
    using error::error;
};

// The score aggregation has no contributing projection for some
// observation (it sits inside every core).
class scoring_error : public error {
public:
    using error::error;
};

} // namespace locout
