#pragma once

#include <stdexcept>
#include <string>

namespace mlct {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data violated a file format or schema (bad PGM header, malformed table line).
struct FormatError : Error { using Error::Error; };

// Cross-references between inputs do not line up (dangling parent, missing region).
struct ConsistencyError : Error { using Error::Error; };

// A lineage graph structural invariant is broken (second parent, backward edge).
struct StructureError : Error { using Error::Error; };

// Operation arguments are invalid (dimension mismatch, bad experiment spec).
struct InputError : Error { using Error::Error; };

// No feasible assignment exists.
struct InfeasibleError : Error { using Error::Error; };

// A metric has no defined value on this input (empty ground truth, edgeless graph).
struct UndefinedMetricError : Error { using Error::Error; };

// A transform condition retained no frames.
struct EmptyConditionError : Error { using Error::Error; };

// A sweep grid is missing cells required by a reduction.
struct IncompleteGridError : Error { using Error::Error; };

} // namespace mlct
