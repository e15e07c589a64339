#pragma once

#include <stdexcept>

namespace selrec {

/// A numerical procedure (quadrature, step refinement, grid check) did not
/// reach its tolerance. Contract violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace selrec
