#pragma once

#include <stdexcept>
#include <string>

namespace mfgpdi {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad index, size mismatch, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// An integrand or nodal value evaluated to NaN or infinity.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

} // namespace mfgpdi
