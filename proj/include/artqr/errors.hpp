// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace artqr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class CapacityExceeded : public Error {
public:
    using Error::Error;
};

class FormatInfoError : public Error {
public:
    using Error::Error;
};

class UncorrectableError : public Error {
public:
    using Error::Error;
};

class StylizerFailure : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A decoded symbol disagrees with its recorded ground truth.
class VerificationFailure : public Error {
public:
    using Error::Error;
};

}  // namespace artqr
