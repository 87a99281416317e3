#pragma once

#include <stdexcept>
#include <string>

namespace evu {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user-supplied configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Task generation could not produce a solvable layout.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// A variable or predicate does not fit the world schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its contract (e.g. stepping a
/// terminal environment, probing EVU stages on a non-EVU trajectory).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Backend transport failure after the retry budget is exhausted.
class BackendError : public Error {
public:
    using Error::Error;
};

/// The backend cannot provide the requested facility (e.g. the remote
/// service exposes no token scores).
class CapabilityError : public BackendError {
public:
    using BackendError::BackendError;
};

/// A score candidate is not a single token under the service tokenizer.
class TokenizationError : public BackendError {
public:
    using BackendError::BackendError;
};

/// The scripted backend received a prompt it does not recognize.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A referenced run, file, or entity does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Process exit codes used by the CLI, one per error class.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitBackend = 3,
    kExitContract = 4,
    kExitNotFound = 5,
    kExitGeneration = 6,
};

}  // namespace evu
