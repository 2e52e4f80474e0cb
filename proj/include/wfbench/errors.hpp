#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wfbench {

// Base class of everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfigurationError : Error {
  using Error::Error;
};

struct InvalidIndexError : Error {
  using Error::Error;
};

struct InvalidRequestError : Error {
  using Error::Error;
};

// Spec or metric definition fails its invariants.
struct ValidationError : Error {
  using Error::Error;
};

// BFS node budget exhausted; carries the cap that was hit.
struct EnumerationOverflowError : Error {
  EnumerationOverflowError(std::uint64_t cap_, const std::string& what_)
      : Error(what_), cap(cap_) {}
  std::uint64_t cap;
};

struct UnsupportedSymmetryError : Error {
  using Error::Error;
};

struct CompileBudgetError : Error {
  using Error::Error;
};

struct EvaluationContextError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Graph file problems, each its own type so callers can tell them apart.
struct FormatError : IoError {
  using IoError::IoError;
};
struct VersionError : FormatError {
  using FormatError::FormatError;
};
struct ChecksumError : FormatError {
  using FormatError::FormatError;
};
struct TruncatedFileError : FormatError {
  using FormatError::FormatError;
};

// External-bridge failures carry the last node id that was acknowledged
// (or -1 when the failure happened before any node was evaluated).
struct ExternalError : Error {
  ExternalError(const std::string& what_, std::int64_t node_id_)
      : Error(what_), node_id(node_id_) {}
  std::int64_t node_id;
};
struct ExternalProcessError : ExternalError {
  using ExternalError::ExternalError;
};
struct ExternalProtocolError : ExternalError {
  using ExternalError::ExternalError;
};
struct ExternalTimeoutError : ExternalError {
  using ExternalError::ExternalError;
};

// Bad search configuration (e.g. an empty mutation set).
struct SearchConfigError : Error {
  using Error::Error;
};

}  // namespace wfbench
