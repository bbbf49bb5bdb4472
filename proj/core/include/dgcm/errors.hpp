#pragma once

#include <stdexcept>
#include <string>

namespace dgcm {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An argument lies outside its mathematical domain (e.g. a rescaled time
/// outside [0,1], a p-value outside (0,1]).
struct DomainError : Error {
    using Error::Error;
};

/// A time index, possibly after applying an offset, falls outside [1, n].
struct OutOfRangeError : Error {
    using Error::Error;
};

/// The offsets leave no usable observation times.
struct EmptyRangeError : Error {
    using Error::Error;
};

/// Fewer rows than columns in a least-squares problem.
struct UnderdeterminedError : Error {
    using Error::Error;
};

/// Numerically rank-deficient design with no regularization requested.
struct RankDeficientError : Error {
    using Error::Error;
};

/// A required regression fit was not supplied.
struct MissingFitError : Error {
    using Error::Error;
};

/// Lag-window size exceeds the number of usable times.
struct WindowTooLargeError : Error {
    using Error::Error;
};

/// Lag-window candidate set is empty, unsorted, or infeasible.
struct InvalidCandidatesError : Error {
    using Error::Error;
};

/// Too few usable times to run a test.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// The effective range cannot accommodate the requested fold structure.
struct RangeTooSmallError : Error {
    using Error::Error;
};

/// A cross-validation training fold is too small for a grid candidate.
/// Candidates hitting this are skipped rather than aborting the search.
struct FoldTooSmallError : Error {
    using Error::Error;
};

/// Malformed input file; message carries row/column location.
struct CsvParseError : Error {
    using Error::Error;
};

/// Ingested data violates a content requirement (non-positive price,
/// a series with no usable observations, non-finite values, ...).
struct DataError : Error {
    using Error::Error;
};

/// Filesystem failure while reading or writing results.
struct IoError : Error {
    using Error::Error;
};

/// True for failures of the numerical pipeline as opposed to bad input
/// data; the command-line tool maps these to distinct exit codes.
inline bool is_numerical_error(const Error& e) {
    return dynamic_cast<const CsvParseError*>(&e) == nullptr &&
           dynamic_cast<const DataError*>(&e) == nullptr &&
           dynamic_cast<const IoError*>(&e) == nullptr;
}

}  // namespace dgcm
