#pragma once

#include <stdexcept>
#include <string>

namespace laudit {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (JSONL line, config document, trace).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value violates a documented invariant (duplicate id, empty text, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Requested draw or sample count exceeds what is available.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Operation invoked on a model handle that lacks the matching capability.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Detector cannot run on the given backend (e.g. Min-K++ over HTTP).
class UnsupportedDetectorError : public Error {
public:
    using Error::Error;
};

/// Backend failed after retries, or returned an unusable answer.
class TransportError : public Error {
public:
    using Error::Error;
};

/// A per-sample failure, tagged with the sample that caused it.
class SampleError : public Error {
public:
    SampleError(std::string sample_id, const std::string& what)
        : Error("sample '" + sample_id + "': " + what), sample_id_(std::move(sample_id)) {}

    const std::string& sample_id() const noexcept { return sample_id_; }

private:
    std::string sample_id_;
};

}  // namespace laudit
