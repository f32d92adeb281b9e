#pragma once

#include <stdexcept>
#include <string>

namespace judgekit {

/// Base class for all judgekit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- domain / parsing ----

class UnknownDimensionError : public Error {
public:
    explicit UnknownDimensionError(const std::string& key)
        : Error("unknown visual dimension: '" + key + "'"), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class NonFiniteScoreError : public Error {
public:
    NonFiniteScoreError() : Error("score comparison requires finite values") {}
};

class OutOfRangeError : public Error {
public:
    explicit OutOfRangeError(double value, const std::string& what)
        : Error(what), value_(value) {}
    double value() const { return value_; }

private:
    double value_;
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what = "empty input") : Error(what) {}
};

// ---- statistics ----

/// Raised when the kappa denominator is zero (e.g. both raters constant):
/// agreement is undefined, not perfect.
class DegenerateMarginalsError : public Error {
public:
    DegenerateMarginalsError()
        : Error("weighted kappa undefined: expected disagreement is zero") {}
};

class NoOverlapError : public Error {
public:
    NoOverlapError() : Error("no (record_id, candidate_id) overlap between review sets") {}
};

// ---- judge client ----

class NoRatingFoundError : public Error {
public:
    explicit NoRatingFoundError(const std::string& raw)
        : Error("no 'Rating: <n>' line found in judge reply"), raw_(raw) {}
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

enum class GatewayErrorKind { timeout, http_status, transport, auth };

class GatewayError : public Error {
public:
    GatewayError(GatewayErrorKind kind, const std::string& what)
        : Error(what), kind_(kind) {}
    GatewayErrorKind kind() const { return kind_; }

private:
    GatewayErrorKind kind_;
};

class ExhaustedRetriesError : public Error {
public:
    explicit ExhaustedRetriesError(int attempts)
        : Error("no parseable rating after " + std::to_string(attempts) + " attempts"),
          attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

// ---- debate ----

class MissingReferenceError : public Error {
public:
    explicit MissingReferenceError(const std::string& record_id)
        : Error("record '" + record_id + "' has no reference answer; debate requires one") {}
};

class ConsolidationFailedError : public Error {
public:
    explicit ConsolidationFailedError(const std::string& what) : Error(what) {}
};

// ---- aggregation ----

class MissingEntryError : public Error {
public:
    MissingEntryError(const std::string& dimension, const std::string& judge_id)
        : Error("reliability matrix has no entry for (" + dimension + ", " + judge_id + ")") {}
};

// ---- storage ----

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& cause)
        : Error("line " + std::to_string(line) + ": " + cause), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateRecordIdError : public Error {
public:
    DuplicateRecordIdError(std::size_t line, const std::string& record_id)
        : Error("line " + std::to_string(line) + ": duplicate record_id '" + record_id + "'") {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace judgekit
