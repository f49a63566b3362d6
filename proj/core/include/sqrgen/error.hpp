#pragma once

#include <stdexcept>
#include <string>

namespace sqrgen {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ring
struct EmptySchema : Error { using Error::Error; };
struct IntrospectionFailure : Error { using Error::Error; };
struct MalformedRingFile : Error { using Error::Error; };

// sqr / templates
struct InvalidPlan : Error { using Error::Error; };
struct ParseError : Error {
  ParseError(const std::string& msg, int line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};
struct UndeclaredSlot : Error { using Error::Error; };
struct NoViableStructure : Error { using Error::Error; };

// filler / filters
struct NoFillableSlot : Error { using Error::Error; };
struct ValueSamplingFailure : Error { using Error::Error; };
struct TooFewChildren : Error { using Error::Error; };

// sqlgen
struct UnreachableEntities : Error { using Error::Error; };
struct UnboundAttribute : Error { using Error::Error; };
struct SqlExecutionError : Error { using Error::Error; };

// simplifier
struct SqlParseError : Error {
  SqlParseError(const std::string& msg, size_t position)
      : Error(msg + " at position " + std::to_string(position)), position(position) {}
  size_t position;
};
struct ExecutionFailed : Error {
  ExecutionFailed(const std::string& side_name, const std::string& msg)
      : Error("execution failed on " + side_name + ": " + msg), side(side_name) {}
  std::string side;
};

// question
struct UnfilledPlaceholder : Error { using Error::Error; };
struct LlmUnavailable : Error { using Error::Error; };
struct EmptyCompletion : Error { using Error::Error; };

// pipeline
struct RecordExhausted : Error {
  RecordExhausted(long index, const std::string& why)
      : Error("record " + std::to_string(index) + " exhausted retry budget: " + why),
        record_index(index) {}
  long record_index;
};
struct FatalConfigError : Error { using Error::Error; };

}  // namespace sqrgen
