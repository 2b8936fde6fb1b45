#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

enum class ErrorCode {
  InvalidArgument,
  InvalidMesh,
  DegenerateFace,
  GaugeMismatch,
  TimeMismatch,
  StepRejected,
  Divergence,
  NeckPinch,
  NonMeanConvex,
  ProjectionAmbiguous,
  NotAGraph,
  AmbiguousQuery,
  TooFewVertices,
  EmptyTrace,
  Io,
  Parse,
  Validation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace mcf
