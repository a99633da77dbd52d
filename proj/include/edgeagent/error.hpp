#pragma once

#include <stdexcept>
#include <string>

namespace edgeagent {

enum class Errc {
  // device
  NotExported,
  NoMatch,
  UnknownComponent,
  NoForeground,
  OutOfBounds,
  OverlappingSegments,
  InvalidArgument,
  // ingress
  MalformedGatewayMessage,
  PastFireTime,
  // perception
  TimestampRegression,
  EmptyRing,
  UnresolvedDeixis,
  // memory
  StorageWriteFailure,
  EmptyAfterReconcile,
  UnknownSession,
  // grounding
  NoTarget,
  // agent loop
  PlannerFailure,
  NotScrollable,
  EmptyArtifact,
  OrdinalOutOfRange,
  NoArtifact,
  // clone / replay
  AlreadyRecording,
  NotRecording,
  AppNotRunning,
  FinalMismatch,
  AllTiersFailed,
  // host
  ParseError,
  PortInUse,
  ModelUnavailable,
  NotFound,
};

const char* errc_name(Errc code);

/// The single exception type thrown by the runtime. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace edgeagent
