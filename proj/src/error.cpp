#include "edgeagent/error.hpp"

namespace edgeagent {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::NotExported: return "NotExported";
    case Errc::NoMatch: return "NoMatch";
    case Errc::UnknownComponent: return "UnknownComponent";
    case Errc::NoForeground: return "NoForeground";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::OverlappingSegments: return "OverlappingSegments";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MalformedGatewayMessage: return "MalformedGatewayMessage";
    case Errc::PastFireTime: return "PastFireTime";
    case Errc::TimestampRegression: return "TimestampRegression";
    case Errc::EmptyRing: return "EmptyRing";
    case Errc::UnresolvedDeixis: return "UnresolvedDeixis";
    case Errc::StorageWriteFailure: return "StorageWriteFailure";
    case Errc::EmptyAfterReconcile: return "EmptyAfterReconcile";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::NoTarget: return "NoTarget";
    case Errc::PlannerFailure: return "PlannerFailure";
    case Errc::NotScrollable: return "NotScrollable";
    case Errc::EmptyArtifact: return "EmptyArtifact";
    case Errc::OrdinalOutOfRange: return "OrdinalOutOfRange";
    case Errc::NoArtifact: return "NoArtifact";
    case Errc::AlreadyRecording: return "AlreadyRecording";
    case Errc::NotRecording: return "NotRecording";
    case Errc::AppNotRunning: return "AppNotRunning";
    case Errc::FinalMismatch: return "FinalMismatch";
    case Errc::AllTiersFailed: return "AllTiersFailed";
    case Errc::ParseError: return "ParseError";
    case Errc::PortInUse: return "PortInUse";
    case Errc::ModelUnavailable: return "ModelUnavailable";
    case Errc::NotFound: return "NotFound";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

}  // namespace edgeagent
