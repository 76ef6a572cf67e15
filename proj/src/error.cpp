#include "camscout/error.hpp"

namespace camscout {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedUrl: return "MalformedUrl";
    case ErrorKind::UnparseablePayload: return "UnparseablePayload";
    case ErrorKind::SeedUnreachable: return "SeedUnreachable";
    case ErrorKind::FetchTimeout: return "FetchTimeout";
    case ErrorKind::FetchFailed: return "FetchFailed";
    case ErrorKind::AllSamplesFailed: return "AllSamplesFailed";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyImage: return "EmptyImage";
    case ErrorKind::InsufficientFrames: return "InsufficientFrames";
    case ErrorKind::Unclassifiable: return "Unclassifiable";
    case ErrorKind::StreamUnreachable: return "StreamUnreachable";
    case ErrorKind::PlaylistMalformed: return "PlaylistMalformed";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoValidPoint: return "NoValidPoint";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::ConflictingLabel: return "ConflictingLabel";
    case ErrorKind::LabelRejected: return "LabelRejected";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace camscout
