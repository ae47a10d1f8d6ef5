#include "freqfuse/error.hpp"

namespace freqfuse {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownSplit: return "UnknownSplit";
    case ErrorCode::DuplicatePath: return "DuplicatePath";
    case ErrorCode::SplitOverlap: return "SplitOverlap";
    case ErrorCode::DecodeFailure: return "DecodeFailure";
    case ErrorCode::OddTarget: return "OddTarget";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::BadBlockSize: return "BadBlockSize";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::SelectionTooLarge: return "SelectionTooLarge";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::EmptyCube: return "EmptyCube";
    case ErrorCode::BranchMismatch: return "BranchMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotEnoughClasses: return "NotEnoughClasses";
    case ErrorCode::NotEnoughItems: return "NotEnoughItems";
    case ErrorCode::ZeroPrototype: return "ZeroPrototype";
    case ErrorCode::TooFewEpisodes: return "TooFewEpisodes";
    case ErrorCode::BadEpisodeSpec: return "BadEpisodeSpec";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ItemMismatch: return "ItemMismatch";
    case ErrorCode::LabelConflict: return "LabelConflict";
  }
  return "Unknown";
}

bool is_numeric(ErrorCode code) noexcept {
  return code == ErrorCode::ZeroPrototype || code == ErrorCode::NonFinite;
}

}  // namespace freqfuse
