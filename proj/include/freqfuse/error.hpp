#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqfuse {

enum class ErrorCode {
  // ingest
  MalformedRow,
  UnknownSplit,
  DuplicatePath,
  SplitOverlap,
  DecodeFailure,
  OddTarget,
  // colorspace / dct / freqcube
  OddDimension,
  BadBlockSize,
  SizeMismatch,
  NotDivisible,
  OutOfRange,
  EmptyGrid,
  SelectionTooLarge,
  BadConfig,
  // features
  EmptyCube,
  BranchMismatch,
  SingleClass,
  DimMismatch,
  NonFinite,
  // fewshot
  NotEnoughClasses,
  NotEnoughItems,
  ZeroPrototype,
  TooFewEpisodes,
  BadEpisodeSpec,
  // featureio
  IoFailure,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  CorruptFile,
  DuplicateId,
  ItemMismatch,
  LabelConflict,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Errors that abort a pipeline because of a numeric condition rather than
/// malformed data. The CLI maps these to a distinct exit status.
bool is_numeric(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freqfuse
