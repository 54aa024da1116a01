#pragma once

#include <stdexcept>
#include <string>

namespace prevsim {

enum class Errc {
  InvalidArgument,
  MissingFile,
  MalformedCsv,
  MissingLabelColumn,
  AmbiguousLabelColumn,
  UnparsableNumeric,
  TooManyLabelValues,
  EmptyDataset,
  SingleClass,
  DegenerateSplit,
  ClassExhausted,
  WidthMismatch,
  RankDeficient,
  InsufficientData,
  ZeroVariance,
  MissingRecords,
  InvalidConfig,
  Io,
};

const char* errc_name(Errc code) noexcept;

/// Library-wide exception. The code distinguishes failure classes that callers
/// (notably the CLI) report differently.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace prevsim
