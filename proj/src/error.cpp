#include "prevsim/error.hpp"

namespace prevsim {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::MissingFile: return "missing file";
    case Errc::MalformedCsv: return "malformed csv";
    case Errc::MissingLabelColumn: return "missing label column";
    case Errc::AmbiguousLabelColumn: return "ambiguous label column";
    case Errc::UnparsableNumeric: return "unparsable numeric cell";
    case Errc::TooManyLabelValues: return "too many label values";
    case Errc::EmptyDataset: return "empty dataset";
    case Errc::SingleClass: return "single class";
    case Errc::DegenerateSplit: return "degenerate split";
    case Errc::ClassExhausted: return "class exhausted";
    case Errc::WidthMismatch: return "width mismatch";
    case Errc::RankDeficient: return "rank deficient";
    case Errc::InsufficientData: return "insufficient data";
    case Errc::ZeroVariance: return "zero variance";
    case Errc::MissingRecords: return "missing records";
    case Errc::InvalidConfig: return "invalid config";
    case Errc::Io: return "i/o error";
  }
  return "unknown";
}

}  // namespace prevsim
