#include "mpclo/error.h"

namespace mpclo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kNotInterior: return "NotInterior";
    case ErrorCode::kOutsideDomain: return "OutsideDomain";
    case ErrorCode::kBoundaryUndefined: return "BoundaryUndefined";
    case ErrorCode::kNotAProjection: return "NotAProjection";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace mpclo
