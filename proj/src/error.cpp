#include "potrec/error.hpp"

namespace potrec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::OddN: return "OddN";
    case ErrorCode::WrongSpace: return "WrongSpace";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonUnitVector: return "NonUnitVector";
    case ErrorCode::UnderresolvedCap: return "UnderresolvedCap";
    case ErrorCode::UnderresolvedGrid: return "UnderresolvedGrid";
    case ErrorCode::DivergentSeries: return "DivergentSeries";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::EndpointCondition: return "EndpointCondition";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace potrec
