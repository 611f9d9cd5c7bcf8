#pragma once

#include <stdexcept>
#include <string>

namespace ghisim {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GHISIM_DEFINE_ERROR(NAME)                                   \
  class NAME : public Error {                                       \
   public:                                                          \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

// calendar_io
GHISIM_DEFINE_ERROR(MissingColumn);
GHISIM_DEFINE_ERROR(NonMonotoneTimestamps);
GHISIM_DEFINE_ERROR(GapTooLarge);
GHISIM_DEFINE_ERROR(EmptyFile);
GHISIM_DEFINE_ERROR(IncompleteYears);

// seasonal_regression
GHISIM_DEFINE_ERROR(ExogenousMissing);
GHISIM_DEFINE_ERROR(RankDeficient);
GHISIM_DEFINE_ERROR(TooFewObservations);
GHISIM_DEFINE_ERROR(DegenerateDesign);
GHISIM_DEFINE_ERROR(NoConvergence);

// extreme_bounds
GHISIM_DEFINE_ERROR(TooFewExceedances);
GHISIM_DEFINE_ERROR(NonConvergence);
GHISIM_DEFINE_ERROR(PositiveShapeEndpointRequested);
GHISIM_DEFINE_ERROR(ShapeNotNegative);
GHISIM_DEFINE_ERROR(LogitDomain);

// beta_marginals
GHISIM_DEFINE_ERROR(BoundaryMass);
GHISIM_DEFINE_ERROR(DomainError);

// copulas
GHISIM_DEFINE_ERROR(ConvergenceFailure);
GHISIM_DEFINE_ERROR(TailOutOfRange);

// daily_baseline
GHISIM_DEFINE_ERROR(LinkDomain);
GHISIM_DEFINE_ERROR(NonStationaryFit);

// scenario_engine
GHISIM_DEFINE_ERROR(TotalExceedsEnvelope);

// scoring
GHISIM_DEFINE_ERROR(DimensionMismatch);
GHISIM_DEFINE_ERROR(HorizonMismatch);

// cli / artifacts
GHISIM_DEFINE_ERROR(ArtifactVersionMismatch);
GHISIM_DEFINE_ERROR(SeedMissing);
GHISIM_DEFINE_ERROR(ConfigError);

#undef GHISIM_DEFINE_ERROR

}  // namespace ghisim
