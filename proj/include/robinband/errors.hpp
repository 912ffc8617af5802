#ifndef ROBINBAND_ERRORS_HPP
#define ROBINBAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace robinband {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ROBINBAND_DEFINE_ERROR(NAME)                     \
    struct NAME : Error {                                \
        explicit NAME(const std::string& msg)            \
            : Error(std::string(#NAME ": ") + msg) {}    \
    }

// geometry
ROBINBAND_DEFINE_ERROR(DegenerateCurve);
ROBINBAND_DEFINE_ERROR(OutsideCollar);
ROBINBAND_DEFINE_ERROR(WindowTooDeep);

// band1d
ROBINBAND_DEFINE_ERROR(UnresolvedBand);
ROBINBAND_DEFINE_ERROR(NoInteriorMinimum);
ROBINBAND_DEFINE_ERROR(EmptyInterval);
ROBINBAND_DEFINE_ERROR(UnboundedSublevel);

// model_spectra
ROBINBAND_DEFINE_ERROR(GridTooCoarse);
ROBINBAND_DEFINE_ERROR(ThresholdTooLow);
ROBINBAND_DEFINE_ERROR(PhaseMismatch);
ROBINBAND_DEFINE_ERROR(TruncationTooSmall);

// semiclassical
ROBINBAND_DEFINE_ERROR(LevelAboveField);
ROBINBAND_DEFINE_ERROR(LevelNotBelowField);
ROBINBAND_DEFINE_ERROR(MissingSupBound);
ROBINBAND_DEFINE_ERROR(TableTooSmall);

// solver2d
ROBINBAND_DEFINE_ERROR(MRangeTooSmall);
ROBINBAND_DEFINE_ERROR(IncompleteSpectrum);
ROBINBAND_DEFINE_ERROR(BudgetExceeded);

// cli_harness
ROBINBAND_DEFINE_ERROR(ConfigInvalid);

#undef ROBINBAND_DEFINE_ERROR

} // namespace robinband

#endif
