#pragma once

#include <stdexcept>
#include <string>

namespace liewalk {

// Every failure condition gets its own exception type so call sites and tests
// can react precisely instead of string-matching.
#define LIEWALK_DEFINE_ERROR(Name)                                      \
  struct Name : std::runtime_error {                                    \
    explicit Name(const std::string& msg)                               \
        : std::runtime_error(std::string(#Name) + ": " + msg) {}        \
  }

// Lie-algebra construction and membership.
LIEWALK_DEFINE_ERROR(UnsupportedFamily);
LIEWALK_DEFINE_ERROR(ParamTooSmall);
LIEWALK_DEFINE_ERROR(NotInAlgebra);
LIEWALK_DEFINE_ERROR(NotInGroup);
LIEWALK_DEFINE_ERROR(DegenerateCartan);

// Subspace geometry.
LIEWALK_DEFINE_ERROR(AmbientMismatch);
LIEWALK_DEFINE_ERROR(InvalidRho);
LIEWALK_DEFINE_ERROR(BadExponents);

// Walk spectrum estimation.
LIEWALK_DEFINE_ERROR(IllConditioned);
LIEWALK_DEFINE_ERROR(HypothesisFail);
LIEWALK_DEFINE_ERROR(BadMeasure);
LIEWALK_DEFINE_ERROR(ClusterAmbiguity);

// Dyadic decompositions.
LIEWALK_DEFINE_ERROR(InvalidEta);
LIEWALK_DEFINE_ERROR(LevelMismatch);
LIEWALK_DEFINE_ERROR(Infeasible);
LIEWALK_DEFINE_ERROR(NotPerceptive);

// Modular surface.
LIEWALK_DEFINE_ERROR(NotUnimodular);
LIEWALK_DEFINE_ERROR(EmptySample);

// Complex orthogonal transversality certificates.
LIEWALK_DEFINE_ERROR(NotOrthogonal);
LIEWALK_DEFINE_ERROR(DegenerateConfiguration);

// CLI / experiment drivers.
LIEWALK_DEFINE_ERROR(ConfigError);
LIEWALK_DEFINE_ERROR(InvariantViolation);

#undef LIEWALK_DEFINE_ERROR

}  // namespace liewalk
