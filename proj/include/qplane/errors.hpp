#pragma once

#include <stdexcept>
#include <string>

namespace qplane {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define QPLANE_DEFINE_ERROR(Name) \
  struct Name : Error {           \
    using Error::Error;           \
  }

QPLANE_DEFINE_ERROR(BadModulus);
QPLANE_DEFINE_ERROR(DivisionByZero);
QPLANE_DEFINE_ERROR(ModulusMismatch);
QPLANE_DEFINE_ERROR(DimensionMismatch);
QPLANE_DEFINE_ERROR(EmptySet);
QPLANE_DEFINE_ERROR(BadSpec);
QPLANE_DEFINE_ERROR(IsotropicUnavailable);
QPLANE_DEFINE_ERROR(SizeTooLarge);
QPLANE_DEFINE_ERROR(WrongResidueClass);
QPLANE_DEFINE_ERROR(LengthMismatch);
QPLANE_DEFINE_ERROR(TranslationOnly);
QPLANE_DEFINE_ERROR(TooLarge);
QPLANE_DEFINE_ERROR(MixedDims);
QPLANE_DEFINE_ERROR(BadDims);
QPLANE_DEFINE_ERROR(ZeroLength);
QPLANE_DEFINE_ERROR(NoAnchor);
QPLANE_DEFINE_ERROR(ZeroBaseLength);
QPLANE_DEFINE_ERROR(AsymmetricInput);
QPLANE_DEFINE_ERROR(NonzeroDiagonal);
QPLANE_DEFINE_ERROR(UsageError);

#undef QPLANE_DEFINE_ERROR

}  // namespace qplane
