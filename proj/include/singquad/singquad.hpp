#pragma once

#include "singquad/catalog.hpp"
#include "singquad/compensated.hpp"
#include "singquad/core.hpp"
#include "singquad/cutoff.hpp"
#include "singquad/errors.hpp"
#include "singquad/gauss_legendre.hpp"
#include "singquad/lattice.hpp"
#include "singquad/moments.hpp"
#include "singquad/oracle.hpp"
#include "singquad/rules.hpp"
#include "singquad/weight_io.hpp"
#include "singquad/weights.hpp"

#ifndef SINGQUAD_VERSION
#define SINGQUAD_VERSION "0.1.0"
#endif

namespace singquad {

inline constexpr const char* kVersion = SINGQUAD_VERSION;

}  // namespace singquad
