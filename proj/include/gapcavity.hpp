#pragma once

#include "gapcavity/cavity.hpp"
#include "gapcavity/config.hpp"
#include "gapcavity/constants.hpp"
#include "gapcavity/cqed.hpp"
#include "gapcavity/error.hpp"
#include "gapcavity/field.hpp"
#include "gapcavity/fit.hpp"
#include "gapcavity/gap.hpp"
#include "gapcavity/gap_bounce.hpp"
#include "gapcavity/propagation.hpp"
#include "gapcavity/trap.hpp"
#include "gapcavity/waveguide.hpp"
