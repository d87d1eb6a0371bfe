// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wpdyn/coherence.hpp"
#include "wpdyn/config.hpp"
#include "wpdyn/csv.hpp"
#include "wpdyn/eigensolver.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/field.hpp"
#include "wpdyn/grids.hpp"
#include "wpdyn/potentials.hpp"
#include "wpdyn/propagator.hpp"
#include "wpdyn/quadrature.hpp"
#include "wpdyn/scenario.hpp"
#include "wpdyn/seeding.hpp"
#include "wpdyn/spectrum.hpp"
#include "wpdyn/units.hpp"
