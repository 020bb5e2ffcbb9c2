// SPDX-License-Identifier: Apache-2.0
#pragma once

// Engines only. mmwcov/experiment.hpp (config, CSV, manifest) also needs
// nlohmann/json and is included separately.

#include "mmwcov/analytic.hpp"
#include "mmwcov/association.hpp"
#include "mmwcov/curve.hpp"
#include "mmwcov/dominant.hpp"
#include "mmwcov/error.hpp"
#include "mmwcov/geometry.hpp"
#include "mmwcov/montecarlo.hpp"
#include "mmwcov/numerics/laplace.hpp"
#include "mmwcov/numerics/quadrature.hpp"
#include "mmwcov/numerics/special.hpp"
#include "mmwcov/params.hpp"
#include "mmwcov/radio.hpp"
#include "mmwcov/random.hpp"
#include "mmwcov/stats.hpp"
#include "mmwcov/version.hpp"
