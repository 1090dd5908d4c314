#pragma once

// Umbrella header: moment estimation and hypothesis testing for the
// quadratic-q subfamily of Pearson distributions, with the delta-method
// asymptotics and a reproducible Monte Carlo harness.

#include "pearsonq/asymptotics.hpp"
#include "pearsonq/competitors.hpp"
#include "pearsonq/distributions.hpp"
#include "pearsonq/errors.hpp"
#include "pearsonq/estimators.hpp"
#include "pearsonq/format.hpp"
#include "pearsonq/hypothesis_tests.hpp"
#include "pearsonq/moments.hpp"
#include "pearsonq/quadrature.hpp"
#include "pearsonq/rng.hpp"
#include "pearsonq/simharness.hpp"
#include "pearsonq/small_matrix.hpp"
#include "pearsonq/special_functions.hpp"
#include "pearsonq/summation.hpp"
#include "pearsonq/version.hpp"
