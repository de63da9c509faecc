#pragma once

#include "toppleone/analytic_moments.hpp"
#include "toppleone/csv.hpp"
#include "toppleone/distribution.hpp"
#include "toppleone/estimators.hpp"
#include "toppleone/mc_harness.hpp"
#include "toppleone/rng.hpp"
#include "toppleone/special_functions.hpp"
#include "toppleone/version.hpp"
