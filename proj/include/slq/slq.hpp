#pragma once

// Umbrella header for the Sturm-Liouville quasi-derivative toolkit.

#include "slq/bracket.hpp"
#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/expr.hpp"
#include "slq/integrator.hpp"
#include "slq/problem_io.hpp"
#include "slq/quadform.hpp"
#include "slq/quadrature.hpp"
#include "slq/report.hpp"
#include "slq/sacheck.hpp"
#include "slq/shinzettl.hpp"
#include "slq/spectral.hpp"
#include "slq/trajectory.hpp"
#include "slq/validate.hpp"
