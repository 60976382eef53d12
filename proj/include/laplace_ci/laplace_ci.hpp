#pragma once

#include "laplace_ci/analysis.hpp"
#include "laplace_ci/errors.hpp"
#include "laplace_ci/export.hpp"
#include "laplace_ci/format.hpp"
#include "laplace_ci/intervals.hpp"
#include "laplace_ci/likelihood.hpp"
#include "laplace_ci/parallel.hpp"
#include "laplace_ci/precision.hpp"
#include "laplace_ci/quadrature.hpp"
#include "laplace_ci/report.hpp"
#include "laplace_ci/specfun.hpp"
