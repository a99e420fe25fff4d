#pragma once

#include "levyvisc/model/beta_family.hpp"
#include "levyvisc/model/coefficient.hpp"
#include "levyvisc/model/entropy.hpp"
#include "levyvisc/model/functionals.hpp"
#include "levyvisc/model/problem.hpp"
#include "levyvisc/model/quadrature.hpp"
#include "levyvisc/model/validation.hpp"
#include "levyvisc/noise/levy_measure.hpp"
#include "levyvisc/noise/noise_path.hpp"
#include "levyvisc/solver/scheme.hpp"
#include "levyvisc/solver/solve.hpp"
#include "levyvisc/estimators/entropy_residual.hpp"
#include "levyvisc/estimators/grid_functionals.hpp"
#include "levyvisc/estimators/monte_carlo.hpp"
#include "levyvisc/estimators/rate_fit.hpp"
#include "levyvisc/experiments/builders.hpp"
#include "levyvisc/experiments/config.hpp"
#include "levyvisc/experiments/drivers.hpp"
#include "levyvisc/experiments/report.hpp"
