#pragma once

#include "compbf/analytic.hpp"
#include "compbf/channel.hpp"
#include "compbf/curve.hpp"
#include "compbf/errors.hpp"
#include "compbf/geometry.hpp"
#include "compbf/io.hpp"
#include "compbf/montecarlo.hpp"
#include "compbf/quadrature.hpp"
#include "compbf/rng.hpp"
#include "compbf/specfun.hpp"
#include "compbf/spectral.hpp"
#include "compbf/stats.hpp"
#include "compbf/validation.hpp"
#include "compbf/version.hpp"
