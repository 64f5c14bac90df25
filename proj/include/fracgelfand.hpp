#pragma once

#include "fracgelfand/version.hpp"
#include "fracgelfand/errors.hpp"
#include "fracgelfand/specfun.hpp"
#include "fracgelfand/constants.hpp"
#include "fracgelfand/threshold.hpp"
#include "fracgelfand/quadrature.hpp"
#include "fracgelfand/grid.hpp"
#include "fracgelfand/kernel.hpp"
#include "fracgelfand/fraclap.hpp"
#include "fracgelfand/gelfand.hpp"
#include "fracgelfand/io.hpp"
