#pragma once

#include "capacity.hpp"
#include "errors.hpp"
#include "fading_model.hpp"
#include "monte_carlo.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
#include "sweep.hpp"
