#pragma once

#include "gup/model_core.hpp"
#include "gup/quadrature.hpp"
#include "gup/states.hpp"
#include "gup/operators.hpp"
#include "gup/analysis.hpp"
#include "gup/io.hpp"
#include "gup/cli.hpp"
