#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/io.hpp"
#include "predopt/core/model.hpp"
#include "predopt/core/time_grid.hpp"
#include "predopt/core/windows.hpp"
#include "predopt/evaluator.hpp"
#include "predopt/forecast/metrics.hpp"
#include "predopt/forecast/seasonal.hpp"
#include "predopt/forecast/tsf.hpp"
#include "predopt/generator.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/construct.hpp"
#include "predopt/heuristics/exact.hpp"
#include "predopt/heuristics/fix_optimize.hpp"
#include "predopt/heuristics/local_search.hpp"
#include "predopt/heuristics/objective.hpp"
#include "predopt/heuristics/precedence.hpp"
#include "predopt/heuristics/two_stage.hpp"
#include "predopt/mip/check.hpp"
#include "predopt/mip/export.hpp"
#include "predopt/mip/model.hpp"
#include "predopt/mip/rooms.hpp"
