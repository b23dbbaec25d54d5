#pragma once

#include "hfsched/analysis.hpp"
#include "hfsched/instance_io.hpp"
#include "hfsched/model.hpp"
#include "hfsched/program.hpp"
#include "hfsched/simulation.hpp"
#include "hfsched/solver.hpp"
