#pragma once

#include "sspm/errors.hpp"
#include "sspm/stream.hpp"
#include "sspm/random.hpp"
#include "sspm/space_saving.hpp"
#include "sspm/double_space_saving.hpp"
#include "sspm/integrated_space_saving.hpp"
#include "sspm/legacy_space_saving.hpp"
#include "sspm/grid_sketch.hpp"
#include "sspm/workloads.hpp"
#include "sspm/evaluation.hpp"
#include "sspm/experiment.hpp"
