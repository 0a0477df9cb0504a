#pragma once

/// @file aoea.hpp
/// @brief Umbrella header for the whole library.

#include "aoea/analysis.hpp"
#include "aoea/atomic_ops.hpp"
#include "aoea/benchmarks.hpp"
#include "aoea/core.hpp"
#include "aoea/engine.hpp"
#include "aoea/experiment.hpp"
#include "aoea/optree.hpp"
#include "aoea/stats.hpp"
