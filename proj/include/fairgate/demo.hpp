#pragma once

#include "fairgate/core.hpp"
#include "fairgate/dynamics.hpp"

namespace fairgate::demo {

/// Levels {-2, -1, 2}, equal group sizes, A = [0.3, 0.1, 0.6], B = [0.5, 0.1, 0.4].
PopulationState three_level_population();

/// Kernel on {-2, -1, 2} in which selection at -1 makes decline likely:
/// selected row -1 is [0.8, 0.1, 0.1], rejected row -1 is [0.1, 0.1, 0.8];
/// rows -2 and 2 are [0.8, 0.1, 0.1] and [0.1, 0.1, 0.8] for both decisions.
DynamicsKernel three_level_kernel();

/// Synthetic stand-in for a two-group GPA table: GPAs 1.5 .. 4.0 in steps of
/// 0.1, shifted by 2.95, each group a discretized normal, group weights
/// 17921 : 3485.
PopulationState gpa_like_population();

}  // namespace fairgate::demo
