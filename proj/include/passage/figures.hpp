#pragma once

#include "passage/csv.hpp"
#include "passage/numerics.hpp"

namespace passage {

// Datasets behind the four reference plots, for a = 1, x = 0:
//   1: b, defect, gamma           over b = -3.0, -2.9, ..., 0.0
//   2: t, waiting-time density    for b = 0, -0.5, -1      (t in [0.02, 3])
//   3: t, second-passage density  for b = -2, -1, -0.5, 0  (t in [0.02, 3])
//   4: t, second-passage density against the first-passage density, b = 0
Table figure_data(int figure, const QuadSpec& spec = {});

}  // namespace passage
