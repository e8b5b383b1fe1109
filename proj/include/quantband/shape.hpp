#ifndef QUANTBAND_SHAPE_HPP
#define QUANTBAND_SHAPE_HPP

#include <optional>
#include <vector>

#include "quantband/core.hpp"

namespace quantband {

// Pointwise clip into [0,1].
std::vector<double> clip_unit(std::vector<double> f);

// Increasing rearrangement: sorts the values in place on the grid.
// Requires values already in [0,1].
MonotoneStepFn rearrange(const Grid& grid, std::vector<double> values);

// Least-squares projection onto nondecreasing vectors (pool adjacent
// violators).  Requires values already in [0,1].
MonotoneStepFn isotonize(const Grid& grid, std::vector<double> values);

// How raw curves are turned into members of the monotone class:
// clip to [0,1], then mix rearrangement with isotonization.  The default
// weight 0 is pure rearrangement.
struct ShapeConfig {
  double isotonization_weight = 0.0;  // in [0,1]
};

MonotoneStepFn shape(const Grid& grid, std::vector<double> raw,
                     const ShapeConfig& cfg = {});

// Alternative to rearranging band edges: clip both edges, replace the
// upper edge by its greatest nondecreasing minorant and the lower edge by
// its smallest nondecreasing majorant.  The result can be empty (lower
// above upper somewhere), which is a reportable outcome, not an error.
struct IntersectResult {
  bool empty;
  std::optional<DFBand> band;  // set iff !empty
};

IntersectResult intersect_monotone(const Grid& grid,
                                   std::vector<double> lower_raw,
                                   std::vector<double> upper_raw,
                                   double level);

}  // namespace quantband

#endif  // QUANTBAND_SHAPE_HPP
