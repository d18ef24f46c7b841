#pragma once

#include <vector>

#include "memsx/potential.hpp"

namespace memsx {

enum class ThinPlateScaling { O1, Od };

struct LimitRow {
  double parameter = 0.0;  // delta or eps
  double e_full = 0.0;
  double e_limit = 0.0;
  double gap = 0.0;    // |e_full - e_limit|
  double order = 0.0;  // successive empirical order (0 for the first row)
  int n_x = 0, n_z1 = 0, n_z2 = 0;
};

struct LimitTable {
  std::vector<LimitRow> rows;
};

// Thin-plate limit study: transmission energies along a decreasing delta
// sequence against the membrane (O1) or Robin (Od) limit energy. Under the
// Od scaling the layer permittivity is delta * sigma_*. Vertical layer
// resolution is fixed per row (the mapping absorbs delta), and per-row grid
// sizes are recorded in the table.
LimitTable thin_plate_study(const DeflectionField& u, const PermittivityProfile& profile,
                            ThinPlateScaling scaling, const std::vector<double>& delta_sequence,
                            const ModelParams& params, const Grid& grid, int jobs = 1);

// Vanishing-aspect-ratio study: full-model energies along a decreasing eps
// sequence against the reduced energy -1/2 int dx/(1+u+N). When
// `richardson` is set each full energy is extrapolated from the given grid
// and its refinement to cancel the h^2 bias that would otherwise floor the
// small-eps gaps.
LimitTable aspect_ratio_study(const DeflectionField& u, const PermittivityProfile& profile,
                              PotentialModel model, const std::vector<double>& eps_sequence,
                              const ModelParams& params, const Grid& grid,
                              bool richardson = true, int jobs = 1);

}  // namespace memsx
