#pragma once

#include <vector>

namespace wdipln {

/// Indices of local minima of `transmission_db` whose prominence (depth below
/// the surrounding baseline, in dB) is at least `min_prominence_db`.
/// Prominence of a dip is measured against the lower of the two highest
/// levels reachable before meeting a deeper dip (or the trace edge) on each
/// side — the standard topographic definition, applied to inverted data.
std::vector<int> find_dips(const std::vector<double>& transmission_db,
                           double min_prominence_db = 1.0);

}  // namespace wdipln
