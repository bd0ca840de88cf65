#include "wdipln/spectrum.hpp"

#include <algorithm>
#include <stdexcept>

namespace wdipln {

std::vector<int> find_dips(const std::vector<double>& transmission_db,
                           double min_prominence_db) {
    if (min_prominence_db <= 0.0)
        throw std::invalid_argument("find_dips: prominence must be positive");
    const int n = static_cast<int>(transmission_db.size());
    std::vector<int> dips;
    if (n < 3) return dips;
    // Work on the inverted trace so dips become peaks.
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = -transmission_db[i];

    for (int i = 1; i + 1 < n; ++i) {
        if (!(x[i] > x[i - 1])) continue;
        // Plateau handling: require a strict rise on the left and a strict
        // fall after any flat run on the right.
        int j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n || !(x[j + 1] < x[i])) continue;

        // Left base: lowest level between the peak and the nearest higher
        // point (or the edge).
        double left_min = x[i];
        for (int k = i - 1; k >= 0; --k) {
            if (x[k] > x[i]) break;
            left_min = std::min(left_min, x[k]);
        }
        double right_min = x[i];
        for (int k = j + 1; k < n; ++k) {
            if (x[k] > x[i]) break;
            right_min = std::min(right_min, x[k]);
        }
        const double prominence = x[i] - std::max(left_min, right_min);
        if (prominence >= min_prominence_db) dips.push_back(i);
        i = j;  // skip the plateau
    }
    return dips;
}

}  // namespace wdipln
