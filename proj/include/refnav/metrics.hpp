#pragma once

#include <cstddef>
#include <stdexcept>

namespace refnav {

// Worst-case number of reads before a target must have been found.
inline std::size_t ctn(std::size_t n_candidates, std::size_t n_targets) {
    if (n_targets == 0 || n_targets > n_candidates)
        throw std::invalid_argument("ctn: need 0 < n_targets <= n_candidates");
    return 1 + (n_candidates - n_targets);
}

// Difficulty-weighted reading cost; lower is better. Accepts fractional
// reads so medians over even episode counts stay representable.
inline double evaluation_index(double hof, double reads, std::size_t ctn_value) {
    if (hof < 0.0 || hof >= 1.0)
        throw std::invalid_argument("evaluation_index: hof must be in [0,1)");
    if (reads < 1.0 || reads > static_cast<double>(ctn_value))
        throw std::invalid_argument("evaluation_index: reads must be in [1, ctn]");
    return hof * reads / static_cast<double>(ctn_value);
}

}  // namespace refnav
