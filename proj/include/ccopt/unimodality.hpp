#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ccopt {

enum class UnimodalityVerdict { unimodal, not_unimodal, inconclusive };

inline const char* to_string(UnimodalityVerdict v) {
    switch (v) {
    case UnimodalityVerdict::unimodal: return "unimodal";
    case UnimodalityVerdict::not_unimodal: return "not_unimodal";
    case UnimodalityVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Shape test on the empirical CDF: bin at ceil(sqrt(n)) resolution, read the
/// CDF on a coarse grid (per-bin second differences at sqrt(n) resolution sit
/// below any workable threshold), and count robust sign changes of its second
/// differences. A single convex-to-concave change is the unimodal signature.
inline UnimodalityVerdict empirical_unimodality_check(const std::vector<double>& samples,
                                                      double tolerance = 0.0,
                                                      int coarse_cells = 32) {
    const std::size_t n = samples.size();
    if (n < 10000)
        throw std::invalid_argument("empirical_unimodality_check: need at least 10^4 samples");
    if (tolerance <= 0.0)
        tolerance = 3.0 / std::sqrt(static_cast<double>(n));

    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo <= 0.0)
        return UnimodalityVerdict::unimodal; // point mass

    const int n_bins = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
    const double width = (hi - lo) / n_bins;
    for (double x : samples) {
        int b = static_cast<int>((x - lo) / width);
        b = std::clamp(b, 0, n_bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }

    // Coarse CDF at coarse_cells+1 grid points.
    const int cells = std::min(coarse_cells, n_bins);
    std::vector<double> cdf(static_cast<std::size_t>(cells) + 1, 0.0);
    std::size_t running = 0;
    int next_edge = 1;
    for (int b = 0; b < n_bins; ++b) {
        running += counts[static_cast<std::size_t>(b)];
        while (next_edge <= cells && b + 1 >= (next_edge * n_bins) / cells) {
            cdf[static_cast<std::size_t>(next_edge)] = static_cast<double>(running) / static_cast<double>(n);
            ++next_edge;
        }
    }

    // Signs of second differences above tolerance, consecutive duplicates
    // collapsed.
    std::vector<int> signs;
    for (int i = 1; i < cells; ++i) {
        const double d2 = cdf[static_cast<std::size_t>(i) + 1] - 2.0 * cdf[static_cast<std::size_t>(i)] +
                          cdf[static_cast<std::size_t>(i) - 1];
        if (std::abs(d2) <= tolerance)
            continue;
        const int s = d2 > 0.0 ? 1 : -1;
        if (signs.empty() || signs.back() != s)
            signs.push_back(s);
    }

    if (signs.size() == 2 && signs[0] == 1 && signs[1] == -1)
        return UnimodalityVerdict::unimodal;   // convex then concave
    if (signs.size() >= 3)
        return UnimodalityVerdict::not_unimodal;
    return UnimodalityVerdict::inconclusive;
}

} // namespace ccopt
