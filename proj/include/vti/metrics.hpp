#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vti/trace.hpp"

namespace vti {

struct Peak {
    double t;
    double s;
    double value;  // [N]
};

struct PeakOptions {
    // Threshold for local maxima; if unset, 1.2x the mean reference force
    // over the common window (a proxy for 1.2x the static axle load).
    std::optional<double> threshold;
    double min_separation = 5e-3;  // [s]
};

struct ComparisonMetrics {
    double max_rel_disp_dev = 0.0;  // max|u - u_ref| / max|u_ref| over the window
    double max_force = 0.0;
    double max_force_ref = 0.0;
    std::vector<Peak> peaks;
    std::vector<Peak> peaks_ref;
    double cpu_ratio = 1.0;         // wall(reference) / wall(candidate)
    double dt_used = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
};

struct CompareOptions {
    PeakOptions peaks;
    // Fraction of the common window dropped from the front before computing
    // deviations (settling transient).
    double skip_fraction = 0.0;
};

// Resample both traces onto the coarser common time grid (linear
// interpolation) and compute the deviation/peak metrics. cpu_ratio comes from
// the traces' wall_time_s metadata when present.
ComparisonMetrics compare_traces(const Trace& trace, const Trace& reference,
                                 const CompareOptions& options = {});

std::vector<Peak> detect_peaks(const std::vector<double>& t,
                               const std::vector<double>& s,
                               const std::vector<double>& f,
                               double threshold, double min_separation);

}  // namespace vti
