#include "vti/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vti/errors.hpp"

namespace vti {

namespace {

double interpolate(const std::vector<double>& t, const std::vector<double>& y,
                   double at) {
    auto it = std::upper_bound(t.begin(), t.end(), at);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    std::size_t i = std::size_t(it - t.begin());
    double w = (at - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

double median_dt(const std::vector<double>& t) {
    if (t.size() < 2) return 0.0;
    std::vector<double> dts;
    for (std::size_t i = 1; i < t.size(); ++i) dts.push_back(t[i] - t[i - 1]);
    std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
    return dts[dts.size() / 2];
}

}  // namespace

std::vector<Peak> detect_peaks(const std::vector<double>& t, const std::vector<double>& s,
                               const std::vector<double>& f, double threshold,
                               double min_separation) {
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (f[i] <= threshold) continue;
        if (!(f[i] > f[i - 1] && f[i] > f[i + 1])) continue;  // strict local maximum
        if (!peaks.empty() && t[i] - peaks.back().t < min_separation) {
            if (f[i] > peaks.back().value)
                peaks.back() = {t[i], s.empty() ? 0.0 : s[i], f[i]};
            continue;
        }
        peaks.push_back({t[i], s.empty() ? 0.0 : s[i], f[i]});
    }
    return peaks;
}

ComparisonMetrics compare_traces(const Trace& trace, const Trace& reference,
                                 const CompareOptions& options) {
    if (trace.size() < 2 || reference.size() < 2)
        throw ParseError("traces too short to compare");

    double start = std::max(trace.t.front(), reference.t.front());
    double end = std::min(trace.t.back(), reference.t.back());
    if (end <= start) throw ParseError("traces have disjoint time windows");
    start += options.skip_fraction * (end - start);

    // resample onto the coarser grid
    const Trace& coarse = median_dt(trace.t) >= median_dt(reference.t) ? trace : reference;
    std::vector<double> grid;
    for (double tv : coarse.t)
        if (tv >= start && tv <= end) grid.push_back(tv);
    if (grid.size() < 2) throw ParseError("common time window too small");

    auto u = trace.column("u_under_wheel");
    auto u_ref = reference.column("u_under_wheel");
    auto f = trace.column("F_contact");
    auto f_ref = reference.column("F_contact");
    auto s = trace.column("s_wheel");
    auto s_ref = reference.column("s_wheel");

    ComparisonMetrics m;
    m.window_start = start;
    m.window_end = end;

    std::vector<double> gu, gu_ref, gf, gf_ref, gs, gs_ref;
    for (double tv : grid) {
        gu.push_back(interpolate(trace.t, u, tv));
        gu_ref.push_back(interpolate(reference.t, u_ref, tv));
        gf.push_back(interpolate(trace.t, f, tv));
        gf_ref.push_back(interpolate(reference.t, f_ref, tv));
        gs.push_back(interpolate(trace.t, s, tv));
        gs_ref.push_back(interpolate(reference.t, s_ref, tv));
    }

    // deviation normalized by the reference peak magnitude over the window,
    // which keeps the metric finite at zero crossings
    double max_abs_ref = 0.0;
    for (double v : gu_ref) max_abs_ref = std::max(max_abs_ref, std::abs(v));
    double max_dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        max_dev = std::max(max_dev, std::abs(gu[i] - gu_ref[i]));
    m.max_rel_disp_dev = max_abs_ref > 0.0 ? max_dev / max_abs_ref
                                           : (max_dev > 0.0 ? INFINITY : 0.0);

    m.max_force = *std::max_element(gf.begin(), gf.end());
    m.max_force_ref = *std::max_element(gf_ref.begin(), gf_ref.end());

    double mean_ref = 0.0;
    for (double v : gf_ref) mean_ref += v;
    mean_ref /= double(gf_ref.size());
    double threshold = options.peaks.threshold.value_or(1.2 * mean_ref);
    m.peaks = detect_peaks(grid, gs, gf, threshold, options.peaks.min_separation);
    m.peaks_ref = detect_peaks(grid, gs_ref, gf_ref, threshold, options.peaks.min_separation);

    auto wall = [](const Trace& tr) {
        auto it = tr.metadata.find("wall_time_s");
        return it == tr.metadata.end() ? 0.0 : std::stod(it->second);
    };
    double w = wall(trace), w_ref = wall(reference);
    if (w > 0.0 && w_ref > 0.0) m.cpu_ratio = w_ref / w;

    auto it = trace.metadata.find("dt");
    if (it != trace.metadata.end()) m.dt_used = std::stod(it->second);
    return m;
}

}  // namespace vti
