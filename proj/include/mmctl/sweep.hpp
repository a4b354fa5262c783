#pragma once

#include "mmctl/csv.hpp"
#include "mmctl/sim.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace mmctl {

struct SweepPoint {
    double wheel_in{0.0};
    double arm_in{0.0};
    bool ok{false};
    std::string error;
    ErrorSummary summary;
};

struct SweepResult {
    std::vector<SweepPoint> ranked;  ///< successes first, by mean tip error
};

/// Inclusive numeric grid like the published tuning ranges.
inline std::vector<double> grid_range(double from, double to, double step) {
    std::vector<double> out;
    if (!(step > 0.0)) throw ConfigError("sweep: step must be positive");
    const int n = static_cast<int>(std::round((to - from) / step));
    for (int i = 0; i <= n; ++i) out.push_back(from + i * step);
    return out;
}

/// Runs the base configuration at every (wheel IN, arm IN) grid point and
/// ranks the points by mean tip error over the second half of the run, where
/// the startup transient no longer masks the disturbance response. Grid
/// points execute on independent plant/controller instances and may run
/// concurrently; failures are recorded per point and do not stop the sweep.
inline SweepResult sweep(const SimConfig& base, const std::vector<double>& wheel_in,
                         const std::vector<double>& arm_in,
                         unsigned max_threads = 0) {
    if (wheel_in.empty() || arm_in.empty())
        throw ConfigError("sweep: grid must be nonempty");
    if (max_threads == 0)
        max_threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<SweepPoint> points;
    points.reserve(wheel_in.size() * arm_in.size());
    for (double w : wheel_in)
        for (double a : arm_in) points.push_back({w, a});

    auto eval = [&base](SweepPoint pt) {
        SimConfig cfg = base;
        cfg.controller.inner.in = Vec4(pt.wheel_in, pt.wheel_in, pt.arm_in, pt.arm_in);
        cfg.controller.inner.in_p = cfg.controller.inner.in;
        try {
            pt.summary = summarize(run(cfg), cfg.duration / 2.0);
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        return pt;
    };

    for (std::size_t begin = 0; begin < points.size(); begin += max_threads) {
        const std::size_t end = std::min(points.size(), begin + max_threads);
        std::vector<std::future<SweepPoint>> batch;
        for (std::size_t i = begin; i < end; ++i)
            batch.push_back(std::async(std::launch::async, eval, points[i]));
        for (std::size_t i = begin; i < end; ++i)
            points[i] = batch[i - begin].get();
    }

    std::stable_sort(points.begin(), points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) {
                         if (a.ok != b.ok) return a.ok;
                         return a.summary.tip_mean < b.summary.tip_mean;
                     });
    return {std::move(points)};
}

/// Ranked sweep table as CSV.
inline void write_csv(const SweepResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "rank,wheel_in,arm_in,status,tip_mean,tip_peak,tip_rms,body_mean\n";
    int rank = 1;
    for (const auto& pt : res.ranked) {
        out << rank++ << "," << detail::fmt(pt.wheel_in) << ","
            << detail::fmt(pt.arm_in) << ",";
        if (pt.ok) {
            out << "ok," << detail::fmt(pt.summary.tip_mean) << ","
                << detail::fmt(pt.summary.tip_peak) << ","
                << detail::fmt(pt.summary.tip_rms) << ","
                << detail::fmt(pt.summary.body_mean);
        } else {
            std::string msg = pt.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            out << "failed: " << msg << ",,,,";
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mmctl
