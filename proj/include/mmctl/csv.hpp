#pragma once

#include "mmctl/sim.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmctl {

namespace detail {

/// Floats rendered with 9 significant digits, locale-independent.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kRunCsvHeader =
    "t,ref_x_f,ref_y_f,ref_phi,ref_x_e,ref_y_e,"
    "act_x_f,act_y_f,act_phi,act_x_e,act_y_e,"
    "tau_wheel_l,tau_wheel_r,tau_joint1,tau_joint2,"
    "tau_d_wheel_l,tau_d_wheel_r,tau_d_joint1,tau_d_joint2,"
    "q_hat_wheel_l,q_hat_wheel_r,q_hat_joint1,q_hat_joint2,"
    "integral_wheel_l,integral_wheel_r,integral_joint1,integral_joint2,"
    "tip_error,body_error";

/// One row per control tick, with the documented fixed column order.
inline void write_csv(const RunResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << kRunCsvHeader << "\n";
    for (std::size_t i = 0; i < res.rows(); ++i) {
        std::ostringstream row;
        auto put = [&row](double v) { row << "," << detail::fmt(v); };
        row << detail::fmt(res.t[i]);
        for (double v : {res.reference[i].x_f, res.reference[i].y_f,
                         res.reference[i].phi, res.reference[i].x_e,
                         res.reference[i].y_e})
            put(v);
        for (double v : {res.actual[i].x_f, res.actual[i].y_f, res.actual[i].phi,
                         res.actual[i].x_e, res.actual[i].y_e})
            put(v);
        for (const auto* a : {&res.tau[i], &res.tau_d[i], &res.q_hat[i]})
            for (double v : {a->wheel_l, a->wheel_r, a->joint1, a->joint2}) put(v);
        for (int c = 0; c < 4; ++c) put(res.integral[i][c]);
        put(res.tip_error(i));
        put(res.body_error(i));
        out << row.str() << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Summary metrics as key,value rows.
inline void write_csv(const ErrorSummary& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "metric,value\n";
    const char* coord[5] = {"x_f", "y_f", "phi", "x_e", "y_e"};
    for (int i = 0; i < 5; ++i) {
        out << "mean_abs_" << coord[i] << "," << detail::fmt(s.mean_abs[i]) << "\n";
        out << "peak_" << coord[i] << "," << detail::fmt(s.peak[i]) << "\n";
        out << "rms_" << coord[i] << "," << detail::fmt(s.rms[i]) << "\n";
    }
    out << "tip_mean," << detail::fmt(s.tip_mean) << "\n";
    out << "tip_peak," << detail::fmt(s.tip_peak) << "\n";
    out << "tip_rms," << detail::fmt(s.tip_rms) << "\n";
    out << "body_mean," << detail::fmt(s.body_mean) << "\n";
    out << "body_peak," << detail::fmt(s.body_peak) << "\n";
    out << "body_rms," << detail::fmt(s.body_rms) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

/// Reads back a run CSV (used by the round-trip checks and external tooling).
inline RunResult read_run_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    if (line != kRunCsvHeader) throw IoError("unexpected csv header in " + path);

    RunResult res;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::array<double, 29> v{};
        std::string cell;
        for (auto& slot : v) {
            if (!std::getline(ss, cell, ',')) throw IoError("short csv row in " + path);
            slot = std::stod(cell);
        }
        res.t.push_back(v[0]);
        res.reference.push_back({v[1], v[2], v[3], v[4], v[5]});
        res.actual.push_back({v[6], v[7], v[8], v[9], v[10]});
        res.tau.push_back({v[11], v[12], v[13], v[14]});
        res.tau_d.push_back({v[15], v[16], v[17], v[18]});
        res.q_hat.push_back({v[19], v[20], v[21], v[22]});
        res.integral.push_back(Vec4(v[23], v[24], v[25], v[26]));
    }
    return res;
}

}  // namespace mmctl
