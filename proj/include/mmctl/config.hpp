#pragma once

#include "mmctl/sim.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace mmctl {

/// Flat key-value store for the dotted-key config format:
///   # comment
///   robot.r = 0.08
/// Later assignments win; unknown keys are rejected by the loader.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str(), path);
    }

    static KeyValueConfig from_string(const std::string& text,
                                      const std::string& origin = "<string>") {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) {
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not a number: '" +
                              it->second + "'");
        }
    }

    unsigned long long get_uint(const std::string& key,
                                unsigned long long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not an integer: '" +
                              it->second + "'");
        }
    }

    const std::map<std::string, std::string>& items() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

namespace detail {

inline Channel parse_channel(const std::string& s) {
    if (s == "wheel_l") return Channel::WheelL;
    if (s == "wheel_r") return Channel::WheelR;
    if (s == "joint1") return Channel::Joint1;
    if (s == "joint2") return Channel::Joint2;
    throw ConfigError("unknown channel: '" + s + "'");
}

inline ControlMode parse_mode(const std::string& s) {
    if (s == "rac") return ControlMode::Rac;
    if (s == "rac_afc") return ControlMode::RacAfc;
    if (s == "rac_piafc") return ControlMode::RacPiafc;
    throw ConfigError("unknown controller mode: '" + s + "' "
                      "(expected rac | rac_afc | rac_piafc)");
}

inline Vec4 load_channel_vec(const KeyValueConfig& kv, const std::string& prefix,
                             const Vec4& fallback) {
    Vec4 v = fallback;
    v[0] = kv.get_double(prefix + ".wheel_l", v[0]);
    v[1] = kv.get_double(prefix + ".wheel_r", v[1]);
    v[2] = kv.get_double(prefix + ".joint1", v[2]);
    v[3] = kv.get_double(prefix + ".joint2", v[3]);
    return v;
}

inline WaypointTrajectory load_waypoints(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open waypoints file: " + path);
    std::vector<double> times;
    std::vector<Vec5> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string cell;
        std::array<double, 6> v{};
        for (auto& slot : v) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError("waypoints: expected 6 columns t,xF,yF,phi,xE,yE");
            slot = std::stod(cell);
        }
        times.push_back(v[0]);
        Vec5 p;
        p << v[1], v[2], v[3], v[4], v[5];
        rows.push_back(p);
    }
    return WaypointTrajectory(std::move(times), std::move(rows));
}

}  // namespace detail

/// Builds a SimConfig from a key-value store, starting from the built-in
/// defaults (the published task, gains and disturbance profiles).
inline SimConfig load_sim_config(const KeyValueConfig& kv) {
    SimConfig cfg;

    RobotParams& rp = cfg.robot;
    rp.b = kv.get_double("robot.b", rp.b);
    rp.r = kv.get_double("robot.r", rp.r);
    rp.d = kv.get_double("robot.d", rp.d);
    rp.m0 = kv.get_double("robot.m0", rp.m0);
    rp.i0 = kv.get_double("robot.i0", rp.i0);
    rp.l1 = kv.get_double("robot.l1", rp.l1);
    rp.l11 = kv.get_double("robot.l11", rp.l11);
    rp.l2 = kv.get_double("robot.l2", rp.l2);
    rp.l22 = kv.get_double("robot.l22", rp.l22);
    rp.m1 = kv.get_double("robot.m1", rp.m1);
    rp.m2 = kv.get_double("robot.m2", rp.m2);
    rp.i1 = kv.get_double("robot.i1", rp.i1);
    rp.i2 = kv.get_double("robot.i2", rp.i2);
    rp.wheel_rotor_inertia =
        kv.get_double("robot.wheel_rotor_inertia", rp.wheel_rotor_inertia);
    rp.joint_rotor_inertia =
        kv.get_double("robot.joint_rotor_inertia", rp.joint_rotor_inertia);

    cfg.dt = kv.get_double("sim.dt", cfg.dt);
    cfg.control_dt = kv.get_double("sim.control_dt", cfg.control_dt);
    cfg.duration = kv.get_double("sim.duration", cfg.duration);
    cfg.seed = kv.get_uint("sim.seed", cfg.seed);
    cfg.out_path = kv.get_string("sim.out", cfg.out_path);

    ControllerConfig& cc = cfg.controller;
    cc.mode = detail::parse_mode(kv.get_string("controller.mode", "rac_piafc"));
    cc.integral_clamp = kv.get_double("controller.integral_clamp", cc.integral_clamp);
    cc.eps_sing = kv.get_double("controller.eps_sing", cc.eps_sing);

    const char* task_coord[5] = {"x_f", "y_f", "phi", "x_e", "y_e"};
    for (int i = 0; i < 5; ++i) {
        cc.rac.kp[i] = kv.get_double(std::string("gains.kp.") + task_coord[i],
                                     cc.rac.kp[i]);
        cc.rac.kd[i] = kv.get_double(std::string("gains.kd.") + task_coord[i],
                                     cc.rac.kd[i]);
    }
    cc.inner.in = detail::load_channel_vec(kv, "gains.in", cc.inner.in);
    cc.inner.in_p = detail::load_channel_vec(kv, "gains.in_p", cc.inner.in_p);
    cc.inner.in_i = detail::load_channel_vec(kv, "gains.in_i", cc.inner.in_i);

    const std::string sensor = kv.get_string("measurement.sensor", "current");
    if (sensor == "current") cc.measurement.sensor_kind = SensorKind::CurrentSensor;
    else if (sensor == "torque") cc.measurement.sensor_kind = SensorKind::TorqueSensor;
    else throw ConfigError("measurement.sensor must be 'current' or 'torque'");
    cc.measurement.kt = Vec4::Constant(kv.get_double("measurement.kt", 0.5));
    cc.measurement.kt = detail::load_channel_vec(kv, "measurement.kt",
                                                 cc.measurement.kt);
    cc.measurement.accel_noise =
        Vec4::Constant(kv.get_double("measurement.accel_noise", 0.0));
    cc.measurement.torque_noise =
        Vec4::Constant(kv.get_double("measurement.torque_noise", 0.0));

    // Disturbance: a named preset, optionally with adjusted parameters, plus
    // any number of explicit vibration.N.* / impact.N.* components.
    PresetParams pp;
    pp.wheel_frequency = kv.get_double("disturbance.wheel_frequency", pp.wheel_frequency);
    pp.wheel_amplitude = kv.get_double("disturbance.wheel_amplitude", pp.wheel_amplitude);
    pp.wheel_phase_offset =
        kv.get_double("disturbance.wheel_phase_offset", pp.wheel_phase_offset);
    pp.joint_frequency = kv.get_double("disturbance.joint_frequency", pp.joint_frequency);
    pp.joint_amplitude = kv.get_double("disturbance.joint_amplitude", pp.joint_amplitude);
    pp.impact_magnitude = kv.get_double("disturbance.impact_magnitude", pp.impact_magnitude);
    pp.impact_duration = kv.get_double("disturbance.impact_duration", pp.impact_duration);
    pp.impact_first_start =
        kv.get_double("disturbance.impact_first_start", pp.impact_first_start);
    pp.impact_spacing = kv.get_double("disturbance.impact_spacing", pp.impact_spacing);

    const std::string preset = kv.get_string("disturbance.preset", "none");
    if (preset == "none") cfg.disturbance = {};
    else if (preset == "vibration")
        cfg.disturbance = expand_preset(DisturbancePreset::Vibration, pp);
    else if (preset == "impact")
        cfg.disturbance = expand_preset(DisturbancePreset::Impact, pp);
    else throw ConfigError("disturbance.preset must be none | vibration | impact");

    for (int i = 1; i <= 32; ++i) {
        const std::string vp = "vibration." + std::to_string(i);
        if (kv.has(vp + ".channel")) {
            VibrationSpec v;
            v.channel = detail::parse_channel(kv.get_string(vp + ".channel", ""));
            v.frequency = kv.get_double(vp + ".frequency", 1.0);
            v.amplitude = kv.get_double(vp + ".amplitude", 0.0);
            v.phase = kv.get_double(vp + ".phase", 0.0);
            cfg.disturbance.vibrations.push_back(v);
        }
        const std::string ip = "impact." + std::to_string(i);
        if (kv.has(ip + ".channel")) {
            ImpactSpec im;
            im.channel = detail::parse_channel(kv.get_string(ip + ".channel", ""));
            im.start = kv.get_double(ip + ".start", 0.0);
            im.duration = kv.get_double(ip + ".duration", 0.05);
            im.magnitude = kv.get_double(ip + ".magnitude", 0.0);
            cfg.disturbance.impacts.push_back(im);
        }
    }

    CircularTaskSpec task = benchmark_task();
    task.radius = kv.get_double("task.radius", task.radius);
    task.speed = kv.get_double("task.speed", task.speed);
    task.initial_heading = kv.get_double("task.initial_heading", task.initial_heading);
    task.arm_offset_curve.base = kv.get_double("task.offset_base",
                                               task.arm_offset_curve.base);
    task.arm_offset_curve.amplitude =
        kv.get_double("task.offset_amplitude", task.arm_offset_curve.amplitude);
    task.arm_offset_curve.period =
        kv.get_double("task.offset_period", task.arm_offset_curve.period);

    if (kv.has("task.curve_start_x") || kv.has("task.curve_start_y")) {
        const Vec2 curve_start(kv.get_double("task.curve_start_x", 10.41),
                               kv.get_double("task.curve_start_y", 0.35));
        const Vec2 outward(std::sin(task.initial_heading),
                           -std::cos(task.initial_heading));
        const double rho0 = task.arm_offset_curve.base + task.arm_offset_curve.amplitude;
        task.start_f = curve_start - rho0 * outward;
    } else {
        // Re-derive the platform start when the heading or offsets change, keeping
        // the arm-curve start point fixed.
        const Vec2 curve_start(10.41, 0.35);
        const Vec2 outward(std::sin(task.initial_heading),
                           -std::cos(task.initial_heading));
        const double rho0 = task.arm_offset_curve.base + task.arm_offset_curve.amplitude;
        task.start_f = curve_start - rho0 * outward;
    }
    task.start_f.x() = kv.get_double("task.start_f_x", task.start_f.x());
    task.start_f.y() = kv.get_double("task.start_f_y", task.start_f.y());
    task.initial_tip.x() = kv.get_double("task.initial_tip_x", task.initial_tip.x());
    task.initial_tip.y() = kv.get_double("task.initial_tip_y", task.initial_tip.y());
    task.duration = cfg.duration;
    cfg.trajectory.circular = task;

    const std::string wp_file = kv.get_string("task.waypoints", "");
    if (!wp_file.empty()) cfg.trajectory.waypoints = detail::load_waypoints(wp_file);

    cfg.validate();
    return cfg;
}

}  // namespace mmctl
