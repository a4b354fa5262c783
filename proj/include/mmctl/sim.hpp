#pragma once

#include "mmctl/controllers.hpp"
#include "mmctl/disturbances.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mmctl {

/// Reference source for a run: the circular task, or tabulated waypoints.
struct TrajectorySource {
    CircularTaskSpec circular;
    std::optional<WaypointTrajectory> waypoints;

    TaskReference at(double t) const {
        return waypoints ? waypoints->at(t) : reference_at(circular, t);
    }
};

/// Everything a closed-loop run needs. control_dt must be an integer
/// multiple of the plant step dt.
struct SimConfig {
    RobotParams robot;
    ControllerConfig controller;
    DisturbanceSchedule disturbance;
    TrajectorySource trajectory;
    double dt{1e-3};
    double control_dt{1e-3};
    double duration{60.0};
    unsigned long long seed{1};
    std::string out_path;

    void validate() const {
        robot.validate();
        controller.validate();
        disturbance.validate();
        if (!waypoints()) trajectory.circular.validate();
        if (!(dt > 0.0)) throw ConfigError("sim: dt must be positive");
        if (dt > control_dt + 1e-15)
            throw ConfigError("sim: dt must not exceed control_dt");
        const double ratio = control_dt / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw ConfigError("sim: control_dt must be an integer multiple of dt");
        if (!(duration > 0.0)) throw ConfigError("sim: duration must be positive");
        if (duration < control_dt)
            throw ConfigError("sim: duration shorter than one control step");
        const double traj_end = waypoints() ? trajectory.waypoints->duration()
                                            : trajectory.circular.duration;
        if (traj_end + 1e-9 < duration)
            throw ConfigError("sim: trajectory ends before the run duration");
    }

    bool waypoints() const { return trajectory.waypoints.has_value(); }
};

/// Per-tick log of a closed-loop run, on a uniform control-rate grid.
struct RunResult {
    std::vector<double> t;
    std::vector<TaskVector> reference;
    std::vector<TaskVector> actual;
    std::vector<ActuatorVector> tau;
    std::vector<ActuatorVector> tau_d;
    std::vector<ActuatorVector> q_hat;
    std::vector<Vec4> integral;

    std::size_t rows() const { return t.size(); }

    double tip_error(std::size_t i) const {
        return std::hypot(actual[i].x_e - reference[i].x_e,
                          actual[i].y_e - reference[i].y_e);
    }
    double body_error(std::size_t i) const {
        return std::hypot(actual[i].x_f - reference[i].x_f,
                          actual[i].y_f - reference[i].y_f);
    }
};

/// Track-error statistics: per task coordinate and for the Euclidean tip and
/// body errors.
struct ErrorSummary {
    Vec5 mean_abs = Vec5::Zero();
    Vec5 peak = Vec5::Zero();
    Vec5 rms = Vec5::Zero();
    double tip_mean{0.0}, tip_peak{0.0}, tip_rms{0.0};
    double body_mean{0.0}, body_peak{0.0}, body_rms{0.0};
};

namespace detail {

/// Two-link inverse kinematics in the platform frame, elbow bent upward.
inline ArmConfig arm_ik(const RobotParams& p, const Vec2& tip_local) {
    const double r2 = tip_local.squaredNorm();
    const double reach = p.l1 + p.l2;
    if (r2 > reach * reach || r2 < (p.l1 - p.l2) * (p.l1 - p.l2))
        throw ConfigError("initial tip position is outside the arm workspace");
    double cos_t2 = (r2 - p.l1 * p.l1 - p.l2 * p.l2) / (2.0 * p.l1 * p.l2);
    cos_t2 = std::clamp(cos_t2, -1.0, 1.0);
    const double t2 = std::acos(cos_t2);
    const double t1 = std::atan2(tip_local.y(), tip_local.x()) -
                      std::atan2(p.l2 * std::sin(t2), p.l1 + p.l2 * cos_t2);
    return {t1, t2};
}

inline GeneralizedState initial_state(const SimConfig& cfg) {
    GeneralizedState s;
    const TaskReference r0 = cfg.trajectory.at(0.0);
    s.pose = {r0.pos.x_f, r0.pos.y_f, r0.pos.phi};

    Vec2 tip0(r0.pos.x_e, r0.pos.y_e);
    if (!cfg.waypoints()) {
        tip0 = cfg.trajectory.circular.initial_tip;
        s.pose = {cfg.trajectory.circular.start_f.x(),
                  cfg.trajectory.circular.start_f.y(),
                  cfg.trajectory.circular.initial_heading};
    }
    const Vec2 tip_local = rotation_matrix(s.pose.phi).transpose() *
                           (tip0 - Vec2(s.pose.x_f, s.pose.y_f));
    s.arm = arm_ik(cfg.robot, tip_local);

    // Wheels start at the rates implied by the reference platform velocity;
    // the arm starts at rest.
    const Vec2 f_vel_body = rotation_matrix(s.pose.phi).transpose() *
                            Vec2(r0.vel[0], r0.vel[1]);
    const Vec2 wheel_rates =
        wheel_to_f_velocity_block(cfg.robot).inverse() *
        Vec2(f_vel_body.x(), cfg.robot.d * r0.vel[2]);
    s.nu = {wheel_rates.x(), wheel_rates.y(), 0.0, 0.0};
    return s;
}

}  // namespace detail

/// Runs the closed loop: at every control tick the reference is read, the
/// outer RAC law and the actuator resolution produce reference
/// accelerations, the selected inner loop produces motor torques, and the
/// plant is stepped with the scheduled disturbance torques. Fully
/// deterministic for a given (config, seed).
inline RunResult run(const SimConfig& cfg) {
    cfg.validate();
    const int substeps = static_cast<int>(std::round(cfg.control_dt / cfg.dt));
    const std::size_t ticks =
        static_cast<std::size_t>(std::round(cfg.duration / cfg.control_dt));

    GeneralizedState plant = detail::initial_state(cfg);
    ControllerState ctrl;
    std::mt19937_64 rng(cfg.seed);
    ActuatorVector prev_nu = plant.nu;

    RunResult log;
    log.t.reserve(ticks + 1);

    for (std::size_t k = 0; k <= ticks; ++k) {
        const double t = static_cast<double>(k) * cfg.control_dt;
        try {
            const TaskReference ref = cfg.trajectory.at(std::min(t, cfg.duration));
            const ActuatorVector acc_meas = measure_acceleration(
                cfg.controller.measurement, prev_nu, plant.nu, cfg.control_dt, rng);
            const TickResult tick = control_tick(cfg.controller, ctrl, cfg.robot,
                                                 plant, acc_meas, ref,
                                                 cfg.control_dt, rng);

            log.t.push_back(t);
            log.reference.push_back(ref.pos);
            log.actual.push_back(observe_task(cfg.robot, plant));
            log.tau.push_back(tick.tau);
            log.tau_d.push_back(sample(cfg.disturbance, t));
            log.q_hat.push_back(tick.q_hat);
            log.integral.push_back(ctrl.integral_acc);

            if (k == ticks) break;
            prev_nu = plant.nu;
            for (int j = 0; j < substeps; ++j) {
                const double ts = t + j * cfg.dt;
                plant = step(cfg.robot, plant,
                             {tick.tau, sample(cfg.disturbance, ts)}, cfg.dt);
            }
        } catch (const NearSingular& e) {
            throw NearSingular(std::string(e.what()) + " (tick " +
                               std::to_string(k) + ", t = " + std::to_string(t) + " s)");
        } catch (const NumericalBlowup& e) {
            throw NumericalBlowup(std::string(e.what()) + " (tick " +
                                  std::to_string(k) + ", t = " +
                                  std::to_string(t) + " s)");
        }
    }
    return log;
}

/// Error metrics over a window of the run (full run by default).
inline ErrorSummary summarize(const RunResult& res, double t_from = 0.0,
                              double t_to = -1.0) {
    if (res.rows() == 0) throw ConfigError("summarize: empty result");
    if (t_to < 0.0) t_to = res.t.back();

    ErrorSummary s;
    std::size_t n = 0;
    for (std::size_t i = 0; i < res.rows(); ++i) {
        if (res.t[i] < t_from || res.t[i] > t_to) continue;
        ++n;
        const Vec5 e = res.actual[i].vec() - res.reference[i].vec();
        s.mean_abs += e.cwiseAbs();
        s.peak = s.peak.cwiseMax(e.cwiseAbs());
        s.rms += e.cwiseProduct(e);
        const double te = res.tip_error(i), be = res.body_error(i);
        s.tip_mean += te;
        s.tip_peak = std::max(s.tip_peak, te);
        s.tip_rms += te * te;
        s.body_mean += be;
        s.body_peak = std::max(s.body_peak, be);
        s.body_rms += be * be;
    }
    if (n == 0) throw ConfigError("summarize: window contains no samples");
    const double inv = 1.0 / static_cast<double>(n);
    s.mean_abs *= inv;
    s.rms = (s.rms * inv).cwiseSqrt();
    s.tip_mean *= inv;
    s.tip_rms = std::sqrt(s.tip_rms * inv);
    s.body_mean *= inv;
    s.body_rms = std::sqrt(s.body_rms * inv);
    return s;
}

struct ModeComparison {
    ErrorSummary rac, rac_afc, rac_piafc;           ///< full run
    ErrorSummary rac_ss, rac_afc_ss, rac_piafc_ss;  ///< second half of the run
};

/// Runs the same configuration in all three control modes. The steady-state
/// summaries cover the second half of the run, after the startup transient.
inline ModeComparison compare_modes(SimConfig cfg) {
    ModeComparison out;
    auto eval = [&cfg](ControlMode mode, ErrorSummary& full, ErrorSummary& ss) {
        cfg.controller.mode = mode;
        const RunResult res = run(cfg);
        full = summarize(res);
        ss = summarize(res, cfg.duration / 2.0);
    };
    eval(ControlMode::Rac, out.rac, out.rac_ss);
    eval(ControlMode::RacAfc, out.rac_afc, out.rac_afc_ss);
    eval(ControlMode::RacPiafc, out.rac_piafc, out.rac_piafc_ss);
    return out;
}

}  // namespace mmctl
