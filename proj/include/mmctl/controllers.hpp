#pragma once

#include "mmctl/dynamics.hpp"
#include "mmctl/trajectory.hpp"

#include <numbers>

namespace mmctl {

enum class ControlMode { Rac, RacAfc, RacPiafc };

/// Diagonal outer-loop gains in task order (xF, yF, phi, xE, yE).
/// Defaults are the published tuned values; the heading entries are tiny on
/// purpose, the position loops steer the heading through the wheel split.
struct RacGains {
    Vec5 kp = (Vec5() << 450.0, 450.0, 0.004, 325.0, 325.0).finished();
    Vec5 kd = (Vec5() << 320.0, 320.0, 0.001, 260.0, 260.0).finished();

    void validate() const {
        if ((kp.array() < 0.0).any() || (kd.array() < 0.0).any())
            throw ConfigError("RacGains entries must be nonnegative");
    }
};

/// Inner-loop diagonal gains, stored in actuator order
/// (wheelL, wheelR, joint1, joint2). The published diagonals are written in
/// (joint1, joint2, wheelL, wheelR) order; from_published() maps them.
struct InnerLoopGains {
    Vec4 in = Vec4(2.4, 2.4, 0.0925, 0.0925);      ///< AFC inertia estimate [kg m^2]
    Vec4 in_p = Vec4(2.4, 2.4, 0.125, 0.125);      ///< PIAFC proportional [kg m^2]
    Vec4 in_i = Vec4(0.01, 0.01, 0.03, 0.03);      ///< PIAFC integral [kg m^2 / s]

    /// Maps a diagonal written as {joint1, joint2, wheelL, wheelR} onto the
    /// actuator order used everywhere else.
    static Vec4 from_published(double j1, double j2, double wl, double wr) {
        return Vec4(wl, wr, j1, j2);
    }

    void validate() const {
        if ((in.array() < 0.0).any() || (in_p.array() < 0.0).any() ||
            (in_i.array() < 0.0).any())
            throw ConfigError("InnerLoopGains entries must be nonnegative");
    }
};

enum class SensorKind { TorqueSensor, CurrentSensor };

/// How the inner loop observes applied torque and acceleration. The torque
/// path is the previous tick's command through the sensor (directly, or as a
/// motor current scaled by Kt); both paths may carry Gaussian noise.
struct MeasurementModel {
    SensorKind sensor_kind{SensorKind::CurrentSensor};
    Vec4 kt = Vec4::Constant(0.5);        ///< motor torque constants [N m / A]
    Vec4 accel_noise = Vec4::Zero();      ///< accelerometer sigma per channel
    Vec4 torque_noise = Vec4::Zero();     ///< torque/current sigma (torque units)

    void validate() const {
        if (sensor_kind == SensorKind::CurrentSensor && (kt.array() <= 0.0).any())
            throw ConfigError("MeasurementModel: Kt must be positive");
        if ((accel_noise.array() < 0.0).any() || (torque_noise.array() < 0.0).any())
            throw ConfigError("MeasurementModel: noise sigmas must be nonnegative");
    }
};

/// Mutable inner-loop state: the accumulated acceleration-error integral and
/// the previous command as seen through the sensor.
struct ControllerState {
    Vec4 integral_acc = Vec4::Zero();  ///< [rad/s]
    ActuatorVector last_tau_measured;
};

/// Outer-loop law, per task coordinate:
///   acc_cmd = acc_ref + Kd (vel_ref - vel_act) + Kp (pos_ref - pos_act)
inline Vec5 rac_task_acceleration(const RacGains& gains, const TaskReference& ref,
                                  const TaskVector& actual, const Vec5& actual_vel) {
    return ref.acc.array() + gains.kd.array() * (ref.vel - actual_vel).array() +
           gains.kp.array() * (ref.pos.vec() - actual.vec()).array();
}

/// Maps the five commanded task accelerations onto the four actuators.
///
/// Wheels: the body-frame inverse of the F-acceleration map, with the
/// velocity feedthrough removed and the heading command superposed as a
/// differential split. Joints: the differentiated inverse of the arm chain,
/// fed the platform acceleration the wheel commands will actually deliver.
inline ActuatorVector resolve_to_actuators(const RobotParams& p,
                                           const GeneralizedState& s,
                                           const Vec5& task_acc,
                                           double eps = kDefaultSingularityEps) {
    const double phi = s.pose.phi;
    const double c = p.r / (2.0 * p.b);
    const double phi_dot = c * (s.nu.wheel_r - s.nu.wheel_l);
    const Mat2 rot = rotation_matrix(phi);
    const Mat2 rot_d = rotation_matrix(phi + std::numbers::pi / 2.0);
    const Mat2 k = wheel_to_f_velocity_block(p);
    if (p.d <= 0.0)
        throw SingularMap("platform velocity map is singular for d = 0");

    // Wheel accelerations: F(ddot) = R K w_ddot + phi_dot R' K w_rates.
    const Vec2 f_acc_cmd(task_acc[0], task_acc[1]);
    const Vec2 wheel_rates(s.nu.wheel_l, s.nu.wheel_r);
    const Vec2 feedthrough = phi_dot * (rot_d * (k * wheel_rates));
    Vec2 wheels = k.inverse() * (rot.transpose() * (f_acc_cmd - feedthrough));
    const double diff = p.b / p.r * (task_acc[2] / 2.0);
    wheels[0] -= diff;
    wheels[1] += diff;

    // Platform motion the tip resolution must anticipate.
    const double phi_ddot_del = c * (wheels[1] - wheels[0]);
    const Vec2 f_acc_del = rot * (k * wheels) + feedthrough;

    const Mat2 j = arm_jacobian(p, s.arm.theta1, s.arm.theta2);
    const double det = j.determinant();
    if (std::abs(det) < eps)
        throw NearSingular("resolve_to_actuators: |det J| = " +
                           std::to_string(std::abs(det)));

    // J depends on the joint angles alone, so its rate uses the raw joint
    // rates; the chain rate vector still carries the heading rate.
    const Vec2 u_rates(s.nu.joint1 + phi_dot, s.nu.joint2);
    const Mat2 j_dot = arm_jacobian_dot(p, s.arm.theta1, s.arm.theta2,
                                        s.nu.joint1, s.nu.joint2);
    const Vec2 tip_acc_cmd(task_acc[3], task_acc[4]);
    const Vec2 rhs = tip_acc_cmd - f_acc_del - phi_dot * (rot_d * (j * u_rates)) -
                     rot * (j_dot * u_rates);
    const Vec2 joint_u = j.inverse() * (rot.transpose() * rhs);
    return {wheels[0], wheels[1], joint_u.x() - phi_ddot_del, joint_u.y()};
}

/// Backward-difference acceleration with the model's per-channel sensor noise.
inline ActuatorVector measure_acceleration(const MeasurementModel& model,
                                           const ActuatorVector& prev_nu,
                                           const ActuatorVector& nu, double dt,
                                           std::mt19937_64& rng) {
    ActuatorVector acc = measured_acceleration(prev_nu, nu, dt);
    if ((model.accel_noise.array() > 0.0).any()) {
        std::normal_distribution<double> dist(0.0, 1.0);
        Vec4 v = acc.vec();
        for (int i = 0; i < 4; ++i) v[i] += model.accel_noise[i] * dist(rng);
        acc = ActuatorVector::from_vec(v);
    }
    return acc;
}

/// Previous command as the sensor reports it. The current-sensor variant
/// returns amperes; the torque-sensor variant returns torque.
inline ActuatorVector measure_torque(const MeasurementModel& model,
                                     const ActuatorVector& tau_prev,
                                     std::mt19937_64& rng) {
    Vec4 meas = tau_prev.vec();
    if ((model.torque_noise.array() > 0.0).any()) {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int i = 0; i < 4; ++i) meas[i] += model.torque_noise[i] * dist(rng);
    }
    if (model.sensor_kind == SensorKind::CurrentSensor)
        meas = meas.array() / model.kt.array();
    return ActuatorVector::from_vec(meas);
}

/// Disturbance estimate Q' = T' - IN' * acc', with T' reconstructed from the
/// sensor reading (current * Kt when a current sensor is fitted).
inline ActuatorVector estimate_disturbance(const MeasurementModel& model,
                                           const Vec4& in_eff,
                                           const ActuatorVector& meas,
                                           const ActuatorVector& acc_meas) {
    Vec4 torque = meas.vec();
    if (model.sensor_kind == SensorKind::CurrentSensor)
        torque = torque.array() * model.kt.array();
    return ActuatorVector::from_vec(torque - (in_eff.array() * acc_meas.vec().array()).matrix());
}

/// AFC command: IN' * (acc_ref - acc_meas) + measured term + Q'.
inline ActuatorVector afc_torque(const Vec4& in, const ActuatorVector& acc_ref,
                                 const ActuatorVector& acc_meas,
                                 const ActuatorVector& measured_term,
                                 const ActuatorVector& q_hat) {
    const Vec4 e = acc_ref.vec() - acc_meas.vec();
    return ActuatorVector::from_vec((in.array() * e.array()).matrix() +
                                    measured_term.vec() + q_hat.vec());
}

inline constexpr double kDefaultIntegralClamp = 1e3;

/// PIAFC command: IN_P * e + IN_I * integral(e) + measured term + Q', with
/// the integral advanced by the rectangle rule and clamped per channel.
/// Degenerates exactly to afc_torque when IN_I = 0 and IN_P = IN.
inline ActuatorVector piafc_torque(const InnerLoopGains& gains,
                                   ControllerState& state,
                                   const ActuatorVector& acc_ref,
                                   const ActuatorVector& acc_meas,
                                   const ActuatorVector& measured_term,
                                   const ActuatorVector& q_hat, double dt,
                                   double integral_clamp = kDefaultIntegralClamp) {
    if (!(dt > 0.0)) throw ConfigError("piafc_torque: dt must be positive");
    const Vec4 e = acc_ref.vec() - acc_meas.vec();
    state.integral_acc += e * dt;
    state.integral_acc =
        state.integral_acc.cwiseMax(-integral_clamp).cwiseMin(integral_clamp);
    return ActuatorVector::from_vec(
        (gains.in_p.array() * e.array()).matrix() +
        (gains.in_i.array() * state.integral_acc.array()).matrix() +
        measured_term.vec() + q_hat.vec());
}

/// Everything control_tick needs beyond the plant state snapshot.
struct ControllerConfig {
    ControlMode mode{ControlMode::RacPiafc};
    RacGains rac;
    InnerLoopGains inner;
    MeasurementModel measurement;
    double integral_clamp{kDefaultIntegralClamp};
    double eps_sing{kDefaultSingularityEps};

    void validate() const {
        rac.validate();
        inner.validate();
        measurement.validate();
        if (!(integral_clamp > 0.0))
            throw ConfigError("controller: integral clamp must be positive");
    }
};

struct TickResult {
    ActuatorVector tau;        ///< motor command for the next interval
    ActuatorVector q_hat;      ///< disturbance estimate (zero in RAC mode)
    ActuatorVector acc_ref;    ///< resolved actuator reference accelerations
    Vec5 task_acc = Vec5::Zero();
};

/// Observed task-space outputs of the plant.
inline TaskVector observe_task(const RobotParams& p, const GeneralizedState& s) {
    const Vec2 tip = arm_tip_position(p, s.pose, s.arm.theta1, s.arm.theta2);
    return {s.pose.x_f, s.pose.y_f, s.pose.phi, tip.x(), tip.y()};
}

/// Task-space rates implied by the current actuator rates.
inline Vec5 observe_task_rates(const RobotParams& p, const GeneralizedState& s) {
    const Vec4 v = total_velocity_map(p, s.pose.phi, s.arm.theta1, s.arm.theta2) *
                   s.nu.vec();
    Vec5 rates;
    rates << v[2], v[3], heading_rate(p, s.nu.wheel_l, s.nu.wheel_r), v[0], v[1];
    return rates;
}

/// One control update: outer RAC law, actuator resolution, then the selected
/// inner loop. RAC drives the actuators through the per-channel diagonal of
/// the true reduced inertia; AFC/PIAFC close the disturbance-estimate loop
/// of the measured signals around that same reference.
inline TickResult control_tick(const ControllerConfig& cfg,
                               ControllerState& state, const RobotParams& p,
                               const GeneralizedState& plant,
                               const ActuatorVector& acc_meas,
                               const TaskReference& ref, double dt,
                               std::mt19937_64& rng) {
    const TaskVector actual = observe_task(p, plant);
    const Vec5 actual_vel = observe_task_rates(p, plant);

    TickResult out;
    out.task_acc = rac_task_acceleration(cfg.rac, ref, actual, actual_vel);
    out.acc_ref = resolve_to_actuators(p, plant, out.task_acc, cfg.eps_sing);

    if (cfg.mode == ControlMode::Rac) {
        const Mat4 m = reduced_dynamics_at(p, plant).M;
        out.tau = ActuatorVector::from_vec(
            (m.diagonal().array() * out.acc_ref.vec().array()).matrix());
        state.last_tau_measured = ActuatorVector{};
        return out;
    }

    const Vec4 in_eff = (cfg.mode == ControlMode::RacAfc) ? cfg.inner.in
                                                          : cfg.inner.in_p;
    out.q_hat = estimate_disturbance(cfg.measurement, in_eff,
                                     state.last_tau_measured, acc_meas);
    const ActuatorVector inertial_term =
        ActuatorVector::from_vec((in_eff.array() * acc_meas.vec().array()).matrix());

    if (cfg.mode == ControlMode::RacAfc) {
        out.tau = afc_torque(cfg.inner.in, out.acc_ref, acc_meas, inertial_term,
                             out.q_hat);
    } else {
        out.tau = piafc_torque(cfg.inner, state, out.acc_ref, acc_meas,
                               inertial_term, out.q_hat, dt, cfg.integral_clamp);
    }
    state.last_tau_measured = measure_torque(cfg.measurement, out.tau, rng);
    return out;
}

}  // namespace mmctl
