#pragma once

#include "mmctl/kinematics.hpp"

#include <random>

namespace mmctl {

/// Full plant configuration plus actuator rates. wheel_angles are carried
/// for logging and the wheel-spin energy bookkeeping; the pose/arm fields
/// evolve only through step(), which keeps them consistent with nu (the
/// sideways-slip residual of the implied platform velocity is zero by
/// construction of the velocity map).
struct GeneralizedState {
    PlatformPose pose;
    ArmConfig arm;
    ActuatorVector nu;          ///< rates (wheelL, wheelR, joint1, joint2) [rad/s]
    Vec2 wheel_angles{0.0, 0.0};  ///< (thetaL, thetaR) [rad]
};

/// Torques applied over one integration step. tau_d opposes tau: the plant
/// integrates nu_dot = M^-1 (tau - tau_d - h).
struct PlantInputs {
    ActuatorVector tau;
    ActuatorVector tau_d;
};

/// Reduced equations of motion in actuator-rate coordinates:
/// M * nu_dot + h = tau - tau_d, with M symmetric positive definite.
struct ReducedDynamics {
    Mat4 M = Mat4::Zero();
    Vec4 h = Vec4::Zero();
};

namespace detail {

/// Per-body velocity Jacobians: world-frame COM velocity columns over
/// nu = (wheelL, wheelR, joint1, joint2), plus their time derivatives at the
/// current rates. Only the three massive bodies appear; the angular-rate
/// rows are constant and contribute no velocity-product terms.
struct BodyJacobians {
    Eigen::Matrix<double, 2, 4> platform, link1, link2;
    Eigen::Matrix<double, 2, 4> platform_dot, link1_dot, link2_dot;
};

inline BodyJacobians body_jacobians(const RobotParams& p,
                                    const GeneralizedState& s) {
    const double c = p.r / (2.0 * p.b);
    const double half_r = p.r / 2.0;
    const double phi = s.pose.phi;
    const double a1 = phi + s.arm.theta1;
    const double a2 = a1 + s.arm.theta2;

    const Vec2 e(std::cos(phi), std::sin(phi));
    const Vec2 n(-std::sin(phi), std::cos(phi));
    const Vec2 u1(std::cos(a1), std::sin(a1));
    const Vec2 u1p(-std::sin(a1), std::cos(a1));
    const Vec2 u2(std::cos(a2), std::sin(a2));
    const Vec2 u2p(-std::sin(a2), std::cos(a2));

    const double phi_dot = c * (s.nu.wheel_r - s.nu.wheel_l);
    const double w1 = phi_dot + s.nu.joint1;       // link-1 angular rate
    const double w2 = w1 + s.nu.joint2;            // link-2 angular rate

    BodyJacobians out;
    out.platform.setZero();
    out.platform.col(0) = half_r * e;
    out.platform.col(1) = half_r * e;
    out.platform_dot.setZero();
    out.platform_dot.col(0) = half_r * phi_dot * n;
    out.platform_dot.col(1) = half_r * phi_dot * n;

    // Link-1 COM rides at F + l11 * u1; F itself moves with v*e + d*phi_dot*n.
    const Vec2 lever1 = p.d * n + p.l11 * u1p;
    const Vec2 lever1_dot = -p.d * phi_dot * e - p.l11 * w1 * u1;
    out.link1.col(0) = half_r * e - c * lever1;
    out.link1.col(1) = half_r * e + c * lever1;
    out.link1.col(2) = p.l11 * u1p;
    out.link1.col(3).setZero();
    out.link1_dot.col(0) = half_r * phi_dot * n - c * lever1_dot;
    out.link1_dot.col(1) = half_r * phi_dot * n + c * lever1_dot;
    out.link1_dot.col(2) = -p.l11 * w1 * u1;
    out.link1_dot.col(3).setZero();

    const Vec2 lever2 = p.d * n + p.l1 * u1p + p.l22 * u2p;
    const Vec2 lever2_dot = -p.d * phi_dot * e - p.l1 * w1 * u1 - p.l22 * w2 * u2;
    out.link2.col(0) = half_r * e - c * lever2;
    out.link2.col(1) = half_r * e + c * lever2;
    out.link2.col(2) = p.l1 * u1p + p.l22 * u2p;
    out.link2.col(3) = p.l22 * u2p;
    out.link2_dot.col(0) = half_r * phi_dot * n - c * lever2_dot;
    out.link2_dot.col(1) = half_r * phi_dot * n + c * lever2_dot;
    out.link2_dot.col(2) = -p.l1 * w1 * u1 - p.l22 * w2 * u2;
    out.link2_dot.col(3) = -p.l22 * w2 * u2;
    return out;
}

}  // namespace detail

/// Assembles the reduced inertia matrix and the Coriolis/centripetal force
/// vector at the current state by projecting each body's Newton-Euler
/// contribution through its velocity Jacobian.
inline ReducedDynamics reduced_dynamics_at(const RobotParams& p,
                                           const GeneralizedState& s) {
    const auto jac = detail::body_jacobians(p, s);
    const double c = p.r / (2.0 * p.b);

    // Constant angular-rate rows: platform yaw, link-1, link-2.
    const Vec4 a0(-c, c, 0.0, 0.0);
    const Vec4 a1(-c, c, 1.0, 0.0);
    const Vec4 a2(-c, c, 1.0, 1.0);

    ReducedDynamics dyn;
    dyn.M = p.m0 * jac.platform.transpose() * jac.platform +
            p.m1 * jac.link1.transpose() * jac.link1 +
            p.m2 * jac.link2.transpose() * jac.link2 +
            p.i0 * a0 * a0.transpose() +
            p.i1 * a1 * a1.transpose() +
            p.i2 * a2 * a2.transpose();
    dyn.M(0, 0) += p.wheel_rotor_inertia;
    dyn.M(1, 1) += p.wheel_rotor_inertia;
    dyn.M(2, 2) += p.joint_rotor_inertia;
    dyn.M(3, 3) += p.joint_rotor_inertia;

    const Vec4 nu = s.nu.vec();
    dyn.h = p.m0 * jac.platform.transpose() * (jac.platform_dot * nu) +
            p.m1 * jac.link1.transpose() * (jac.link1_dot * nu) +
            p.m2 * jac.link2.transpose() * (jac.link2_dot * nu);
    return dyn;
}

/// Total kinetic energy: platform translation/yaw, both links, and the
/// reflected rotor spin of all four drives. Friction and gravity are absent
/// from the model (planar arm, gravity out of plane).
inline double kinetic_energy(const RobotParams& p, const GeneralizedState& s) {
    const double c = p.r / (2.0 * p.b);
    const double phi = s.pose.phi;
    const double a1 = phi + s.arm.theta1;
    const double a2 = a1 + s.arm.theta2;
    const double v = p.r / 2.0 * (s.nu.wheel_l + s.nu.wheel_r);
    const double phi_dot = c * (s.nu.wheel_r - s.nu.wheel_l);
    const double w1 = phi_dot + s.nu.joint1;
    const double w2 = w1 + s.nu.joint2;

    const Vec2 e(std::cos(phi), std::sin(phi));
    const Vec2 n(-std::sin(phi), std::cos(phi));
    const Vec2 u1p(-std::sin(a1), std::cos(a1));
    const Vec2 u2p(-std::sin(a2), std::cos(a2));

    const Vec2 f_vel = v * e + p.d * phi_dot * n;
    const Vec2 c1_vel = f_vel + p.l11 * w1 * u1p;
    const Vec2 c2_vel = f_vel + p.l1 * w1 * u1p + p.l22 * w2 * u2p;

    double t = 0.5 * p.m0 * v * v + 0.5 * p.i0 * phi_dot * phi_dot;
    t += 0.5 * p.m1 * c1_vel.squaredNorm() + 0.5 * p.i1 * w1 * w1;
    t += 0.5 * p.m2 * c2_vel.squaredNorm() + 0.5 * p.i2 * w2 * w2;
    t += 0.5 * p.wheel_rotor_inertia *
         (s.nu.wheel_l * s.nu.wheel_l + s.nu.wheel_r * s.nu.wheel_r);
    t += 0.5 * p.joint_rotor_inertia *
         (s.nu.joint1 * s.nu.joint1 + s.nu.joint2 * s.nu.joint2);
    return t;
}

namespace detail {

using StateVec = Eigen::Matrix<double, 11, 1>;

inline StateVec pack(const GeneralizedState& s) {
    StateVec x;
    x << s.pose.x_f, s.pose.y_f, s.pose.phi, s.arm.theta1, s.arm.theta2,
        s.wheel_angles.x(), s.wheel_angles.y(), s.nu.wheel_l, s.nu.wheel_r,
        s.nu.joint1, s.nu.joint2;
    return x;
}

inline GeneralizedState unpack(const StateVec& x) {
    GeneralizedState s;
    s.pose = {x[0], x[1], x[2]};
    s.arm = {x[3], x[4]};
    s.wheel_angles = Vec2(x[5], x[6]);
    s.nu = {x[7], x[8], x[9], x[10]};
    return s;
}

inline StateVec plant_derivative(const RobotParams& p, const StateVec& x,
                                 const Vec4& tau_net) {
    const GeneralizedState s = unpack(x);
    const auto vel = platform_forward_velocity(p, s.pose.phi, s.nu.wheel_l,
                                               s.nu.wheel_r);
    const ReducedDynamics dyn = reduced_dynamics_at(p, s);
    const Vec4 nu_dot = dyn.M.ldlt().solve(tau_net - dyn.h);

    StateVec dx;
    dx << vel.x_dot, vel.y_dot, vel.phi_dot, s.nu.joint1, s.nu.joint2,
        s.nu.wheel_l, s.nu.wheel_r, nu_dot[0], nu_dot[1], nu_dot[2], nu_dot[3];
    return dx;
}

}  // namespace detail

/// Advances the plant by one fixed step of classical 4th-order Runge-Kutta
/// with the inputs held constant over the step. Throws NumericalBlowup when
/// any state component exceeds 1e9 or turns non-finite.
inline GeneralizedState step(const RobotParams& p, const GeneralizedState& s,
                             const PlantInputs& in, double dt) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    const Vec4 tau_net = in.tau.vec() - in.tau_d.vec();

    const detail::StateVec x0 = detail::pack(s);
    const detail::StateVec k1 = detail::plant_derivative(p, x0, tau_net);
    const detail::StateVec k2 =
        detail::plant_derivative(p, x0 + 0.5 * dt * k1, tau_net);
    const detail::StateVec k3 =
        detail::plant_derivative(p, x0 + 0.5 * dt * k2, tau_net);
    const detail::StateVec k4 = detail::plant_derivative(p, x0 + dt * k3, tau_net);
    const detail::StateVec x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    for (int i = 0; i < x1.size(); ++i) {
        if (!std::isfinite(x1[i]) || std::abs(x1[i]) > 1e9)
            throw NumericalBlowup("plant state diverged (component " +
                                  std::to_string(i) + " = " +
                                  std::to_string(x1[i]) + ")");
    }
    return detail::unpack(x1);
}

/// Backward-difference acceleration estimate over one sample interval.
inline ActuatorVector measured_acceleration(const ActuatorVector& prev_nu,
                                            const ActuatorVector& nu, double dt) {
    if (!(dt > 0.0)) throw ConfigError("measured_acceleration: dt must be positive");
    return ActuatorVector::from_vec((nu.vec() - prev_nu.vec()) / dt);
}

/// Same estimate with additive zero-mean Gaussian sensor noise.
inline ActuatorVector measured_acceleration(const ActuatorVector& prev_nu,
                                            const ActuatorVector& nu, double dt,
                                            double noise_sigma,
                                            std::mt19937_64& rng) {
    ActuatorVector acc = measured_acceleration(prev_nu, nu, dt);
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> dist(0.0, noise_sigma);
        acc.wheel_l += dist(rng);
        acc.wheel_r += dist(rng);
        acc.joint1 += dist(rng);
        acc.joint2 += dist(rng);
    }
    return acc;
}

}  // namespace mmctl
