#pragma once

// Finite-difference Lagrangian oracle for the reduced dynamics. Everything
// here is rebuilt from the position-level geometry and the wheel velocity
// map alone: body kinetic energies use finite-difference position Jacobians,
// and the generalized force comes from the projected Euler-Lagrange operator
//   S(q)^T [ d/dt (dT/dqdot) - dT/dq ]
// evaluated along a short constrained trajectory. It shares no velocity or
// inertia algebra with mmctl::reduced_dynamics_at.

#include "mmctl/dynamics.hpp"

namespace oracle {

using mmctl::RobotParams;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat74 = Eigen::Matrix<double, 7, 4>;

// Coordinate order: (xF, yF, phi, theta1, theta2, thetaL, thetaR).

/// Kinetic energy as an unconstrained function of the seven coordinates and
/// their rates. COM velocities come from finite differences of the position
/// maps (step 1e-6), so no hand-derived velocity expression enters.
inline double kinetic_energy_full(const RobotParams& p, const Vec7& q,
                                  const Vec7& qdot) {
    auto com_platform = [](const RobotParams& rp, const Vec7& x) {
        return Eigen::Vector2d(x[0] - rp.d * std::cos(x[2]),
                               x[1] - rp.d * std::sin(x[2]));
    };
    auto com_link1 = [](const RobotParams& rp, const Vec7& x) {
        return Eigen::Vector2d(x[0] + rp.l11 * std::cos(x[2] + x[3]),
                               x[1] + rp.l11 * std::sin(x[2] + x[3]));
    };
    auto com_link2 = [](const RobotParams& rp, const Vec7& x) {
        return Eigen::Vector2d(
            x[0] + rp.l1 * std::cos(x[2] + x[3]) +
                rp.l22 * std::cos(x[2] + x[3] + x[4]),
            x[1] + rp.l1 * std::sin(x[2] + x[3]) +
                rp.l22 * std::sin(x[2] + x[3] + x[4]));
    };

    auto fd_velocity = [&](auto&& com_fn) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        const double eps = 1e-6;
        for (int i = 0; i < 7; ++i) {
            if (qdot[i] == 0.0) continue;
            Vec7 hi = q, lo = q;
            hi[i] += eps;
            lo[i] -= eps;
            v += (com_fn(p, hi) - com_fn(p, lo)) / (2.0 * eps) * qdot[i];
        }
        return v;
    };

    const Eigen::Vector2d vg = fd_velocity(com_platform);
    const Eigen::Vector2d v1 = fd_velocity(com_link1);
    const Eigen::Vector2d v2 = fd_velocity(com_link2);

    const double w0 = qdot[2];
    const double w1 = qdot[2] + qdot[3];
    const double w2 = qdot[2] + qdot[3] + qdot[4];

    double t = 0.5 * p.m0 * vg.squaredNorm() + 0.5 * p.i0 * w0 * w0;
    t += 0.5 * p.m1 * v1.squaredNorm() + 0.5 * p.i1 * w1 * w1;
    t += 0.5 * p.m2 * v2.squaredNorm() + 0.5 * p.i2 * w2 * w2;
    t += 0.5 * p.wheel_rotor_inertia * (qdot[5] * qdot[5] + qdot[6] * qdot[6]);
    t += 0.5 * p.joint_rotor_inertia * (qdot[3] * qdot[3] + qdot[4] * qdot[4]);
    return t;
}

/// Constrained velocity map q_dot = S(q) nu, written from the published
/// wheel kinematics verbatim.
inline Mat74 velocity_map(const RobotParams& p, const Vec7& q) {
    const double phi = q[2];
    const double c = std::cos(phi), s = std::sin(phi);
    const double hr = p.r / 2.0;
    const double dr = p.d * p.r / (2.0 * p.b);

    Mat74 sm = Mat74::Zero();
    sm(0, 0) = hr * c + dr * s;
    sm(0, 1) = hr * c - dr * s;
    sm(1, 0) = hr * s - dr * c;
    sm(1, 1) = hr * s + dr * c;
    sm(2, 0) = -p.r / (2.0 * p.b);
    sm(2, 1) = p.r / (2.0 * p.b);
    sm(3, 2) = 1.0;
    sm(4, 3) = 1.0;
    sm(5, 0) = 1.0;
    sm(6, 1) = 1.0;
    return sm;
}

/// dT/dqdot by central differences (exact for the quadratic energy).
inline Vec7 momentum(const RobotParams& p, const Vec7& q, const Vec7& qdot) {
    Vec7 mom;
    const double eps = 1e-4;
    for (int i = 0; i < 7; ++i) {
        Vec7 hi = qdot, lo = qdot;
        hi[i] += eps;
        lo[i] -= eps;
        mom[i] = (kinetic_energy_full(p, q, hi) - kinetic_energy_full(p, q, lo)) /
                 (2.0 * eps);
    }
    return mom;
}

/// dT/dq by central differences.
inline Vec7 config_gradient(const RobotParams& p, const Vec7& q, const Vec7& qdot) {
    Vec7 g;
    const double eps = 1e-5;
    for (int i = 0; i < 7; ++i) {
        Vec7 hi = q, lo = q;
        hi[i] += eps;
        lo[i] -= eps;
        g[i] = (kinetic_energy_full(p, hi, qdot) - kinetic_energy_full(p, lo, qdot)) /
               (2.0 * eps);
    }
    return g;
}

inline Vec7 pack_state(const mmctl::GeneralizedState& s) {
    Vec7 q;
    q << s.pose.x_f, s.pose.y_f, s.pose.phi, s.arm.theta1, s.arm.theta2,
        s.wheel_angles.x(), s.wheel_angles.y();
    return q;
}

/// Generalized actuator force required to realize the acceleration nu_dot at
/// state (q, nu): S^T [ d/dt(dT/dqdot) - dT/dq ] along the constrained
/// trajectory with the prescribed nu(t) = nu + t * nu_dot.
inline Eigen::Vector4d required_torque(const RobotParams& p,
                                       const mmctl::GeneralizedState& s,
                                       const Eigen::Vector4d& nu,
                                       const Eigen::Vector4d& nu_dot) {
    const Vec7 q0 = pack_state(s);
    const double h = 1e-4;

    // RK4 propagation of q along the constrained flow with nu(t) prescribed.
    auto flow = [&](Vec7 q, double t0, double t1) {
        const int steps = 20;
        const double dt = (t1 - t0) / steps;
        for (int i = 0; i < steps; ++i) {
            const double t = t0 + i * dt;
            auto f = [&](const Vec7& x, double tt) -> Vec7 {
                return velocity_map(p, x) * (nu + tt * nu_dot);
            };
            const Vec7 k1 = f(q, t);
            const Vec7 k2 = f(q + 0.5 * dt * k1, t + 0.5 * dt);
            const Vec7 k3 = f(q + 0.5 * dt * k2, t + 0.5 * dt);
            const Vec7 k4 = f(q + dt * k3, t + dt);
            q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return q;
    };

    const Vec7 q_plus = flow(q0, 0.0, h);
    const Vec7 q_minus = flow(q0, 0.0, -h);
    const Vec7 mom_plus =
        momentum(p, q_plus, velocity_map(p, q_plus) * (nu + h * nu_dot));
    const Vec7 mom_minus =
        momentum(p, q_minus, velocity_map(p, q_minus) * (nu - h * nu_dot));
    const Vec7 mom_rate = (mom_plus - mom_minus) / (2.0 * h);

    const Vec7 grad = config_gradient(p, q0, velocity_map(p, q0) * nu);
    return velocity_map(p, q0).transpose() * (mom_rate - grad);
}

}  // namespace oracle
