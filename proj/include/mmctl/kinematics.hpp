#pragma once

#include "mmctl/types.hpp"

namespace mmctl {

inline constexpr double kDefaultSingularityEps = 1e-6;

/// 2x2 planar rotation matrix [[cos, -sin], [sin, cos]].
inline Mat2 rotation_matrix(double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    Mat2 rot;
    rot << c, -s, s, c;
    return rot;
}

/// Body-frame map from wheel rates to (forward speed, lateral speed of F).
/// Constant in the configuration; singular iff d = 0.
inline Mat2 wheel_to_f_velocity_block(const RobotParams& p) {
    Mat2 k;
    k << p.r / 2.0, p.r / 2.0,
        -p.d * p.r / (2.0 * p.b), p.d * p.r / (2.0 * p.b);
    return k;
}

struct PlatformVelocity {
    double x_dot{0.0};
    double y_dot{0.0};
    double phi_dot{0.0};
};

/// Velocity of point F and the heading rate produced by the given wheel
/// rates: the 3x2 kinematic map of the differential drive evaluated at
/// heading phi.
inline PlatformVelocity platform_forward_velocity(const RobotParams& p, double phi,
                                                  double wheel_rate_l,
                                                  double wheel_rate_r) {
    const Vec2 body = wheel_to_f_velocity_block(p) * Vec2(wheel_rate_l, wheel_rate_r);
    const Vec2 world = rotation_matrix(phi) * body;
    const double phi_dot = p.r / (2.0 * p.b) * (wheel_rate_r - wheel_rate_l);
    return {world.x(), world.y(), phi_dot};
}

/// Heading rate for the given wheel rates (the bottom row of the platform
/// velocity map).
inline double heading_rate(const RobotParams& p, double wheel_rate_l,
                           double wheel_rate_r) {
    return p.r / (2.0 * p.b) * (wheel_rate_r - wheel_rate_l);
}

/// Wheel accelerations realizing a commanded acceleration of point F plus a
/// differential heading correction. The translational part inverts the 2x2
/// body-frame block; the heading part superposes (+b/r, -b/r) * (phi_ddot/2)
/// on (right, left). Velocity-dependent feedthrough is deliberately not
/// handled here; see resolve_to_actuators for the full closed-loop version.
inline std::pair<double, double> platform_inverse_acceleration(
    const RobotParams& p, double phi, const Vec2& f_acc, double phi_ddot) {
    if (p.d <= 0.0)
        throw SingularMap("platform velocity map is singular for d = 0");
    const Vec2 body = rotation_matrix(phi).transpose() * f_acc;
    const Mat2 k = wheel_to_f_velocity_block(p);
    const Vec2 wheels = k.inverse() * body;
    const double diff = p.b / p.r * (phi_ddot / 2.0);
    return {wheels.x() - diff, wheels.y() + diff};
}

/// Two-link arm Jacobian in the platform frame.
///
///   J11 = -l1 sin t1 - l2 sin(t1+t2)   J12 = -l2 sin(t1+t2)
///   J21 =  l1 cos t1 + l2 cos(t1+t2)   J22 =  l2 cos(t1+t2)
///
/// det(J) = l1 l2 sin(t2).
inline Mat2 arm_jacobian(const RobotParams& p, double theta1, double theta2) {
    const double s1 = std::sin(theta1), c1 = std::cos(theta1);
    const double s12 = std::sin(theta1 + theta2), c12 = std::cos(theta1 + theta2);
    Mat2 j;
    j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
          p.l1 * c1 + p.l2 * c12,  p.l2 * c12;
    return j;
}

/// Time derivative of the arm Jacobian for the given joint rates.
inline Mat2 arm_jacobian_dot(const RobotParams& p, double theta1, double theta2,
                             double rate1, double rate2) {
    const double s1 = std::sin(theta1), c1 = std::cos(theta1);
    const double s12 = std::sin(theta1 + theta2), c12 = std::cos(theta1 + theta2);
    const double r12 = rate1 + rate2;
    Mat2 jd;
    jd << -p.l1 * c1 * rate1 - p.l2 * c12 * r12, -p.l2 * c12 * r12,
          -p.l1 * s1 * rate1 - p.l2 * s12 * r12, -p.l2 * s12 * r12;
    return jd;
}

/// Arm tip position in the platform frame.
inline Vec2 arm_tip_local(const RobotParams& p, double theta1, double theta2) {
    return Vec2(p.l1 * std::cos(theta1) + p.l2 * std::cos(theta1 + theta2),
                p.l1 * std::sin(theta1) + p.l2 * std::sin(theta1 + theta2));
}

/// World-frame tip position: F + R(phi) * (link-1 + link-2 chain).
inline Vec2 arm_tip_position(const RobotParams& p, const PlatformPose& pose,
                             double theta1, double theta2) {
    return Vec2(pose.x_f, pose.y_f) +
           rotation_matrix(pose.phi) * arm_tip_local(p, theta1, theta2);
}

/// Joint rates realizing a tip velocity given in the platform frame.
/// Throws NearSingular when |det J| < eps (theta2 near 0 or pi).
inline std::pair<double, double> arm_inverse_velocity(
    const RobotParams& p, double theta1, double theta2, const Vec2& tip_vel,
    double eps = kDefaultSingularityEps) {
    const Mat2 j = arm_jacobian(p, theta1, theta2);
    const double det = j.determinant();
    if (std::abs(det) < eps)
        throw NearSingular("arm Jacobian near singular: |det J| = " +
                           std::to_string(std::abs(det)));
    const Vec2 rates = j.inverse() * tip_vel;
    return {rates.x(), rates.y()};
}

/// Composed 4x4 map from actuator rates (wheelL, wheelR, joint1, joint2) to
/// task rates (xE_dot, yE_dot, xF_dot, yF_dot). Rows 3-4 are the
/// translational platform map; rows 1-2 add the arm chain carried by the
/// moving base, with the heading rate feeding the first joint column pair.
inline Mat4 total_velocity_map(const RobotParams& p, double phi, double theta1,
                               double theta2) {
    const Mat2 j = arm_jacobian(p, theta1, theta2);
    const double c = p.r / (2.0 * p.b);

    Eigen::Matrix<double, 4, 4> inner = Eigen::Matrix<double, 4, 4>::Zero();
    // Tip rows: wheel columns combine the F translation with the phi_dot
    // pass-through into the (theta1 + phi) joint rate.
    inner(0, 0) = p.r / 2.0 - j(0, 0) * c;
    inner(0, 1) = p.r / 2.0 + j(0, 0) * c;
    inner(0, 2) = j(0, 0);
    inner(0, 3) = j(0, 1);
    inner(1, 0) = -(p.d + j(1, 0)) * c;
    inner(1, 1) = (p.d + j(1, 0)) * c;
    inner(1, 2) = j(1, 0);
    inner(1, 3) = j(1, 1);
    // Platform rows.
    inner(2, 0) = p.r / 2.0;
    inner(2, 1) = p.r / 2.0;
    inner(3, 0) = -p.d * c;
    inner(3, 1) = p.d * c;

    Mat4 blk = Mat4::Zero();
    blk.block<2, 2>(0, 0) = rotation_matrix(phi);
    blk.block<2, 2>(2, 2) = rotation_matrix(phi);
    return blk * inner;
}

/// Sideways-slip residual at the centre of mass: x_dot sin(phi) - y_dot cos(phi).
inline double nonholonomic_residual(double phi, const Vec2& g_vel) {
    return g_vel.x() * std::sin(phi) - g_vel.y() * std::cos(phi);
}

/// Sideways-slip residual at point F, which rides a distance d ahead of the
/// axle: x_dot sin(phi) - y_dot cos(phi) + phi_dot * d.
inline double residual_at_f(double phi, double phi_dot, const Vec2& f_vel,
                            double d) {
    return f_vel.x() * std::sin(phi) - f_vel.y() * std::cos(phi) + phi_dot * d;
}

}  // namespace mmctl
