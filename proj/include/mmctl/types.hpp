#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmctl {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Thrown when the platform velocity map loses rank (d = 0).
struct SingularMap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the arm Jacobian determinant falls below the singularity
/// threshold (arm stretched or folded).
struct NearSingular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by the integrator when a state component leaves the sane range.
struct NumericalBlowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One scalar per actuated channel, always in the order
/// (wheelL, wheelR, joint1, joint2). The semantic meaning (angle, rate,
/// acceleration, torque) is fixed by context.
struct ActuatorVector {
    double wheel_l{0.0};
    double wheel_r{0.0};
    double joint1{0.0};
    double joint2{0.0};

    ActuatorVector() = default;
    ActuatorVector(double wl, double wr, double j1, double j2)
        : wheel_l(wl), wheel_r(wr), joint1(j1), joint2(j2) {}

    static ActuatorVector from_vec(const Vec4& v) {
        return {v[0], v[1], v[2], v[3]};
    }
    Vec4 vec() const { return Vec4(wheel_l, wheel_r, joint1, joint2); }
};

/// Platform pose: world position of point F and heading angle.
/// phi is kept unwrapped (continuous, never clamped to [-pi, pi]).
struct PlatformPose {
    double x_f{0.0};
    double y_f{0.0};
    double phi{0.0};
};

/// Arm joint angles, measured in the platform frame attached at F.
struct ArmConfig {
    double theta1{0.0};
    double theta2{0.0};
};

/// The five task coordinates: platform position, heading, arm tip position.
struct TaskVector {
    double x_f{0.0};
    double y_f{0.0};
    double phi{0.0};
    double x_e{0.0};
    double y_e{0.0};

    static TaskVector from_vec(const Vec5& v) {
        return {v[0], v[1], v[2], v[3], v[4]};
    }
    Vec5 vec() const {
        Vec5 v;
        v << x_f, y_f, phi, x_e, y_e;
        return v;
    }
};

/// Geometric and inertial constants of the platform and the two-link arm.
///
/// b is half the track width (the wheel centres sit at +/-b from the axle
/// midpoint), r the wheel radius, d the distance from the axle midpoint G
/// to the arm mount point F (F leads G along the heading). The rotor
/// inertias model the reflected inertia of the geared drives and enter the
/// reduced inertia matrix on the corresponding diagonal channel.
struct RobotParams {
    double b{0.4};     ///< half track width [m]
    double r{0.08};    ///< wheel radius [m]
    double d{0.1};     ///< distance G -> F [m]
    double m0{20.0};   ///< platform mass [kg]
    double i0{1.0};    ///< platform yaw inertia [kg m^2]
    double l1{0.3};    ///< link-1 length [m]
    double l11{0.15};  ///< F -> link-1 COM [m]
    double l2{0.25};   ///< link-2 length [m]
    double l22{0.125}; ///< joint-2 -> link-2 COM [m]
    double m1{1.0};    ///< link-1 mass [kg]
    double m2{0.8};    ///< link-2 mass [kg]
    double i1{0.02};   ///< link-1 inertia about COM [kg m^2]
    double i2{0.015};  ///< link-2 inertia about COM [kg m^2]

    double wheel_rotor_inertia{1.556}; ///< reflected drive inertia per wheel [kg m^2]
    double joint_rotor_inertia{0.065}; ///< reflected drive inertia per joint [kg m^2]

    /// Checks the structural invariants; throws ConfigError on violation.
    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError(std::string("RobotParams: ") + name +
                                  " must be strictly positive");
        };
        positive(b, "b");
        positive(r, "r");
        positive(d, "d");
        positive(m0, "m0");
        positive(i0, "I0");
        positive(l1, "l1");
        positive(l11, "l11");
        positive(l2, "l2");
        positive(l22, "l22");
        positive(m1, "m1");
        positive(m2, "m2");
        positive(i1, "I1");
        positive(i2, "I2");
        if (l11 > l1) throw ConfigError("RobotParams: l11 must not exceed l1");
        if (l22 > l2) throw ConfigError("RobotParams: l22 must not exceed l2");
        if (wheel_rotor_inertia < 0.0 || joint_rotor_inertia < 0.0)
            throw ConfigError("RobotParams: rotor inertias must be nonnegative");
    }
};

}  // namespace mmctl
