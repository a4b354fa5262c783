#pragma once

#include "mmctl/types.hpp"

#include <numbers>
#include <vector>

namespace mmctl {

/// Reference sample for the five task coordinates (xF, yF, phi, xE, yE):
/// position, velocity and acceleration at time t. vel and acc are the exact
/// analytic derivatives of pos.
struct TaskReference {
    TaskVector pos;
    Vec5 vel = Vec5::Zero();
    Vec5 acc = Vec5::Zero();
    double t{0.0};
};

/// Lateral offset of the tip reference from the platform circle:
/// rho(t) = base + amplitude * cos(2 pi t / period), measured radially
/// outward (the right-hand side of a counter-clockwise run).
struct ArmOffsetCurve {
    double base{0.35};
    double amplitude{0.05};
    double period{10.0};
};

/// Constant-speed circular platform path with the arm tracking an offset
/// curve on the outer side.
struct CircularTaskSpec {
    double radius{10.0};
    double speed{0.2};
    double initial_heading{std::numbers::pi / 2.4};
    Vec2 start_f{0.0, 0.0};
    ArmOffsetCurve arm_offset_curve;
    double duration{60.0};
    Vec2 initial_tip{0.0, 0.0};  ///< actual tip pose at t = 0 (may differ from the reference)

    void validate() const {
        if (!(radius > 0.0)) throw ConfigError("task: radius must be positive");
        if (speed < 0.0) throw ConfigError("task: speed must be nonnegative");
        if (!(duration > 0.0)) throw ConfigError("task: duration must be positive");
        if (!(arm_offset_curve.period > 0.0))
            throw ConfigError("task: offset period must be positive");
    }

    /// Circle centre, which sits to the left of the initial heading.
    Vec2 centre() const {
        return start_f + radius * Vec2(-std::sin(initial_heading),
                                       std::cos(initial_heading));
    }
};

/// Reference at time t for the circular task. The platform point F moves
/// counter-clockwise at constant speed with the heading along the path
/// tangent (continuous, never wrapped); the tip reference rides radially
/// outward of F by the offset curve.
inline TaskReference reference_at(const CircularTaskSpec& spec, double t) {
    if (t < 0.0 || t > spec.duration)
        throw OutOfRange("reference_at: t outside [0, duration]");

    const double omega = spec.speed / spec.radius;
    const double alpha = spec.initial_heading - std::numbers::pi / 2.0 + omega * t;
    const Vec2 u(std::cos(alpha), std::sin(alpha));        // radial, outward
    const Vec2 up(-std::sin(alpha), std::cos(alpha));      // tangent, CCW
    const Vec2 c = spec.centre();

    const double two_pi = 2.0 * std::numbers::pi;
    const double wm = two_pi / spec.arm_offset_curve.period;
    const double rho = spec.arm_offset_curve.base +
                       spec.arm_offset_curve.amplitude * std::cos(wm * t);
    const double rho_dot = -spec.arm_offset_curve.amplitude * wm * std::sin(wm * t);
    const double rho_ddot =
        -spec.arm_offset_curve.amplitude * wm * wm * std::cos(wm * t);

    TaskReference ref;
    ref.t = t;

    const Vec2 f = c + spec.radius * u;
    const Vec2 f_vel = spec.speed * up;
    const Vec2 f_acc = -spec.radius * omega * omega * u;

    const double r_tip = spec.radius + rho;
    const Vec2 tip = c + r_tip * u;
    const Vec2 tip_vel = rho_dot * u + r_tip * omega * up;
    const Vec2 tip_acc = (rho_ddot - r_tip * omega * omega) * u +
                         2.0 * rho_dot * omega * up;

    ref.pos = {f.x(), f.y(), spec.initial_heading + omega * t, tip.x(), tip.y()};
    ref.vel << f_vel.x(), f_vel.y(), omega, tip_vel.x(), tip_vel.y();
    ref.acc << f_acc.x(), f_acc.y(), 0.0, tip_acc.x(), tip_acc.y();
    return ref;
}

/// The benchmark task: 10 m circle at 0.2 m/s, initial heading pi/2.4, the
/// arm curve starting from (10.41, 0.35) and the actual tip initially at
/// (10.55, 0.35) -- a deliberate 0.14 m starting error. The platform start
/// is placed so the curve start lies at the initial outward offset.
inline CircularTaskSpec benchmark_task() {
    CircularTaskSpec spec;
    spec.radius = 10.0;
    spec.speed = 0.2;
    spec.initial_heading = std::numbers::pi / 2.4;
    spec.arm_offset_curve = {0.35, 0.05, 10.0};
    spec.duration = 60.0;
    spec.initial_tip = Vec2(10.55, 0.35);

    const Vec2 curve_start(10.41, 0.35);
    const Vec2 outward(std::sin(spec.initial_heading),
                       -std::cos(spec.initial_heading));
    const double rho0 = spec.arm_offset_curve.base + spec.arm_offset_curve.amplitude;
    spec.start_f = curve_start - rho0 * outward;
    return spec;
}

/// Natural cubic spline through tabulated task-coordinate waypoints;
/// velocities and accelerations come from the spline derivatives.
class WaypointTrajectory {
public:
    /// times strictly increasing, one 5-coordinate row per knot.
    WaypointTrajectory(std::vector<double> times, std::vector<Vec5> positions)
        : t_(std::move(times)), p_(std::move(positions)) {
        if (t_.size() < 2 || t_.size() != p_.size())
            throw ConfigError("waypoints: need at least two knots with matching times");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1]))
                throw ConfigError("waypoints: times must be strictly increasing");
        for (int c = 0; c < 5; ++c) build_coordinate(c);
    }

    double start() const { return t_.front(); }
    double duration() const { return t_.back(); }

    TaskReference at(double t) const {
        if (t < t_.front() || t > t_.back())
            throw OutOfRange("waypoint trajectory: t outside the knot range");
        std::size_t seg = t_.size() - 2;
        for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
            if (t <= t_[i + 1]) {
                seg = i;
                break;
            }
        }
        const double h = t - t_[seg];
        TaskReference ref;
        ref.t = t;
        Vec5 pos, vel, acc;
        for (int c = 0; c < 5; ++c) {
            const auto& s = coef_[c][seg];
            pos[c] = s[0] + h * (s[1] + h * (s[2] + h * s[3]));
            vel[c] = s[1] + h * (2.0 * s[2] + 3.0 * h * s[3]);
            acc[c] = 2.0 * s[2] + 6.0 * h * s[3];
        }
        ref.pos = TaskVector::from_vec(pos);
        ref.vel = vel;
        ref.acc = acc;
        return ref;
    }

private:
    void build_coordinate(int c) {
        const std::size_t n = t_.size();
        std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), z(n), m(n);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t_[i + 1] - t_[i];
        for (std::size_t i = 1; i + 1 < n; ++i)
            alpha[i] = 3.0 * ((p_[i + 1][c] - p_[i][c]) / h[i] -
                              (p_[i][c] - p_[i - 1][c]) / h[i - 1]);
        l[0] = 1.0;
        mu[0] = z[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (t_[i + 1] - t_[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
        }
        m[n - 1] = 0.0;
        for (std::size_t i = n - 1; i-- > 0;) m[i] = z[i] - mu[i] * m[i + 1];

        coef_[c].resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            coef_[c][i][0] = p_[i][c];
            coef_[c][i][2] = m[i];
            coef_[c][i][3] = (m[i + 1] - m[i]) / (3.0 * h[i]);
            coef_[c][i][1] = (p_[i + 1][c] - p_[i][c]) / h[i] -
                             h[i] * (2.0 * m[i] + m[i + 1]) / 3.0;
        }
    }

    std::vector<double> t_;
    std::vector<Vec5> p_;
    std::array<std::vector<std::array<double, 4>>, 5> coef_;
};

}  // namespace mmctl
