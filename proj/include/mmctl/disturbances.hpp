#pragma once

#include "mmctl/types.hpp"

#include <numbers>
#include <vector>

namespace mmctl {

enum class Channel { WheelL = 0, WheelR = 1, Joint1 = 2, Joint2 = 3 };

inline double& channel_ref(ActuatorVector& v, Channel ch) {
    switch (ch) {
        case Channel::WheelL: return v.wheel_l;
        case Channel::WheelR: return v.wheel_r;
        case Channel::Joint1: return v.joint1;
        default: return v.joint2;
    }
}

/// Sinusoidal disturbance torque A * sin(2 pi f t + phase) on one channel.
struct VibrationSpec {
    Channel channel{Channel::WheelL};
    double frequency{1.0};  ///< Hz
    double amplitude{0.0};  ///< N m
    double phase{0.0};      ///< rad
};

/// Rectangular torque pulse on one channel, active on [start, start+duration).
struct ImpactSpec {
    Channel channel{Channel::WheelL};
    double start{0.0};      ///< s
    double duration{0.05};  ///< s
    double magnitude{0.0};  ///< N m
};

enum class DisturbancePreset { None, Vibration, Impact };

/// A deterministic torque-vs-time profile per actuator channel, built from
/// any number of vibration and impact components.
struct DisturbanceSchedule {
    std::vector<VibrationSpec> vibrations;
    std::vector<ImpactSpec> impacts;

    void validate() const {
        for (const auto& v : vibrations) {
            if (!(v.frequency > 0.0))
                throw ConfigError("vibration frequency must be positive");
            if (v.amplitude < 0.0)
                throw ConfigError("vibration amplitude must be nonnegative");
        }
        for (const auto& i : impacts) {
            if (!(i.duration > 0.0))
                throw ConfigError("impact duration must be positive");
            if (i.start < 0.0) throw ConfigError("impact start must be nonnegative");
        }
    }

    DisturbanceSchedule merged_with(const DisturbanceSchedule& other) const {
        DisturbanceSchedule out = *this;
        out.vibrations.insert(out.vibrations.end(), other.vibrations.begin(),
                              other.vibrations.end());
        out.impacts.insert(out.impacts.end(), other.impacts.begin(),
                           other.impacts.end());
        return out;
    }
};

/// Disturbance torque on every channel at time t.
inline ActuatorVector sample(const DisturbanceSchedule& schedule, double t) {
    ActuatorVector out;
    for (const auto& v : schedule.vibrations) {
        channel_ref(out, v.channel) +=
            v.amplitude *
            std::sin(2.0 * std::numbers::pi * v.frequency * t + v.phase);
    }
    for (const auto& i : schedule.impacts) {
        if (t >= i.start && t < i.start + i.duration)
            channel_ref(out, i.channel) += i.magnitude;
    }
    return out;
}

/// Parameters of the published disturbance profiles. The wheel phase split
/// and the impact pulse shape are not quantified anywhere, so they default to
/// a half-turn offset and 10 N m pulses of 0.05 s at 12, 16, 20 and 24 s --
/// late enough that the startup transient has died and each excursion is
/// measurable against a quiet baseline.
struct PresetParams {
    double wheel_frequency{2.2};   ///< Hz
    double wheel_amplitude{2.0};   ///< N m
    double wheel_phase_offset{std::numbers::pi};  ///< wheelR lags wheelL
    double joint_frequency{2.9};   ///< Hz (3.2 Hz is the config alternative)
    double joint_amplitude{0.3};   ///< N m
    double impact_magnitude{10.0};  ///< N m
    double impact_duration{0.05};   ///< s
    double impact_first_start{12.0};  ///< s
    double impact_spacing{4.0};       ///< s between consecutive pulses
};

/// Expands a named preset: wheel vibration at 2.2 Hz with the two wheels out
/// of phase, joint vibration at 2.9 Hz in phase, or four consecutive impact
/// pulses ordered joint1, joint2, wheelL, wheelR.
inline DisturbanceSchedule expand_preset(DisturbancePreset kind,
                                         const PresetParams& pp = {}) {
    DisturbanceSchedule s;
    if (kind == DisturbancePreset::Vibration) {
        s.vibrations = {
            {Channel::WheelL, pp.wheel_frequency, pp.wheel_amplitude, 0.0},
            {Channel::WheelR, pp.wheel_frequency, pp.wheel_amplitude,
             pp.wheel_phase_offset},
            {Channel::Joint1, pp.joint_frequency, pp.joint_amplitude, 0.0},
            {Channel::Joint2, pp.joint_frequency, pp.joint_amplitude, 0.0},
        };
    } else if (kind == DisturbancePreset::Impact) {
        const Channel order[4] = {Channel::Joint1, Channel::Joint2,
                                  Channel::WheelL, Channel::WheelR};
        for (int i = 0; i < 4; ++i) {
            s.impacts.push_back({order[i], pp.impact_first_start + i * pp.impact_spacing,
                                 pp.impact_duration, pp.impact_magnitude});
        }
    }
    return s;
}

}  // namespace mmctl
