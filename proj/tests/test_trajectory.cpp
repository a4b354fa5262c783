#include "mmctl/trajectory.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace mmctl;

namespace {

std::mt19937_64 rng(4242u);

double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

}  // namespace

TEST_CASE("benchmark task fields") {
    const CircularTaskSpec spec = benchmark_task();
    CHECK(spec.radius == 10.0);
    CHECK(spec.speed == 0.2);
    CHECK(spec.initial_heading == Catch::Approx(std::numbers::pi / 2.4));
    CHECK(spec.initial_tip.x() == 10.55);
    CHECK(spec.initial_tip.y() == 0.35);
    CHECK(spec.duration == 60.0);

    // The arm curve starts at (10.41, 0.35); the initial actual tip sits
    // 0.14 m further along x -- the deliberate starting error.
    const TaskReference r0 = reference_at(spec, 0.0);
    CHECK(r0.pos.x_e == Catch::Approx(10.41).margin(1e-12));
    CHECK(r0.pos.y_e == Catch::Approx(0.35).margin(1e-12));
    CHECK(spec.initial_tip.x() - r0.pos.x_e == Catch::Approx(0.14).margin(1e-12));
    CHECK(spec.initial_tip.y() - r0.pos.y_e == Catch::Approx(0.0).margin(1e-12));

    // The tip reference lies to the right of the platform heading.
    const Vec2 heading(std::cos(r0.pos.phi), std::sin(r0.pos.phi));
    const Vec2 to_tip(r0.pos.x_e - r0.pos.x_f, r0.pos.y_e - r0.pos.y_f);
    CHECK(heading.x() * to_tip.y() - heading.y() * to_tip.x() < 0.0);
}

TEST_CASE("uniform circular motion invariants") {
    const CircularTaskSpec spec = benchmark_task();
    for (int i = 0; i < 200; ++i) {
        const double t = uniform(0.0, spec.duration);
        const TaskReference r = reference_at(spec, t);
        CHECK(std::hypot(r.vel[0], r.vel[1]) == Catch::Approx(spec.speed).epsilon(1e-12));
        CHECK(std::hypot(r.acc[0], r.acc[1]) ==
              Catch::Approx(spec.speed * spec.speed / spec.radius).epsilon(1e-12));
    }
}

TEST_CASE("reference derivatives are consistent with finite differences") {
    const CircularTaskSpec spec = benchmark_task();
    const double h = 1e-4;
    for (int i = 0; i < 1000; ++i) {
        const double t = uniform(h, spec.duration - h);
        const TaskReference r = reference_at(spec, t);
        const TaskReference lo = reference_at(spec, t - h);
        const TaskReference hi = reference_at(spec, t + h);
        const Vec5 fd_vel = (hi.pos.vec() - lo.pos.vec()) / (2.0 * h);
        const Vec5 fd_acc = (hi.pos.vec() - 2.0 * r.pos.vec() + lo.pos.vec()) / (h * h);
        CHECK((fd_vel - r.vel).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((fd_acc - r.acc).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("path closes after one full period") {
    CircularTaskSpec spec = benchmark_task();
    const double period = 2.0 * std::numbers::pi * spec.radius / spec.speed;
    spec.duration = period + 1.0;
    const TaskReference a = reference_at(spec, 0.0);
    const TaskReference b = reference_at(spec, period);
    CHECK(std::hypot(b.pos.x_f - a.pos.x_f, b.pos.y_f - a.pos.y_f) < 1e-9);
}

TEST_CASE("heading reference is continuous") {
    const CircularTaskSpec spec = benchmark_task();
    double prev = reference_at(spec, 0.0).pos.phi;
    for (double t = 0.05; t <= spec.duration; t += 0.05) {
        const double phi = reference_at(spec, t).pos.phi;
        CHECK(std::abs(phi - prev) < 0.05);
        prev = phi;
    }
}

TEST_CASE("reference rejects out-of-range times") {
    const CircularTaskSpec spec = benchmark_task();
    CHECK_THROWS_AS(reference_at(spec, -0.1), OutOfRange);
    CHECK_THROWS_AS(reference_at(spec, spec.duration + 0.1), OutOfRange);
}

TEST_CASE("waypoint spline interpolates knots with consistent derivatives") {
    std::vector<double> times;
    std::vector<Vec5> pos;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.5 * i;
        times.push_back(t);
        Vec5 p;
        p << std::sin(t), std::cos(t), 0.1 * t, 2.0 + 0.3 * std::sin(0.5 * t),
            -1.0 + 0.2 * t;
        pos.push_back(p);
    }
    const WaypointTrajectory traj(times, pos);

    for (std::size_t i = 0; i < times.size(); ++i) {
        const TaskReference r = traj.at(times[i]);
        CHECK((r.pos.vec() - pos[i]).cwiseAbs().maxCoeff() < 1e-12);
    }

    const double h = 1e-5;
    for (int i = 0; i < 200; ++i) {
        const double t = uniform(h, times.back() - h);
        const TaskReference r = traj.at(t);
        const Vec5 fd_vel = (traj.at(t + h).pos.vec() - traj.at(t - h).pos.vec()) /
                            (2.0 * h);
        CHECK((fd_vel - r.vel).cwiseAbs().maxCoeff() < 1e-5);
    }

    CHECK_THROWS_AS(traj.at(-0.01), OutOfRange);
    CHECK_THROWS_AS(WaypointTrajectory({0.0, 0.0}, {Vec5::Zero(), Vec5::Zero()}),
                    ConfigError);
}
