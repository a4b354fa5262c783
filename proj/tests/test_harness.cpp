#include "mmctl/config.hpp"
#include "mmctl/csv.hpp"
#include "mmctl/sweep.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace mmctl;

namespace {

SimConfig short_config() {
    SimConfig cfg;
    cfg.trajectory.circular = benchmark_task();
    cfg.duration = 1.0;
    cfg.trajectory.circular.duration = cfg.duration;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("run produces one row per control tick") {
    SimConfig cfg = short_config();
    cfg.controller.mode = ControlMode::Rac;
    const RunResult res = run(cfg);
    CHECK(res.rows() == 1001);
    CHECK(res.t.front() == 0.0);
    CHECK(res.t.back() == Catch::Approx(1.0));
}

TEST_CASE("identical config and seed give bit-identical output files") {
    SimConfig cfg = short_config();
    cfg.controller.mode = ControlMode::RacPiafc;
    cfg.controller.measurement.accel_noise = Vec4::Constant(0.02);
    cfg.disturbance = expand_preset(DisturbancePreset::Vibration);
    cfg.seed = 99;

    TempFile a("mmctl_det_a.csv"), b("mmctl_det_b.csv");
    write_csv(run(cfg), a.path);
    write_csv(run(cfg), b.path);
    CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("summarize on synthetic series") {
    RunResult res;
    for (int i = 0; i < 100; ++i) {
        res.t.push_back(i * 1e-3);
        TaskVector ref{1.0, 2.0, 0.3, 4.0, 5.0};
        res.reference.push_back(ref);
        res.actual.push_back(ref);
        res.tau.push_back({});
        res.tau_d.push_back({});
        res.q_hat.push_back({});
        res.integral.push_back(Vec4::Zero());
    }

    const ErrorSummary zero = summarize(res);
    CHECK(zero.tip_mean == 0.0);
    CHECK(zero.tip_peak == 0.0);
    CHECK(zero.mean_abs.maxCoeff() == 0.0);

    // Constant 1 mm offset on xE.
    for (auto& a : res.actual) a.x_e += 1e-3;
    const ErrorSummary offset = summarize(res);
    CHECK(offset.tip_mean == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(offset.tip_peak == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(offset.rms[3] == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(offset.peak[3] >= offset.rms[3]);

    CHECK_THROWS_AS(summarize(RunResult{}), ConfigError);
}

TEST_CASE("csv round trip") {
    SimConfig cfg = short_config();
    cfg.duration = 0.2;
    cfg.trajectory.circular.duration = 0.2;
    cfg.disturbance = expand_preset(DisturbancePreset::Vibration);
    const RunResult res = run(cfg);

    TempFile tmp("mmctl_roundtrip.csv");
    write_csv(res, tmp.path);

    const std::string text = slurp(tmp.path);
    CHECK(text.substr(0, text.find('\n')) == kRunCsvHeader);

    const RunResult back = read_run_csv(tmp.path);
    REQUIRE(back.rows() == res.rows());
    for (std::size_t i = 0; i < res.rows(); i += 7) {
        CHECK(back.t[i] == Catch::Approx(res.t[i]).epsilon(1e-8));
        CHECK(back.actual[i].x_e ==
              Catch::Approx(res.actual[i].x_e).epsilon(1e-8).margin(1e-12));
        CHECK(back.tau[i].joint1 ==
              Catch::Approx(res.tau[i].joint1).epsilon(1e-8).margin(1e-12));
    }
}

TEST_CASE("config validation guards") {
    SimConfig cfg = short_config();
    cfg.duration = 0.0005;  // shorter than one control step
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    SimConfig cfg2 = short_config();
    cfg2.dt = 3e-4;  // not an integer divisor of control_dt
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);

    SimConfig cfg3 = short_config();
    cfg3.dt = 2e-3;  // plant step coarser than the control step
    CHECK_THROWS_AS(cfg3.validate(), ConfigError);
}

TEST_CASE("key-value config parsing") {
    const KeyValueConfig kv = KeyValueConfig::from_string(
        "# comment line\n"
        "robot.r = 0.1   # trailing comment\n"
        "sim.duration = 2.5\n"
        "controller.mode = rac_afc\n"
        "disturbance.preset = vibration\n"
        "gains.in.wheel_l = 2.0\n");
    CHECK(kv.get_double("robot.r", 0.0) == 0.1);
    CHECK(kv.get_string("controller.mode", "") == "rac_afc");

    const SimConfig cfg = load_sim_config(kv);
    CHECK(cfg.robot.r == 0.1);
    CHECK(cfg.duration == 2.5);
    CHECK(cfg.controller.mode == ControlMode::RacAfc);
    CHECK(cfg.controller.inner.in[0] == 2.0);
    CHECK(cfg.controller.inner.in[1] == 2.4);  // untouched channel keeps default
    CHECK(cfg.disturbance.vibrations.size() == 4);
    CHECK(cfg.trajectory.circular.duration == 2.5);

    CHECK_THROWS_AS(KeyValueConfig::from_string("just some words\n"), ConfigError);
    CHECK_THROWS_AS(
        load_sim_config(KeyValueConfig::from_string("robot.r = fast\n")),
        ConfigError);
    CHECK_THROWS_AS(
        load_sim_config(KeyValueConfig::from_string("controller.mode = pid\n")),
        ConfigError);
}

TEST_CASE("explicit disturbance components from config") {
    const KeyValueConfig kv = KeyValueConfig::from_string(
        "vibration.1.channel = joint2\n"
        "vibration.1.frequency = 3.2\n"
        "vibration.1.amplitude = 0.3\n"
        "impact.1.channel = wheel_r\n"
        "impact.1.start = 2.0\n"
        "impact.1.magnitude = 4.0\n");
    const SimConfig cfg = load_sim_config(kv);
    REQUIRE(cfg.disturbance.vibrations.size() == 1);
    CHECK(cfg.disturbance.vibrations[0].channel == Channel::Joint2);
    CHECK(cfg.disturbance.vibrations[0].frequency == 3.2);
    REQUIRE(cfg.disturbance.impacts.size() == 1);
    CHECK(cfg.disturbance.impacts[0].channel == Channel::WheelR);
    CHECK(cfg.disturbance.impacts[0].magnitude == 4.0);
}

TEST_CASE("piafc with zero integral and afc proportional matches afc end to end") {
    SimConfig cfg = short_config();
    cfg.duration = 2.0;
    cfg.trajectory.circular.duration = 2.0;
    cfg.disturbance = expand_preset(DisturbancePreset::Vibration);

    cfg.controller.mode = ControlMode::RacAfc;
    const ErrorSummary afc = summarize(run(cfg));

    cfg.controller.mode = ControlMode::RacPiafc;
    cfg.controller.inner.in_p = cfg.controller.inner.in;
    cfg.controller.inner.in_i = Vec4::Zero();
    const ErrorSummary piafc = summarize(run(cfg));

    CHECK(afc.tip_mean == piafc.tip_mean);
    CHECK(afc.tip_peak == piafc.tip_peak);
    CHECK(afc.body_rms == piafc.body_rms);
    CHECK((afc.mean_abs - piafc.mean_abs).norm() == 0.0);
}

TEST_CASE("single-point sweep equals run plus summarize") {
    SimConfig cfg = short_config();
    cfg.duration = 2.0;
    cfg.trajectory.circular.duration = 2.0;
    cfg.controller.mode = ControlMode::RacAfc;
    cfg.disturbance = expand_preset(DisturbancePreset::Vibration);

    const SweepResult res = sweep(cfg, {2.4}, {0.0925});
    REQUIRE(res.ranked.size() == 1);
    REQUIRE(res.ranked[0].ok);

    SimConfig direct = cfg;
    direct.controller.inner.in = Vec4(2.4, 2.4, 0.0925, 0.0925);
    direct.controller.inner.in_p = direct.controller.inner.in;
    const ErrorSummary expect = summarize(run(direct), cfg.duration / 2.0);
    CHECK(res.ranked[0].summary.tip_mean == expect.tip_mean);
}

TEST_CASE("published tuning grid has 19 wheel points") {
    CHECK(grid_range(1.0, 2.8, 0.1).size() == 19);
    CHECK(grid_range(0.01, 0.05, 0.01).size() == 5);
}

TEST_CASE("sweep ranking is deterministic and records failures") {
    SimConfig cfg = short_config();
    cfg.duration = 1.0;
    cfg.trajectory.circular.duration = 1.0;
    cfg.controller.mode = ControlMode::RacAfc;

    // 40.0 is far beyond the stable range and must fail without killing the sweep.
    const std::vector<double> wheels = {2.0, 2.4, 40.0};
    const SweepResult a = sweep(cfg, wheels, {0.0925});
    const SweepResult b = sweep(cfg, wheels, {0.0925});
    REQUIRE(a.ranked.size() == 3);

    int failures = 0;
    for (const auto& pt : a.ranked) {
        if (!pt.ok) {
            ++failures;
            CHECK(!pt.error.empty());
            CHECK(pt.wheel_in == 40.0);
        }
    }
    CHECK(failures == 1);
    CHECK(!a.ranked.back().ok);  // failures rank last

    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
        CHECK(a.ranked[i].wheel_in == b.ranked[i].wheel_in);
        CHECK(a.ranked[i].summary.tip_mean == b.ranked[i].summary.tip_mean);
    }

    TempFile tmp("mmctl_sweep.csv");
    write_csv(a, tmp.path);
    const std::string text = slurp(tmp.path);
    CHECK(text.find("rank,wheel_in,arm_in,status") == 0);
    CHECK(text.find("failed") != std::string::npos);
}

TEST_CASE("write_csv failures carry the path") {
    const RunResult res = run(short_config());
    try {
        write_csv(res, "/nonexistent_dir_zzz/out.csv");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent_dir_zzz/out.csv") !=
              std::string::npos);
    }
}

TEST_CASE("waypoint task drives the closed loop") {
    SimConfig cfg;
    cfg.duration = 1.0;

    // Gentle straight-line task with a reachable tip offset.
    std::vector<double> times;
    std::vector<Vec5> rows;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.2 * i;
        Vec5 p;
        p << 0.05 * t, 0.0, 0.0, 0.3 + 0.05 * t, -0.35;
        times.push_back(t);
        rows.push_back(p);
    }
    cfg.trajectory.waypoints.emplace(times, rows);

    const RunResult res = run(cfg);
    CHECK(res.rows() == 1001);
    // The loop keeps tracking: the tip error stays bounded.
    CHECK(summarize(res, 0.5).tip_peak < 0.05);
}
