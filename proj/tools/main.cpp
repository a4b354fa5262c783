// Batch CLI for the mobile-manipulator motion-control simulator.
//
//   mmctl run      one closed-loop run, per-tick CSV + summary
//   mmctl compare  the three controller modes on one configuration
//   mmctl sweep    inner-loop inertia tuning grid, ranked CSV
//
// Exit codes: 0 ok, 2 usage/config error, 3 arm singularity,
// 4 numerical divergence, 5 I/O error.

#include "mmctl/config.hpp"
#include "mmctl/csv.hpp"
#include "mmctl/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>

namespace {

using namespace mmctl;

struct CommonArgs {
    std::string config_path;
    std::string mode;
    std::string disturbance;
    double duration = -1.0;
    double dt = -1.0;
    std::string out;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_mode) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    if (with_mode)
        cmd->add_option("--mode", args.mode, "rac | rac_afc | rac_piafc");
    cmd->add_option("--disturbance", args.disturbance,
                    "none | vibration | impact");
    cmd->add_option("--duration", args.duration, "run length [s]");
    cmd->add_option("--dt", args.dt, "plant integration step [s]");
    cmd->add_option("--out", args.out, "output csv path");
    cmd->add_option("--seed", args.seed, "rng seed for sensor noise");
}

SimConfig build_config(const CommonArgs& args) {
    KeyValueConfig kv = args.config_path.empty()
                            ? KeyValueConfig{}
                            : KeyValueConfig::from_file(args.config_path);
    if (!args.mode.empty()) kv.set("controller.mode", args.mode);
    if (!args.disturbance.empty()) kv.set("disturbance.preset", args.disturbance);
    if (args.duration > 0.0) kv.set("sim.duration", std::to_string(args.duration));
    if (args.dt > 0.0) kv.set("sim.dt", std::to_string(args.dt));
    if (args.seed >= 0) kv.set("sim.seed", std::to_string(args.seed));
    if (!args.out.empty()) kv.set("sim.out", args.out);
    return load_sim_config(kv);
}

void print_summary(const char* label, const ErrorSummary& s) {
    std::printf("%-10s tip mean %.6g m, peak %.6g m, rms %.6g m | "
                "body mean %.6g m, peak %.6g m\n",
                label, s.tip_mean, s.tip_peak, s.tip_rms, s.body_mean,
                s.body_peak);
}

int cmd_run(const CommonArgs& args) {
    const SimConfig cfg = build_config(args);
    const RunResult res = run(cfg);
    print_summary("run:", summarize(res));
    if (!cfg.out_path.empty()) {
        write_csv(res, cfg.out_path);
        std::printf("wrote %zu rows to %s\n", res.rows(), cfg.out_path.c_str());
    }
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    const SimConfig cfg = build_config(args);
    const ModeComparison cmp = compare_modes(cfg);
    std::printf("full run:\n");
    print_summary("  rac", cmp.rac);
    print_summary("  rac_afc", cmp.rac_afc);
    print_summary("  rac_piafc", cmp.rac_piafc);
    std::printf("steady state (second half):\n");
    print_summary("  rac", cmp.rac_ss);
    print_summary("  rac_afc", cmp.rac_afc_ss);
    print_summary("  rac_piafc", cmp.rac_piafc_ss);

    const bool ordered = cmp.rac_piafc_ss.tip_mean < cmp.rac_afc_ss.tip_mean &&
                         cmp.rac_afc_ss.tip_mean < cmp.rac_ss.tip_mean;
    std::printf("steady-state ordering piafc < afc < rac: %s\n",
                ordered ? "yes" : "no");

    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw IoError("cannot open for writing: " + cfg.out_path);
        out << "metric,rac,rac_afc,rac_piafc\n";
        auto row = [&](const std::string& name, double a, double b, double c) {
            out << name << "," << detail::fmt(a) << "," << detail::fmt(b) << ","
                << detail::fmt(c) << "\n";
        };
        auto block = [&](const std::string& prefix, const ErrorSummary& a,
                         const ErrorSummary& b, const ErrorSummary& c) {
            row(prefix + "tip_mean", a.tip_mean, b.tip_mean, c.tip_mean);
            row(prefix + "tip_peak", a.tip_peak, b.tip_peak, c.tip_peak);
            row(prefix + "tip_rms", a.tip_rms, b.tip_rms, c.tip_rms);
            row(prefix + "body_mean", a.body_mean, b.body_mean, c.body_mean);
            row(prefix + "body_peak", a.body_peak, b.body_peak, c.body_peak);
        };
        block("", cmp.rac, cmp.rac_afc, cmp.rac_piafc);
        block("steady_", cmp.rac_ss, cmp.rac_afc_ss, cmp.rac_piafc_ss);
        std::printf("wrote %s\n", cfg.out_path.c_str());
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args, double wheel_from, double wheel_to,
              double wheel_step, double arm_from, double arm_to, double arm_step,
              unsigned threads) {
    SimConfig cfg = build_config(args);
    if (args.mode.empty()) cfg.controller.mode = ControlMode::RacAfc;

    const SweepResult res = sweep(cfg, grid_range(wheel_from, wheel_to, wheel_step),
                                  grid_range(arm_from, arm_to, arm_step), threads);
    int shown = 0;
    for (const auto& pt : res.ranked) {
        if (shown++ >= 5) break;
        if (pt.ok)
            std::printf("#%d wheel IN %.3g, arm IN %.3g -> tip mean %.6g m\n",
                        shown, pt.wheel_in, pt.arm_in, pt.summary.tip_mean);
        else
            std::printf("#%d wheel IN %.3g, arm IN %.3g -> failed: %s\n", shown,
                        pt.wheel_in, pt.arm_in, pt.error.c_str());
    }
    const std::string out = cfg.out_path.empty() ? "sweep.csv" : cfg.out_path;
    write_csv(res, out);
    std::printf("wrote %zu-point ranked table to %s\n", res.ranked.size(),
                out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonholonomic mobile manipulator motion-control simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, cmp_args, sweep_args;
    double wheel_from = 1.0, wheel_to = 2.8, wheel_step = 0.1;
    double arm_from = 0.01, arm_to = 0.05, arm_step = 0.01;
    unsigned threads = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "one closed-loop run");
    add_common(run_cmd, run_args, true);

    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "all three controller modes");
    add_common(cmp_cmd, cmp_args, false);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "inner-loop inertia tuning grid");
    add_common(sweep_cmd, sweep_args, true);
    sweep_cmd->add_option("--wheel-from", wheel_from, "wheel IN grid start");
    sweep_cmd->add_option("--wheel-to", wheel_to, "wheel IN grid end");
    sweep_cmd->add_option("--wheel-step", wheel_step, "wheel IN grid step");
    sweep_cmd->add_option("--arm-from", arm_from, "arm IN grid start");
    sweep_cmd->add_option("--arm-to", arm_to, "arm IN grid end");
    sweep_cmd->add_option("--arm-step", arm_step, "arm IN grid step");
    sweep_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_args);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_args);
        return cmd_sweep(sweep_args, wheel_from, wheel_to, wheel_step, arm_from,
                         arm_to, arm_step, threads);
    } catch (const mmctl::NearSingular& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const mmctl::NumericalBlowup& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const mmctl::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
