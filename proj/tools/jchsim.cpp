// jchsim: command-line front end for the two-ion Jaynes-Cummings-Hubbard
// simulator. Reads flat `key = value` configs, runs one experiment and emits
// plot-ready CSV/JSON. See README.md for the key reference.

#include "jch/config.hpp"
#include "jch/io.hpp"
#include "jch/observables.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace jch;

namespace {

struct RunContext {
    Config cfg;
    std::string out_dir;
    std::string format;  // csv | json
    std::uint64_t seed = 0;
    double detection_scale = 1.0;

    std::string out_path(const std::string& stem) const {
        return (fs::path(out_dir) / (stem + "." + format)).string();
    }

    Table make_table(std::vector<std::string> columns,
                     const std::string& command) const {
        Table t;
        t.columns = std::move(columns);
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(cfg.content_hash()));
        t.metadata = {{"command", command},
                      {"config_hash", hash},
                      {"seed", std::to_string(seed)}};
        return t;
    }
};

NoiseModel noise_from(const RunContext& ctx) {
    NoiseModel noise;
    noise.sigma_detuning = hz_to_rad(ctx.cfg.get_double("noise.sigma_hz", 0.0));
    noise.n_trajectories = static_cast<int>(ctx.cfg.get_int("noise.trajectories", 200));
    noise.seed = ctx.seed;
    return noise;
}

int n_max_from(const RunContext& ctx) {
    return static_cast<int>(ctx.cfg.get_int("numerics.n_max", 5));
}

double step_from(const RunContext& ctx) {
    return us_to_s(ctx.cfg.get_double("numerics.step_us", 0.25));
}

/// Hopping rate in rad/s: explicit pulse.kappa_khz wins, otherwise derived
/// from the trap block.
double kappa_from(const RunContext& ctx, double fallback_khz) {
    if (ctx.cfg.has("pulse.kappa_khz"))
        return khz_to_rad(ctx.cfg.get_double("pulse.kappa_khz"));
    if (ctx.cfg.has("trap.omega_x_mhz") || ctx.cfg.has("trap.omega_z_mhz")) {
        TrapConfig trap;
        trap.omega_x = mhz_to_rad(ctx.cfg.get_double("trap.omega_x_mhz", 2.1));
        trap.omega_z = mhz_to_rad(ctx.cfg.get_double("trap.omega_z_mhz", 0.17));
        return hopping_rate(trap);
    }
    return khz_to_rad(fallback_khz);
}

SweepParams sweep_params_from(const RunContext& ctx) {
    SweepParams p;
    p.delta_start = khz_to_rad(ctx.cfg.get_double("sweep.delta_start_khz", -41.0));
    p.delta_end = khz_to_rad(ctx.cfg.get_double("sweep.delta_end_khz", 59.0));
    p.duration = us_to_s(ctx.cfg.get_double("pulse.duration_us", 960.0));
    p.g_peak = 0.5 * khz_to_rad(ctx.cfg.get_double("pulse.two_g_khz", 14.0));
    p.edge_factor = ctx.cfg.get_double("sweep.edge_factor", 0.29);
    p.kappa = kappa_from(ctx, 6.0);
    p.n_samples = static_cast<int>(ctx.cfg.get_int("pulse.samples", 240));
    return p;
}

void check_unused_keys(const Config& cfg) {
    const auto unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown config key(s):";
        for (const auto& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }
}

// ---------------------------------------------------------------------------

int cmd_dynamics(RunContext& ctx) {
    DynamicsParams p;
    p.g = 0.5 * khz_to_rad(ctx.cfg.get_double("pulse.two_g_khz", 12.0));
    p.kappa = kappa_from(ctx, 5.4);
    p.duration = us_to_s(ctx.cfg.get_double("pulse.duration_us", 1000.0));
    p.detuning_offset = khz_to_rad(ctx.cfg.get_double("pulse.detuning_khz", 0.0));
    p.n_samples = static_cast<int>(ctx.cfg.get_int("pulse.samples", 200));
    const Schedule schedule = dynamics_schedule(p);
    const NoiseModel noise = noise_from(ctx);
    const int n_max = n_max_from(ctx);
    const double step = step_from(ctx);
    check_unused_keys(ctx.cfg);

    const Basis basis = build_basis({2, n_max, std::nullopt});
    const StateVector psi0 = basis_ket(basis, BasisState{{0, 0}, {0, 0}});
    const auto [n1, na1, np1] = number_operators(basis, 1);
    const auto [n2, na2, np2] = number_operators(basis, 2);
    const std::vector<Operator> ops = {na1, na2};
    const Trajectory traj = evolve_noisy(schedule, psi0, noise, step, ops);

    Table table = ctx.make_table({"t_us", "pe_ion1", "pe_ion2"}, "dynamics");
    for (size_t i = 0; i < traj.times.size(); ++i)
        table.add_row({s_to_us(traj.times[i]),
                       ctx.detection_scale * traj.expectations[i][0],
                       ctx.detection_scale * traj.expectations[i][1]});
    write_table(table, ctx.out_path("dynamics"), ctx.format);
    return 0;
}

int cmd_sweep(RunContext& ctx) {
    const SweepParams p = sweep_params_from(ctx);
    const Schedule schedule = sweep_schedule(p);
    const NoiseModel noise = noise_from(ctx);
    const int n_max = n_max_from(ctx);
    const double step = step_from(ctx);
    check_unused_keys(ctx.cfg);
    const Basis basis = build_basis({2, n_max, std::nullopt});
    const StateVector psi_start = state_atI(basis);
    const StateVector psi_target = state_phSF(basis);
    const auto [n1, na1, np1] = number_operators(basis, 1);
    const auto [n2, na2, np2] = number_operators(basis, 2);

    const Trajectory traj = evolve(schedule, psi_start, step);
    const EigenTrack track = instantaneous_spectrum(schedule, schedule.grid, n_max);
    const LeakageSeries leak = ground_state_leakage(traj, track);

    // Noisy ensemble averages for the population columns only; the
    // state-resolved quantities come from the noiseless run.
    std::optional<Trajectory> noisy;
    if (noise.sigma_detuning > 0.0) {
        const std::vector<Operator> ops = {na1, na2};
        noisy = evolve_noisy(schedule, psi_start, noise, step, ops);
    }

    Table table = ctx.make_table(
        {"t_us", "pe_ion1", "pe_ion2", "fid_atI", "fid_phSF", "leakage", "mean_a1",
         "mean_p1", "var_a1", "var_p1", "var_total1", "cov_ap1", "bound_lower",
         "bound_upper"},
        "sweep");
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const StateVector& psi = traj.states[i];
        const VarianceReport r = variance_report(psi, 1);
        const double pe1 = noisy ? noisy->expectations[i][0] : expectation(psi, na1);
        const double pe2 = noisy ? noisy->expectations[i][1] : expectation(psi, na2);
        table.add_row({s_to_us(traj.times[i]), ctx.detection_scale * pe1,
                       ctx.detection_scale * pe2, fidelity(psi, psi_start),
                       fidelity(psi, psi_target), leak.leakage[i], r.mean_a,
                       r.mean_p, r.var_a, r.var_p, r.var_total_exact, r.cov_ap,
                       r.bound_lower, r.bound_upper});
    }
    write_table(table, ctx.out_path("sweep"), ctx.format);
    return 0;
}

int cmd_eigen(RunContext& ctx) {
    const SweepParams p = sweep_params_from(ctx);
    const Schedule schedule = sweep_schedule(p);
    const int n_max = n_max_from(ctx);
    check_unused_keys(ctx.cfg);

    const EigenTrack track = instantaneous_spectrum(schedule, schedule.grid, n_max);
    const Basis& basis = track.basis;
    const int dim = basis.size();

    // Caption reference states for the lowest three tracks at both endpoints.
    const auto ket = [&](int a1, int a2, int ph1, int ph2, double amp, Vector& v) {
        v[basis.index_of(BasisState{{a1, a2}, {ph1, ph2}})] += amp;
    };
    const double s2 = 1.0 / std::sqrt(2.0);
    Vector sym = Vector::Zero(dim), asym = Vector::Zero(dim);
    // (|ge> +- |eg>)/sqrt(2) (x) a_r^dag |00>
    for (const auto& [sign, v] : {std::pair<double, Vector*>{1.0, &sym},
                                  std::pair<double, Vector*>{-1.0, &asym}}) {
        ket(0, 1, 1, 0, s2 * s2, *v);
        ket(0, 1, 0, 1, -s2 * s2, *v);
        ket(1, 0, 1, 0, sign * s2 * s2, *v);
        ket(1, 0, 0, 1, -sign * s2 * s2, *v);
    }
    Vector com_rock = Vector::Zero(dim);  // |gg> (x) a_c^dag a_r^dag |00>
    ket(0, 0, 2, 0, s2, com_rock);
    ket(0, 0, 0, 2, -s2, com_rock);
    Vector com2 = Vector::Zero(dim);  // |gg> (x) a_c^dag^2 |00> / sqrt(2)
    ket(0, 0, 2, 0, 0.5, com2);
    ket(0, 0, 1, 1, s2, com2);
    ket(0, 0, 0, 2, 0.5, com2);

    const std::vector<std::pair<std::string, Vector>> references = {
        {"atI", state_atI(basis).amplitudes},
        {"phSF", state_phSF(basis).amplitudes},
        {"sym_atomic_rock", sym},
        {"asym_atomic_rock", asym},
        {"com_rock", com_rock},
        {"com2", com2},
    };
    const auto label_for = [&](const Vector& vec) -> std::string {
        for (const auto& [name, ref] : references)
            if (std::norm(ref.dot(vec)) > 0.9) return name;
        return "mixed";
    };

    Table table = ctx.make_table({"t_us", "e1_khz", "e2_khz", "e3_khz", "e4_khz",
                                  "e5_khz", "e6_khz", "e7_khz", "e8_khz"},
                                 "eigen");
    for (int k = 0; k < 3; ++k) {
        const std::string start = label_for(track.eigenvectors.front().col(k));
        const std::string end = label_for(track.eigenvectors.back().col(k));
        table.metadata.emplace_back("track" + std::to_string(k + 1),
                                    start + " -> " + end);
    }
    for (size_t i = 0; i < track.times.size(); ++i) {
        std::vector<double> row{s_to_us(track.times[i])};
        for (int k = 0; k < dim; ++k)
            row.push_back(rad_to_khz(track.eigenvalues[i][k]));
        table.add_row(std::move(row));
    }
    write_table(table, ctx.out_path("eigen"), ctx.format);
    return 0;
}

int cmd_variances(RunContext& ctx) {
    const SweepParams p = sweep_params_from(ctx);
    const Schedule schedule = sweep_schedule(p);
    const int n_max = n_max_from(ctx);
    check_unused_keys(ctx.cfg);

    // Curves from exact instantaneous ground states along the ramp.
    const EigenTrack track =
        instantaneous_spectrum(schedule, schedule.grid, n_max);
    Table table = ctx.make_table(
        {"t_us", "mean_a1", "mean_p1", "var_a1", "var_p1", "var_total1",
         "cov_ap1", "bound_lower", "bound_upper", "n_com", "n_rock"},
        "variances");
    for (size_t i = 0; i < track.times.size(); ++i) {
        const StateVector ground(track.basis, track.eigenvectors[i].col(0));
        const VarianceReport r = variance_report(ground, 1);
        const auto [n_com, n_rock] = collective_occupations(ground);
        table.add_row({s_to_us(track.times[i]), r.mean_a, r.mean_p, r.var_a,
                       r.var_p, r.var_total_exact, r.cov_ap, r.bound_lower,
                       r.bound_upper, n_com, n_rock});
    }
    write_table(table, ctx.out_path("variances"), ctx.format);
    return 0;
}

SpectroscopyProbe probe_from(const RunContext& ctx) {
    SpectroscopyProbe probe;
    probe.rabi = khz_to_rad(ctx.cfg.get_double("spectrum.rabi_khz", 2.0));
    probe.pulse = us_to_s(ctx.cfg.get_double("spectrum.pulse_us", 50.0));
    probe.linewidth = khz_to_rad(ctx.cfg.get_double("spectrum.linewidth_khz", 2.0));
    probe.omega_com = khz_to_rad(ctx.cfg.get_double("spectrum.omega_com_khz", 2100.0));
    probe.omega_rock =
        khz_to_rad(ctx.cfg.get_double("spectrum.omega_rock_khz", 2093.1));
    probe.n_points = static_cast<int>(ctx.cfg.get_int("spectrum.points", 400));
    return probe;
}

int cmd_spectrum(RunContext& ctx) {
    const double nbar_com = ctx.cfg.get_double("spectrum.nbar_com", 0.15);
    const double nbar_rock = ctx.cfg.get_double("spectrum.nbar_rock", 1.58);
    const SpectroscopyProbe probe = probe_from(ctx);
    check_unused_keys(ctx.cfg);

    for (const auto side : {SidebandSide::Red, SidebandSide::Blue}) {
        const SpectrumData data = sideband_spectrum(nbar_com, nbar_rock, probe, side);
        Table table = ctx.make_table({"detuning_khz", "population"}, "spectrum");
        for (size_t i = 0; i < data.detuning.size(); ++i)
            table.add_row({rad_to_khz(data.detuning[i]), data.population[i]});
        const std::string stem =
            side == SidebandSide::Red ? "spectrum_red" : "spectrum_blue";
        write_table(table, ctx.out_path(stem), ctx.format);
    }
    return 0;
}

int cmd_fit(RunContext& ctx) {
    const SpectroscopyProbe probe = probe_from(ctx);
    struct Stage {
        std::string name;
        std::string red_path, blue_path;
    };
    std::vector<Stage> stages;
    for (const std::string name : {"before", "after"}) {
        const std::string red_key = "fit." + name + "_red_csv";
        const std::string blue_key = "fit." + name + "_blue_csv";
        if (ctx.cfg.has(red_key) || ctx.cfg.has(blue_key))
            stages.push_back(
                {name, ctx.cfg.get_string(red_key), ctx.cfg.get_string(blue_key)});
    }
    check_unused_keys(ctx.cfg);
    if (stages.empty())
        throw ConfigError("fit: provide fit.before_*/fit.after_* CSV paths");

    // peaks.csv: stage (0 = before, 1 = after), side (0 = red, 1 = blue),
    // mode (0 = COM, 1 = rocking)
    Table peaks = ctx.make_table({"stage", "side", "mode", "center_khz", "height",
                                  "width_khz", "residual_rms", "converged"},
                                 "fit");
    Table nbars = ctx.make_table(
        {"stage", "mode", "red_height", "blue_height", "nbar"}, "fit");

    for (size_t si = 0; si < stages.size(); ++si) {
        const Stage& stage = stages[si];
        double heights[2][2];  // [side][mode]
        for (int side = 0; side < 2; ++side) {
            const std::string& path = side == 0 ? stage.red_path : stage.blue_path;
            const SpectrumData data = read_spectrum_csv(path);
            const double sign = side == 0 ? -1.0 : 1.0;
            const double peak_guess =
                *std::max_element(data.population.begin(), data.population.end());
            const std::vector<GaussianPeak> init = {
                {sign * probe.omega_com, peak_guess, probe.linewidth},
                {sign * probe.omega_rock, peak_guess, probe.linewidth}};
            const SpectrumFit fit = fit_sideband_spectrum(data, init);
            for (int mode = 0; mode < 2; ++mode) {
                const GaussianPeak& pk = fit.peaks[mode];
                heights[side][mode] = std::max(0.0, pk.height);
                peaks.add_row({double(si), double(side), double(mode),
                               rad_to_khz(pk.center), pk.height,
                               rad_to_khz(pk.width), fit.residual_rms,
                               fit.converged ? 1.0 : 0.0});
            }
        }
        for (int mode = 0; mode < 2; ++mode) {
            const double p_red = heights[0][mode];
            const double p_blue = heights[1][mode];
            const double nbar =
                p_blue > p_red ? nbar_from_ratio(p_red, p_blue)
                               : std::numeric_limits<double>::quiet_NaN();
            nbars.add_row({double(si), double(mode), p_red, p_blue, nbar});
        }
    }
    write_table(peaks, ctx.out_path("fit_peaks"), ctx.format);
    write_table(nbars, ctx.out_path("fit_nbar"), ctx.format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-ion Jaynes-Cummings-Hubbard simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;

    const std::map<std::string, int (*)(RunContext&)> handlers = {
        {"dynamics", cmd_dynamics}, {"sweep", cmd_sweep},
        {"eigen", cmd_eigen},       {"variances", cmd_variances},
        {"spectrum", cmd_spectrum}, {"fit", cmd_fit},
    };
    for (const auto& [name, fn] : handlers) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override noise.seed");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunContext ctx{Config::parse_file(config_path), out_dir, "csv", 0, 1.0};
        const std::string experiment =
            ctx.cfg.get_string("experiment", command);
        if (experiment != command)
            throw ConfigError("config experiment = " + experiment +
                              " does not match subcommand " + command);
        ctx.format = ctx.cfg.get_string("output.format", "csv");
        if (ctx.format != "csv" && ctx.format != "json")
            throw ConfigError("output.format must be csv or json");
        if (ctx.cfg.has("output.path")) out_dir = ctx.cfg.get_string("output.path");
        ctx.out_dir = out_dir;
        ctx.seed = ctx.cfg.get_u64("noise.seed", 0);
        if (seed_override) ctx.seed = *seed_override;
        ctx.detection_scale = ctx.cfg.get_double("report.detection_scale", 1.0);
        fs::create_directories(ctx.out_dir);
        return handlers.at(command)(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
