// adiafactor: command-line front-end for the adiabatic factoring simulator.
//
//   adiafactor encode   --n 21 [--out DIR] [--format csv|json]
//   adiafactor spectrum --n 21 [--g 30] [--grid 101] [--levels K]
//   adiafactor evolve   --n 21 --mode continuous|discrete [--time T | --steps M --tau TAU]
//   adiafactor showcase [--n 21 --g 30 --r 2 --time 0.168 --steps 5 --tau 0.028]
//   adiafactor scaling  --n 7..12 [--samples 10] [--window 0.12,0.13] [--seed S] [--extended]
//
// Exit status: 0 success, 2 invalid instance or configuration, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adiafactor/adiafactor.hpp"

namespace fs = std::filesystem;
using namespace adiafactor;
using io::json;
using io::RunConfig;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

std::vector<unsigned> parse_sizes(const std::string& text) {
    std::vector<unsigned> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto lo = io::parse_u64(text.substr(0, dots));
        const auto hi = io::parse_u64(text.substr(dots + 2));
        if (lo > hi) throw InvalidArgument("size range '" + text + "' is empty");
        for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<unsigned>(v));
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(static_cast<unsigned>(io::parse_u64(piece)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

ProbabilityWindow parse_window(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--window expects lo,hi");
    return {io::parse_double(text.substr(0, comma)), io::parse_double(text.substr(comma + 1))};
}

std::string out_path(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); }

void run_encode(const RunConfig& cfg) {
    const FactorInstance inst = factor_layout(cfg.N);
    const CostDiagonal diag = build_cost_diagonal(inst);
    const PauliZExpansion pz = pauli_z_expand(diag);
    if (cfg.format == "json") {
        io::write_json_file(out_path(cfg, "encode.json"), io::with_metadata(io::encode_json(diag, pz), cfg));
    } else {
        io::write_csv_file(out_path(cfg, "layout.csv"), io::layout_csv(inst, cfg));
        io::write_csv_file(out_path(cfg, "costs.csv"), io::costs_csv(diag, cfg));
        io::write_csv_file(out_path(cfg, "pauli_z.csv"), io::pauli_csv(pz, cfg));
    }
    std::cout << "N=" << inst.N << " n_x=" << inst.n_x << " n_y=" << inst.n_y << " n=" << inst.n << '\n';
    for (const auto& [mask, coeff] : pz.terms()) std::cout << "  " << term_label(mask, inst.n) << ' ' << coeff << '\n';
}

CostScaling scaling_of(const RunConfig& cfg) { return CostScaling{cfg.rescale}; }

void run_spectrum(const RunConfig& cfg) {
    const CostDiagonal diag = build_cost_diagonal(factor_layout(cfg.N));
    const Hamiltonian h = make_hamiltonian(diag, cfg.g, scaling_of(cfg));
    const std::size_t levels = cfg.levels == 0 ? h.dimension() : cfg.levels;
    const SpectrumSweep sweep = spectrum_sweep(h, cfg.grid_points, levels);
    if (cfg.format == "json") {
        io::write_json_file(out_path(cfg, "spectrum.json"), io::with_metadata(io::spectrum_json(sweep), cfg));
    } else {
        io::write_csv_file(out_path(cfg, "spectrum.csv"), io::spectrum_csv(sweep, cfg));
    }
    std::cout << "ground energy at s=1: " << sweep.levels.back().front() << '\n';
}

EvolutionParams evolution_params(const RunConfig& cfg, const CostDiagonal& diag, EvolutionMode mode) {
    EvolutionParams p;
    p.g = cfg.g;
    p.diag = diag;
    p.schedule = mode == EvolutionMode::continuous ? Schedule::continuous(cfg.total_time, cfg.r)
                                                   : Schedule::discrete(cfg.steps, cfg.tau, cfg.r);
    p.rk4_safety = cfg.alpha;
    p.trace_points = cfg.trace_points;
    p.scaling = scaling_of(cfg);
    return p;
}

json outcome_json(const Trajectory& traj, const CostDiagonal& diag, BasisIndex target) {
    return json{{"target_index", target},
                {"target_label", basis_label(target, diag.instance.n)},
                {"fidelity", fidelity(traj.final_state, target)},
                {"overlap", overlap(traj.final_state, target)},
                {"success_probability", success_probability(traj.final_state, diag)},
                {"norm_drift", traj.norm_drift},
                {"steps", traj.steps},
                {"dt", traj.dt}};
}

void run_evolve(const RunConfig& cfg) {
    const CostDiagonal diag = build_cost_diagonal(factor_layout(cfg.N));
    const BasisIndex target = canonical_solution(diag);
    const Trajectory traj = evolve(evolution_params(cfg, diag, cfg.mode));
    const unsigned n = diag.instance.n;
    if (cfg.format == "json") {
        io::write_json_file(out_path(cfg, "trajectory.json"), io::with_metadata(io::trajectory_json(traj, n), cfg));
    } else {
        auto table = io::populations_header(cfg);
        io::append_populations(table, cfg.mode, traj, n);
        io::write_csv_file(out_path(cfg, "populations.csv"), table);
    }
    const json outcome = outcome_json(traj, diag, target);
    io::write_json_file(out_path(cfg, "summary.json"), io::with_metadata(json{{to_string(cfg.mode), outcome}}, cfg));
    std::cout << to_string(cfg.mode) << ": fidelity=" << outcome["fidelity"].get<double>()
              << " success=" << outcome["success_probability"].get<double>() << '\n';
}

void run_showcase(const RunConfig& cfg) {
    ShowcaseConfig sc;
    sc.N = cfg.N;
    sc.g = cfg.g;
    sc.r = cfg.r;
    sc.total_time = cfg.total_time;
    sc.steps = cfg.steps;
    sc.tau = cfg.tau;
    sc.grid_points = cfg.grid_points;
    sc.trace_points = cfg.trace_points;
    sc.rk4_safety = cfg.alpha;
    const ShowcaseBundle bundle = showcase(sc);
    const unsigned n = bundle.instance.n;
    const CostDiagonal diag = build_cost_diagonal(bundle.instance);

    SpectrumSweep sweep = bundle.spectrum;
    if (cfg.levels != 0) {
        for (auto& lv : sweep.levels) lv.resize(std::min<std::size_t>(lv.size(), cfg.levels));
    }
    if (cfg.format == "json") {
        io::write_json_file(out_path(cfg, "spectrum.json"), io::with_metadata(io::spectrum_json(sweep), cfg));
        json traces{{"continuous", io::trajectory_json(bundle.continuous, n)},
                    {"discrete", io::trajectory_json(bundle.discrete, n)}};
        io::write_json_file(out_path(cfg, "populations.json"), io::with_metadata(traces, cfg));
    } else {
        io::write_csv_file(out_path(cfg, "spectrum.csv"), io::spectrum_csv(sweep, cfg));
        auto table = io::populations_header(cfg);
        io::append_populations(table, EvolutionMode::continuous, bundle.continuous, n);
        io::append_populations(table, EvolutionMode::discrete, bundle.discrete, n);
        io::write_csv_file(out_path(cfg, "populations.csv"), table);
    }
    json summary;
    summary["N"] = bundle.instance.N;
    summary["layout"] = {{"n_x", bundle.instance.n_x}, {"n_y", bundle.instance.n_y}, {"n", n}};
    summary["target_index"] = bundle.target;
    summary["target_label"] = basis_label(bundle.target, n);
    summary["fidelity"] = bundle.trotter_fidelity;
    summary["overlap"] = bundle.trotter_overlap;
    summary["success_probability"] = bundle.trotter_success;
    summary["continuous"] = outcome_json(bundle.continuous, diag, bundle.target);
    summary["discrete"] = outcome_json(bundle.discrete, diag, bundle.target);
    io::write_json_file(out_path(cfg, "summary.json"), io::with_metadata(summary, cfg));
    std::cout << "trotter fidelity |<" << basis_label(bundle.target, n) << "|psi>|^2 = " << bundle.trotter_fidelity
              << " (overlap " << bundle.trotter_overlap << ")\n"
              << "continuous fidelity = " << bundle.continuous_fidelity << '\n';
}

int run_scaling(const RunConfig& cfg, std::optional<double> deadline_minutes) {
    ScalingConfig sc;
    sc.sizes = cfg.sizes;
    sc.samples_per_size = cfg.samples;
    sc.g = cfg.g;
    sc.r = cfg.r;
    sc.window = cfg.window;
    sc.seed = cfg.seed;
    sc.axis = cfg.axis;
    sc.threads = cfg.threads;
    sc.search.rk4_safety = cfg.alpha;
    sc.search.max_evaluations = cfg.max_evaluations;
    sc.search.initial_time = cfg.initial_time;
    sc.search.scaling = scaling_of(cfg);
    if (deadline_minutes) {
        sc.search.deadline = std::chrono::steady_clock::now() +
                             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double, std::ratio<60>>(*deadline_minutes));
    }
    const ScalingReport report = run_scaling_study(sc);
    if (cfg.format == "json") {
        io::write_json_file(out_path(cfg, "scaling.json"),
                            io::with_metadata(json{{"records", io::scaling_records_json(report)}}, cfg));
    } else {
        io::write_csv_file(out_path(cfg, "scaling.csv"), io::scaling_csv(report, cfg));
    }
    io::write_json_file(out_path(cfg, "fit.json"), io::with_metadata(io::fit_report_json(report), cfg));

    bool any_ok = false;
    for (const auto& rec : report.records) any_ok = any_ok || rec.status == RecordStatus::ok;
    for (const auto& m : report.means) {
        std::cout << io::size_column(cfg.axis) << '=' << m.size << " instances=" << m.available << '/' << m.requested
                  << " ok=" << m.succeeded << " mean_T*=" << m.mean_T_star << '\n';
    }
    if (report.fit) {
        std::cout << "fit: " << report.fit->a << " + " << report.fit->b << " n + " << report.fit->c
                  << " n^2, R^2=" << report.fit->r_squared << '\n';
    }
    return any_ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic quantum factoring simulator"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string n_text = "21";
    std::string window_text = "0.12,0.13";
    std::string mode_text = "continuous";
    std::string axis_text = "total-qubits";
    std::optional<double> rescale;
    std::optional<double> deadline_minutes;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", n_text, "N to factor (scaling: qubit counts, e.g. 7..12 or 7,9,11)");
        sub->add_option("--g", cfg.g, "transverse field strength")->capture_default_str();
        sub->add_option("--r", cfg.r, "interpolation exponent s = (t/T)^r")->capture_default_str();
        sub->add_option("--alpha", cfg.alpha, "RK4 safety factor, dt = alpha / (n g + max cost)")->capture_default_str();
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
        sub->add_option("--rescale", rescale, "normalize costs to max = FACTOR (not the raw-unit model)");
    };
    auto add_evolution = [&](CLI::App* sub) {
        sub->add_option("--time", cfg.total_time, "total evolution time T (continuous)")->capture_default_str();
        sub->add_option("--steps", cfg.steps, "discrete steps M (M + 1 unitaries)")->capture_default_str();
        sub->add_option("--tau", cfg.tau, "discrete step duration")->capture_default_str();
        sub->add_option("--trace-points", cfg.trace_points, "continuous snapshots incl. endpoints")->capture_default_str();
    };

    auto* encode = app.add_subcommand("encode", "register layout, cost diagonal and Pauli-Z expansion");
    add_common(encode);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of H(s) on an s grid");
    add_common(spectrum_cmd);
    spectrum_cmd->add_option("--grid", cfg.grid_points, "s grid points")->capture_default_str();
    spectrum_cmd->add_option("--levels", cfg.levels, "lowest levels to keep (0 = all)")->capture_default_str();

    auto* evolve_cmd = app.add_subcommand("evolve", "one evolution with population trace");
    add_common(evolve_cmd);
    add_evolution(evolve_cmd);
    evolve_cmd->add_option("--mode", mode_text, "continuous or discrete")->capture_default_str();

    auto* showcase_cmd = app.add_subcommand("showcase", "N = 21 energy diagram, population traces and fidelity");
    add_common(showcase_cmd);
    add_evolution(showcase_cmd);
    showcase_cmd->add_option("--grid", cfg.grid_points, "s grid points")->capture_default_str();
    showcase_cmd->add_option("--levels", cfg.levels, "lowest levels to keep (0 = all)")->capture_default_str();

    auto* scaling_cmd = app.add_subcommand("scaling", "window-time scaling study with quadratic fit");
    add_common(scaling_cmd);
    scaling_cmd->add_option("--samples", cfg.samples, "instances per size")->capture_default_str();
    scaling_cmd->add_option("--window", window_text, "success probability window lo,hi")->capture_default_str();
    scaling_cmd->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    scaling_cmd->add_flag("--extended", cfg.extended, "full sweep: sizes 7..16, 50 instances each");
    scaling_cmd->add_option("--axis", axis_text, "size axis: total-qubits or input-bits")->capture_default_str();
    scaling_cmd->add_option("--budget", cfg.max_evaluations, "evolutions per instance")->capture_default_str();
    scaling_cmd->add_option("--initial-time", cfg.initial_time, "first T probed")->capture_default_str();
    scaling_cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    scaling_cmd->add_option("--deadline-minutes", deadline_minutes, "stop unfinished instances after this long");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.rescale = rescale;
        cfg.mode = parse_mode(mode_text);
        if (cfg.command == "showcase") cfg.mode = EvolutionMode::continuous;
        if (cfg.command == "scaling") {
            if (axis_text == "total-qubits") {
                cfg.axis = SizeAxis::total_qubits;
            } else if (axis_text == "input-bits") {
                cfg.axis = SizeAxis::input_bits;
            } else {
                throw InvalidArgument("--axis must be total-qubits or input-bits");
            }
            cfg.window = parse_window(window_text);
            const bool sizes_given = scaling_cmd->count("--n") > 0;
            const bool samples_given = scaling_cmd->count("--samples") > 0;
            if (cfg.extended) {
                if (!sizes_given) n_text = "7..16";
                if (!samples_given) cfg.samples = 50;
            } else if (!sizes_given) {
                n_text = "7..12";
            }
            cfg.sizes = parse_sizes(n_text);
        } else {
            cfg.N = io::parse_u64(n_text);
        }
        cfg.validate();
        fs::create_directories(cfg.out_dir);

        if (cfg.command == "encode") run_encode(cfg);
        if (cfg.command == "spectrum") run_spectrum(cfg);
        if (cfg.command == "evolve") run_evolve(cfg);
        if (cfg.command == "showcase") run_showcase(cfg);
        if (cfg.command == "scaling") return run_scaling(cfg, deadline_minutes);
        return 0;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DeadlineExceeded& e) {
        std::cerr << "deadline exceeded: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InvalidInstance& e) {
        std::cerr << "invalid instance: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    }
}
