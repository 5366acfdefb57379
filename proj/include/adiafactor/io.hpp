#pragma once

// CSV / JSON serialization of library results.
//
// CSV files start with '#' preamble lines (schema version, the reproducing
// command, the full parameter echo as JSON), followed by a mandatory header
// row. Floating-point fields use 17 significant digits so values round-trip.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiafactor/encoding.hpp"
#include "adiafactor/errors.hpp"
#include "adiafactor/evolution.hpp"
#include "adiafactor/experiments.hpp"

namespace adiafactor::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw InvalidArgument("malformed number '" + text + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) throw InvalidArgument("malformed integer '" + text + "'");
    return v;
}

inline std::int64_t parse_i64(const std::string& text) {
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) throw InvalidArgument("malformed integer '" + text + "'");
    return v;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    std::string command;
    std::uint64_t N = 21;
    std::vector<unsigned> sizes;
    unsigned samples = 10;
    double g = 30.0;
    unsigned r = 2;
    double total_time = 0.168;
    unsigned steps = 5;
    double tau = 0.028;
    ProbabilityWindow window;
    std::uint64_t seed = 2010;
    double alpha = 0.05;
    unsigned trace_points = 6;
    EvolutionMode mode = EvolutionMode::continuous;
    bool extended = false;
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<double> rescale;
    SizeAxis axis = SizeAxis::total_qubits;
    unsigned levels = 0;       ///< spectrum: 0 means all 2^n
    unsigned grid_points = 101;
    unsigned max_evaluations = 60;
    double initial_time = 1e-3;
    unsigned threads = 0;

    /// Validates parameters for the chosen command before any computation.
    void validate() const {
        auto fail = [](const std::string& what) { throw InvalidArgument(what); };
        if (format != "csv" && format != "json") fail("format must be csv or json");
        if (!(g > 0.0)) fail("--g must be positive");
        if (r < 1) fail("--r must be at least 1");
        if (rescale && !(*rescale > 0.0)) fail("--rescale factor must be positive");
        if (command == "encode" || command == "spectrum" || command == "evolve" || command == "showcase") {
            factor_layout(N);  // throws InvalidInstance
        }
        if (command == "evolve" || command == "showcase") {
            if (!(alpha > 0.0 && alpha <= 0.5)) fail("--alpha must lie in (0, 0.5]");
            if (!(total_time > 0.0)) fail("--time must be positive");
            if (!(tau > 0.0)) fail("--tau must be positive");
            if (trace_points < 2) fail("--trace-points must be at least 2");
        }
        if (command == "spectrum") {
            if (factor_layout(N).n > kMaxDenseQubits) fail("spectrum needs n <= " + std::to_string(kMaxDenseQubits));
            if (grid_points < 2) fail("--grid must be at least 2");
        }
        if (command == "scaling") {
            window.validate();
            if (sizes.empty()) fail("--n must name at least one size");
            if (samples < 1) fail("--samples must be at least 1");
            if (!(alpha > 0.0 && alpha <= 0.5)) fail("--alpha must lie in (0, 0.5]");
            if (max_evaluations < 1) fail("--budget must be at least 1");
        }
    }
};

inline std::string sizes_to_string(const std::vector<unsigned>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? "," : "") + std::to_string(sizes[i]);
    return out;
}

/// The parameter echo embedded in every output file.
inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    if (cfg.command == "scaling") {
        j["sizes"] = cfg.sizes;
        j["size_axis"] = to_string(cfg.axis);
        j["samples"] = cfg.samples;
        j["window"] = {cfg.window.lo, cfg.window.hi};
        j["seed"] = cfg.seed;
        j["max_evaluations"] = cfg.max_evaluations;
        j["initial_time"] = cfg.initial_time;
        j["extended"] = cfg.extended;
    } else {
        j["N"] = cfg.N;
    }
    j["g"] = cfg.g;
    j["r"] = cfg.r;
    if (cfg.command == "evolve" || cfg.command == "showcase") {
        j["mode"] = to_string(cfg.mode);
        j["time"] = cfg.total_time;
        j["steps"] = cfg.steps;
        j["tau"] = cfg.tau;
        j["trace_points"] = cfg.trace_points;
    }
    if (cfg.command == "spectrum" || cfg.command == "showcase") {
        j["grid_points"] = cfg.grid_points;
        j["levels"] = cfg.levels;
    }
    j["alpha"] = cfg.alpha;
    j["energy_rescaling"] = cfg.rescale ? json(*cfg.rescale) : json(nullptr);
    j["raw_units"] = !cfg.rescale.has_value();
    j["format"] = cfg.format;
    return j;
}

/// Command line that regenerates an output.
inline std::string reproduce_command(const RunConfig& cfg) {
    std::ostringstream cmd;
    cmd << "adiafactor " << cfg.command;
    if (cfg.command == "scaling") {
        cmd << " --n " << sizes_to_string(cfg.sizes) << " --samples " << cfg.samples << " --window "
            << format_double(cfg.window.lo) << "," << format_double(cfg.window.hi) << " --seed " << cfg.seed
            << " --budget " << cfg.max_evaluations << " --initial-time " << format_double(cfg.initial_time);
        if (cfg.axis == SizeAxis::input_bits) cmd << " --axis input-bits";
    } else {
        cmd << " --n " << cfg.N;
    }
    cmd << " --g " << format_double(cfg.g) << " --r " << cfg.r;
    if (cfg.command == "evolve" || cfg.command == "showcase") {
        if (cfg.command == "evolve") cmd << " --mode " << to_string(cfg.mode);
        cmd << " --time " << format_double(cfg.total_time) << " --steps "
            << cfg.steps << " --tau " << format_double(cfg.tau) << " --trace-points " << cfg.trace_points;
    }
    if (cfg.command == "spectrum" || cfg.command == "showcase") {
        cmd << " --grid " << cfg.grid_points << " --levels " << cfg.levels;
    }
    cmd << " --alpha " << format_double(cfg.alpha);
    if (cfg.rescale) cmd << " --rescale " << format_double(*cfg.rescale);
    cmd << " --format " << cfg.format;
    return cmd.str();
}

/// Adds schema version, parameter echo and reproducing command to a JSON document.
inline json with_metadata(json body, const RunConfig& cfg) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["reproduce"] = reproduce_command(cfg);
    doc["params"] = config_to_json(cfg);
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    return doc;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> preamble;  ///< comment lines without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw InvalidArgument("CSV has no column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
    for (const auto& line : table.preamble) out << "# " << line << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && line.rfind("#", 0) == 0) {
            table.preamble.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != table.header.size()) throw InvalidArgument("CSV row width does not match header");
            table.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw InvalidArgument("CSV has no header row");
    return table;
}

inline std::vector<std::string> csv_preamble(const RunConfig& cfg) {
    return {"schema_version=" + std::to_string(kSchemaVersion), "reproduce: " + reproduce_command(cfg),
            "params: " + config_to_json(cfg).dump()};
}

/// Parameter echo recovered from a CSV preamble.
inline json preamble_params(const CsvTable& table) {
    for (const auto& line : table.preamble) {
        if (line.rfind("params: ", 0) == 0) return json::parse(line.substr(8));
    }
    throw InvalidArgument("CSV preamble carries no parameter echo");
}

// ---------------------------------------------------------------------------
// Encoding artifacts

inline CsvTable layout_csv(const FactorInstance& inst, const RunConfig& cfg) {
    return {csv_preamble(cfg), {"n_x", "n_y", "n"},
            {{std::to_string(inst.n_x), std::to_string(inst.n_y), std::to_string(inst.n)}}};
}

inline CsvTable costs_csv(const CostDiagonal& diag, const RunConfig& cfg) {
    CsvTable t{csv_preamble(cfg), {"index", "label", "x", "y", "cost"}, {}};
    for (BasisIndex j = 0; j < diag.costs.size(); ++j) {
        const FactorPair f = decode_basis(j, diag.instance);
        t.rows.push_back({std::to_string(j), basis_label(j, diag.instance.n), std::to_string(f.x), std::to_string(f.y),
                          std::to_string(diag.costs[j])});
    }
    return t;
}

/// Nonzero Pauli-Z terms: mask as MSB-first bit string (qubit 1 leftmost) and as integer.
inline CsvTable pauli_csv(const PauliZExpansion& pz, const RunConfig& cfg) {
    CsvTable t{csv_preamble(cfg), {"mask", "mask_bits", "term", "coefficient"}, {}};
    for (const auto& [mask, coeff] : pz.terms()) {
        t.rows.push_back({std::to_string(mask), basis_label(mask, pz.n), term_label(mask, pz.n), std::to_string(coeff)});
    }
    return t;
}

inline PauliZExpansion pauli_from_csv(const CsvTable& t, unsigned n) {
    PauliZExpansion pz{n, std::vector<std::int64_t>(std::size_t{1} << n, 0)};
    const auto mask_col = t.column("mask");
    const auto coeff_col = t.column("coefficient");
    for (const auto& row : t.rows) {
        const auto mask = parse_u64(row[mask_col]);
        if (mask >= pz.numerators.size()) throw InvalidArgument("Pauli mask out of range");
        pz.numerators[mask] = parse_i64(row[coeff_col]) * (std::int64_t{1} << n);
    }
    return pz;
}

inline json encode_json(const CostDiagonal& diag, const PauliZExpansion& pz) {
    json j;
    j["layout"] = {{"N", diag.instance.N}, {"ell", diag.instance.ell}, {"n_x", diag.instance.n_x},
                   {"n_y", diag.instance.n_y}, {"n", diag.instance.n}};
    j["costs"] = diag.costs;
    json terms = json::array();
    for (const auto& [mask, coeff] : pz.terms()) {
        terms.push_back({{"mask", mask}, {"mask_bits", basis_label(mask, pz.n)}, {"term", term_label(mask, pz.n)},
                         {"coefficient", coeff}});
    }
    j["pauli_z"] = terms;
    return j;
}

// ---------------------------------------------------------------------------
// Spectrum and trajectories

inline CsvTable spectrum_csv(const SpectrumSweep& sweep, const RunConfig& cfg) {
    CsvTable t{csv_preamble(cfg), {"s"}, {}};
    const std::size_t levels = sweep.levels.empty() ? 0 : sweep.levels.front().size();
    for (std::size_t k = 0; k < levels; ++k) t.header.push_back("e" + std::to_string(k + 1));
    for (std::size_t i = 0; i < sweep.s.size(); ++i) {
        std::vector<std::string> row{format_double(sweep.s[i])};
        for (double e : sweep.levels[i]) row.push_back(format_double(e));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline SpectrumSweep spectrum_from_csv(const CsvTable& t) {
    SpectrumSweep sweep;
    for (const auto& row : t.rows) {
        sweep.s.push_back(parse_double(row.at(0)));
        std::vector<double> levels;
        for (std::size_t k = 1; k < row.size(); ++k) levels.push_back(parse_double(row[k]));
        sweep.levels.push_back(std::move(levels));
    }
    return sweep;
}

inline json spectrum_json(const SpectrumSweep& sweep) {
    return json{{"s", sweep.s}, {"levels", sweep.levels}};
}

inline CsvTable populations_header(const RunConfig& cfg) {
    return {csv_preamble(cfg), {"mode", "snapshot", "time", "index", "label", "probability"}, {}};
}

inline void append_populations(CsvTable& t, EvolutionMode mode, const Trajectory& traj, unsigned n) {
    for (const auto& snap : traj.snapshots) {
        for (BasisIndex j = 0; j < snap.populations.size(); ++j) {
            t.rows.push_back({to_string(mode), std::to_string(snap.index), format_double(snap.time), std::to_string(j),
                              basis_label(j, n), format_double(snap.populations[j])});
        }
    }
}

inline json trajectory_json(const Trajectory& traj, unsigned n) {
    json snaps = json::array();
    for (const auto& snap : traj.snapshots) {
        snaps.push_back({{"snapshot", snap.index}, {"time", snap.time}, {"populations", snap.populations},
                         {"success_probability", snap.success_probability}});
    }
    json labels = json::array();
    for (BasisIndex j = 0; j < (BasisIndex{1} << n); ++j) labels.push_back(basis_label(j, n));
    return json{{"labels", labels}, {"steps", traj.steps}, {"dt", traj.dt}, {"norm_drift", traj.norm_drift},
                {"snapshots", snaps}};
}

// ---------------------------------------------------------------------------
// Scaling study

inline json fit_to_json(const QuadraticFit& fit) {
    return json{{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"rmse", fit.rmse}, {"r_squared", fit.r_squared}};
}

inline QuadraticFit fit_from_json(const json& j) {
    return {j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>(), j.at("rmse").get<double>(),
            j.at("r_squared").get<double>()};
}

inline std::string size_column(SizeAxis axis) { return axis == SizeAxis::total_qubits ? "n" : "ell"; }

inline CsvTable scaling_csv(const ScalingReport& report, const RunConfig& cfg) {
    CsvTable t{csv_preamble(cfg), {size_column(report.config.axis), "N", "T_star", "achieved_probability", "status"}, {}};
    for (const auto& rec : report.records) {
        t.rows.push_back({std::to_string(rec.size), std::to_string(rec.N), format_double(rec.T_star),
                          format_double(rec.achieved_probability), to_string(rec.status)});
    }
    return t;
}

inline RecordStatus parse_status(const std::string& text) {
    for (auto s : {RecordStatus::ok, RecordStatus::window_unreachable, RecordStatus::numerical_failure,
                   RecordStatus::deadline_exceeded}) {
        if (to_string(s) == text) return s;
    }
    throw InvalidArgument("unknown record status '" + text + "'");
}

inline std::vector<ScalingRecord> scaling_records_from_csv(const CsvTable& t) {
    std::vector<ScalingRecord> out;
    for (const auto& row : t.rows) {
        ScalingRecord rec;
        rec.size = static_cast<unsigned>(parse_u64(row.at(0)));
        rec.N = parse_u64(row.at(1));
        rec.T_star = parse_double(row.at(2));
        rec.achieved_probability = parse_double(row.at(3));
        rec.status = parse_status(row.at(4));
        out.push_back(rec);
    }
    return out;
}

inline json scaling_records_json(const ScalingReport& report) {
    json recs = json::array();
    for (const auto& rec : report.records) {
        recs.push_back({{size_column(report.config.axis), rec.size}, {"N", rec.N}, {"qubits", rec.qubits},
                        {"T_star", rec.T_star}, {"achieved_probability", rec.achieved_probability},
                        {"evaluations", rec.evaluations}, {"status", to_string(rec.status)}, {"message", rec.message}});
    }
    return recs;
}

inline json fit_report_json(const ScalingReport& report) {
    json means = json::array();
    for (const auto& m : report.means) {
        means.push_back({{size_column(report.config.axis), m.size}, {"requested", m.requested},
                         {"available", m.available}, {"succeeded", m.succeeded}, {"mean_T_star", m.mean_T_star},
                         {"shortfall", m.requested > m.available}});
    }
    json j;
    j["size_axis"] = to_string(report.config.axis);
    j["fit"] = report.fit ? fit_to_json(*report.fit) : json(nullptr);
    j["means"] = means;
    return j;
}

// ---------------------------------------------------------------------------
// Files

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

inline void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ostringstream out;
    write_csv(out, table);
    write_text(path, out.str());
}

inline void write_json_file(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return read_csv(in);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return json::parse(in);
}

}  // namespace adiafactor::io
