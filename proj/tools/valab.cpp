// valab: batch runner for faces, valuations, continuity probes and cosine-transform spectra.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "valab/error.hpp"
#include "valab/faces.hpp"
#include "valab/kernels.hpp"
#include "valab/transforms.hpp"
#include "valab/valuation.hpp"
#include "valab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace valab;

namespace {

void diagnostic(const std::string& status, const std::string& kind, const std::string& message) {
    std::cerr << json{{"status", status}, {"kind", kind}, {"message", message}}.dump() << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path.string() + "': " + e.what());
    }
}

// Replaces {"file": "x.json"} objects by the file contents, relative to the config directory.
void inline_files(json& j, const fs::path& base) {
    if (j.is_object()) {
        if (j.size() == 1 && j.contains("file") && j.at("file").is_string()) {
            const fs::path p = base / j.at("file").get<std::string>();
            if (!fs::exists(p)) throw ValidationError("referenced file does not exist: " + p.string());
            j = read_json(p);
            inline_files(j, p.parent_path());
            return;
        }
        for (auto& [key, value] : j.items()) inline_files(value, base);
    } else if (j.is_array()) {
        for (auto& value : j) inline_files(value, base);
    }
}

struct Context {
    std::string command;
    json config;
    fs::path out;
    std::vector<std::string> warnings;

    void warn(const std::string& message) {
        warnings.push_back(message);
        diagnostic("warning", command, message);
    }

    const json& require(const char* key) const {
        if (!config.contains(key)) throw ValidationError(command + ": config is missing '" + key + "'");
        return config.at(key);
    }

    PhiOptions phi_options() const {
        PhiOptions o;
        o.method = parse_method(config.at("method").get<std::string>());
        o.samples = config.at("samples").get<long>();
        o.seed = config.at("seed").get<std::uint64_t>();
        if (o.samples < 1) throw ValidationError("samples must be positive");
        return o;
    }

    void write(const json& result, const std::string& csv) const {
        fs::create_directories(out);
        const json report{{"command", command}, {"version", kVersion}, {"config", config},
                          {"warnings", warnings}, {"result", result}};
        const fs::path jp = out / (command + ".json"), cp = out / (command + ".csv");
        std::ofstream(jp) << report.dump(2) << "\n";
        std::ofstream(cp) << csv;
        if (!fs::exists(jp) || !fs::exists(cp)) throw ValidationError("cannot write to '" + out.string() + "'");
        std::cout << jp.string() << "\n" << cp.string() << "\n";
    }
};

std::string csv_number(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

void cmd_faces(Context& c) {
    const Polytope p = polytope_from_json(c.require("polytope"));
    c.config["k"] = c.config.value("k", 1);
    const int k = c.config.at("k").get<int>();
    if (k < 0 || k >= p.ambient_dim())
        throw ValidationError("faces: k must lie in [0, " + std::to_string(p.ambient_dim() - 1) + "]");
    const PhiOptions o = c.phi_options();
    const std::vector<Face> faces = enumerate_faces(p, k);
    if (faces.empty()) c.warn("polytope has no " + std::to_string(k) + "-faces; the table is empty");

    json rows = json::array();
    std::string csv = "face_id,k,kvol,measure,measure_error,method,vertex_ids\n";
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const NormalRegion r = exterior_angle(p, faces[i]);
        const Estimate m = region_measure(r, o.method, o.samples, derive_seed(o.seed, i));
        std::string ids;
        for (int v : faces[i].vertex_ids) ids += (ids.empty() ? "" : " ") + std::to_string(v);
        csv += std::to_string(i) + "," + std::to_string(k) + "," + csv_number(faces[i].kvol) + "," + csv_number(m.value) +
               "," + csv_number(m.error) + "," + to_string(m.method) + "," + ids + "\n";
        json row = faces[i].to_json();
        row["face_id"] = i;
        row["measure"] = m.value;
        row["measure_error"] = m.error;
        row["measure_method"] = to_string(m.method);
        rows.push_back(row);
    }
    c.write({{"polytope", p.to_json()}, {"k", k}, {"faces", rows}}, csv);
}

void cmd_phi(Context& c) {
    const Kernel f = kernel_from_json(c.require("kernel"));
    const Polytope p = polytope_from_json(c.require("polytope"));
    const ValuationResult r = phi(f, p, c.phi_options());
    json result = r.to_json();
    result["kernel"] = f.spec;
    c.write(result, r.to_csv());
}

void cmd_probe(Context& c) {
    const Kernel f = kernel_from_json(c.require("kernel"));
    const PolytopeSequence seq = sequence_from_json(c.require("sequence"));
    ProbeOptions o;
    o.phi = c.phi_options();
    c.config["extrapolation"] = c.config.value("extrapolation", std::string("richardson"));
    o.extrapolation = parse_extrapolation(c.config.at("extrapolation").get<std::string>());
    if (c.config.contains("members")) {
        o.members = c.config.at("members").get<std::vector<int>>();
    } else {
        c.config["m_max"] = c.config.value("m_max", 64);
        o.members = default_members(seq.family(), c.config.at("m_max").get<int>());
        c.config["members"] = o.members;
    }
    if (c.config.contains("reference_sequence")) o.reference = sequence_from_json(c.config.at("reference_sequence"));
    const ProbeReport r = continuity_probe(f, seq, o);
    if (r.verdict == "inconclusive") c.warn("probe verdict is inconclusive (margin " + csv_number(r.margin) + ")");
    c.write(r.to_json(), r.to_csv());
}

SphereFunction sphere_function_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        const double v = j.value("value", 1.0);
        return {3, [v](const Vec&) { return v; }, true, "constant " + csv_number(v)};
    }
    if (kind == "power") {
        // (v . axis)^exponent
        const auto a = j.value("axis", std::vector<double>{0, 0, 1});
        if (a.size() != 3) throw ValidationError("power: axis must have 3 entries");
        const Vec axis = Eigen::Map<const Vec>(a.data(), 3).normalized();
        const int p = j.value("exponent", 2);
        if (p < 0) throw ValidationError("power: exponent must be non-negative");
        return {3, [axis, p](const Vec& v) { return std::pow(v.dot(axis), p); }, p % 2 == 0,
                "power " + std::to_string(p)};
    }
    if (kind == "smap") {
        const Kernel f = kernel_from_json(j.at("kernel"));
        f.require_dims(3, 1);
        const GrassFunction s = smap(f);
        return {3, [s](const Vec& v) { Mat e(3, 1); e.col(0) = v; return s(e); }, true, "S(" + f.label + ")"};
    }
    throw ValidationError("unknown sphere function kind '" + kind + "'");
}

void cmd_cosine(Context& c) {
    const bool has_fn = c.config.contains("function"), has_kernel = c.config.contains("kernel");
    if (!has_fn && !has_kernel && !c.config.contains("multipliers"))
        throw ValidationError("cosine: config needs at least one of 'function', 'kernel', 'multipliers'");
    c.config["max_degree"] = c.config.value("max_degree", 8);
    c.config["multipliers"] = c.config.value("multipliers", true);
    c.config["leakage_tol"] = c.config.value("leakage_tol", 1e-6);
    const int degree = c.config.at("max_degree").get<int>();
    if (degree < 0 || degree > 16) throw ValidationError("cosine: max_degree must lie in [0, 16]");

    json result = json::object();
    std::vector<std::vector<std::string>> cols(degree + 1);
    std::string header = "degree";
    auto column = [&](const std::string& name, const std::function<std::string(int)>& cell) {
        header += "," + name;
        for (int d = 0; d <= degree; ++d) cols[d].push_back(cell(d));
    };

    if (c.config.at("multipliers").get<bool>()) {
        const MultiplierTable t = cosine_multipliers(degree, c.config.at("leakage_tol").get<double>());
        result["multipliers"] = t.to_json();
        auto find = [&t](int d) { return std::find(t.degrees.begin(), t.degrees.end(), d) - t.degrees.begin(); };
        column("multiplier", [&](int d) {
            const auto i = static_cast<std::size_t>(find(d));
            return i < t.degrees.size() ? csv_number(t.multipliers[i]) : std::string();
        });
        column("leakage", [&](int d) {
            const auto i = static_cast<std::size_t>(find(d));
            return i < t.degrees.size() ? csv_number(t.leakage[i]) : std::string();
        });
    }
    if (has_fn) {
        const SphereFunction g = sphere_function_from_json(c.config.at("function"));
        if (!g.even) throw ValidationError("cosine: input function '" + g.label + "' is odd; the cosine transform needs an even function");
        const HarmonicSpectrum in = harmonic_project(g, degree);
        const HarmonicSpectrum out = harmonic_project(cosine_transform(g), degree);
        result["function"] = {{"label", g.label}, {"spectrum", in.to_json()}, {"transform_spectrum", out.to_json()}};
        column("input_energy", [&](int d) { return csv_number(in.degree_energy(d)); });
        column("transform_energy", [&](int d) { return csv_number(out.degree_energy(d)); });
    }
    if (has_kernel) {
        const Kernel f = kernel_from_json(c.config.at("kernel"));
        const RangeDiagnostic r = range_diagnostic(f, degree);
        result["range_diagnostic"] = r.to_json();
        result["range_diagnostic"]["kernel"] = f.spec;
        column("s_energy", [&](int d) { return csv_number(r.s_spectrum.degree_energy(d)); });
    }
    std::string csv = header + "\n";
    for (int d = 0; d <= degree; ++d) {
        csv += std::to_string(d);
        for (const std::string& cell : cols[d]) csv += "," + cell;
        csv += "\n";
    }
    c.write(result, csv);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"valab: polytope valuations from kernels on flag spaces"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    long samples = 0;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"faces", "face table with k-volumes and exterior-angle measures"},
        {"phi", "evaluate a valuation on a polytope"},
        {"probe", "Hausdorff continuity probe along a polytope sequence"},
        {"cosine", "cosine-transform multipliers, spectra and range diagnostics"}};
    std::vector<CLI::Option*> seed_opts, sample_opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        seed_opts.push_back(sub->add_option("--seed", seed, "master seed (overrides the config)"));
        sample_opts.push_back(sub->add_option("--samples", samples, "Monte Carlo samples per face (overrides the config)"));
        sub->add_option("--out", out_dir, "output directory (default: config 'out' or '.')");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        diagnostic("error", "usage", e.what());
        return 2;
    }

    Context c;
    c.command = app.get_subcommands().front()->get_name();
    try {
        const fs::path cfg_path(config_path);
        c.config = read_json(cfg_path);
        if (!c.config.is_object()) throw ValidationError("config must be a JSON object");
        inline_files(c.config, cfg_path.parent_path());
        bool seed_set = false, samples_set = false;
        for (auto* o : seed_opts) seed_set = seed_set || o->count() > 0;
        for (auto* o : sample_opts) samples_set = samples_set || o->count() > 0;
        if (seed_set) c.config["seed"] = seed;
        if (samples_set) c.config["samples"] = samples;
        c.config["seed"] = c.config.value("seed", std::uint64_t{0});
        c.config["samples"] = c.config.value("samples", 100000L);
        c.config["method"] = c.config.value("method", std::string("auto"));
        c.out = !out_dir.empty() ? fs::path(out_dir) : fs::path(c.config.value("out", std::string(".")));

        if (c.command == "faces") cmd_faces(c);
        else if (c.command == "phi") cmd_phi(c);
        else if (c.command == "probe") cmd_probe(c);
        else cmd_cosine(c);
        return 0;
    } catch (const ValidationError& e) {
        diagnostic("error", "validation", e.what());
        return 2;
    } catch (const json::exception& e) {
        diagnostic("error", "validation", e.what());
        return 2;
    } catch (const NumericalError& e) {
        diagnostic("error", "numerical", e.what());
        return 3;
    } catch (const std::exception& e) {
        diagnostic("error", "internal", e.what());
        return 1;
    }
}
