#include "cfrg/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cfrg/errors.hpp"

namespace cfrg {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ValidationError("config: " + what); }

const json& member(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing key '") + key + "'");
    return *it;
}

double as_number(const json& j, const char* key) {
    const json& v = member(j, key);
    if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) bad(std::string("'") + key + "' must be a number");
    return it->get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) bad(std::string("'") + key + "' must be an integer");
    return it->get<int>();
}

bool bool_or(const json& j, const char* key, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) bad(std::string("'") + key + "' must be a boolean");
    return it->get<bool>();
}

std::array<int, 3> as_wave_vector(const json& v, const char* key) {
    if (!v.is_array() || v.size() != 3) bad(std::string("'") + key + "' must be 3 integers");
    std::array<int, 3> k{};
    for (size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number_integer()) bad(std::string("'") + key + "' must be 3 integers");
        k[i] = v[i].get<int>();
    }
    return k;
}

std::vector<double> as_number_list(const json& v, const char* key) {
    if (!v.is_array() || v.empty()) bad(std::string("'") + key + "' must be a nonempty array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number()) bad(std::string("'") + key + "' must contain numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

SymTensor3 parse_sym_tensor(const json& j) {
    static const char* keys[6] = {"xx", "xy", "xz", "yy", "yz", "zz"};
    SymTensor3 t;
    for (int c = 0; c < 6; ++c) t.c[static_cast<size_t>(c)] = number_or(j, keys[c], 0.0);
    return t;
}

PsiConfig parse_psi(const json& j) {
    PsiConfig psi;
    psi.constant = number_or(j, "constant", 1.0);
    auto it = j.find("modes");
    if (it != j.end()) {
        if (!it->is_array()) bad("'psi.modes' must be an array");
        for (const json& m : *it) {
            HarmonicMode mode;
            mode.k = as_wave_vector(member(m, "k"), "k");
            mode.amplitude = as_number(m, "amplitude");
            mode.phase = number_or(m, "phase", 0.0);
            psi.modes.push_back(mode);
        }
    }
    return psi;
}

SigmaConfig parse_sigma(const json& j) {
    SigmaConfig sig;
    auto cit = j.find("constant");
    if (cit != j.end()) sig.constant = parse_sym_tensor(*cit);
    auto mit = j.find("modes");
    if (mit != j.end()) {
        if (!mit->is_array()) bad("'sigma.modes' must be an array");
        for (const json& m : *mit) {
            TTWaveMode mode;
            mode.k = as_wave_vector(member(m, "k"), "k");
            mode.eps = parse_sym_tensor(member(m, "eps"));
            mode.phase = number_or(m, "phase", 0.0);
            sig.modes.push_back(mode);
        }
    }
    return sig;
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) bad("top level must be an object");
    auto sit = j.find("schema");
    if (sit == j.end() || !sit->is_string() || sit->get<std::string>() != "cfrg-config/1")
        bad("'schema' must be \"cfrg-config/1\"");

    RunConfig cfg;
    cfg.seed = static_cast<unsigned>(int_or(j, "seed", 0));

    if (auto it = j.find("lattice"); it != j.end()) {
        cfg.lattice.n = int_or(*it, "n", 16);
        cfg.lattice.length = number_or(*it, "length", 1.0);
    }

    if (auto it = j.find("background"); it != j.end()) {
        const json& b = *it;
        std::string mode = member(b, "mode").get<std::string>();
        if (mode == "flat") {
            cfg.background.flat = true;
            cfg.background.r = number_or(b, "r", 0.0);
        } else if (mode == "conformally_flat") {
            cfg.background.flat = false;
            cfg.background.psi = parse_psi(member(b, "psi"));
        } else {
            bad("'background.mode' must be \"flat\" or \"conformally_flat\"");
        }
    }

    if (auto it = j.find("sigma"); it != j.end() && !it->is_null())
        cfg.sigma = parse_sigma(*it);
    cfg.tau = number_or(j, "tau", 0.0);

    if (auto it = j.find("solver"); it != j.end()) {
        const json& s = *it;
        if (auto m = s.find("method"); m != s.end()) {
            std::string name = m->get<std::string>();
            if (name == "monotone")
                cfg.solver.method = SolveMethod::Monotone;
            else if (name == "newton")
                cfg.solver.method = SolveMethod::Newton;
            else
                bad("'solver.method' must be \"monotone\" or \"newton\"");
        }
        cfg.solver.tol = number_or(s, "tol", 0.0);
        if (cfg.solver.tol < 0.0) bad("'solver.tol' must be >= 0");
        cfg.solver.max_iter = int_or(s, "max_iter", 400);
        if (cfg.solver.max_iter < 1) bad("'solver.max_iter' must be >= 1");
        cfg.solver.restarts = int_or(s, "restarts", 2);
        if (cfg.solver.restarts < 0) bad("'solver.restarts' must be >= 0");
    }

    if (auto it = j.find("sweep"); it != j.end()) {
        const json& s = *it;
        cfg.sweep.c1 = number_or(s, "c1", 4.0);
        cfg.sweep.c2 = number_or(s, "c2", 4.0);
        cfg.sweep.samples_per_axis = int_or(s, "samples_per_axis", 9);
        if (auto v = s.find("s_values"); v != s.end())
            cfg.sweep.s_values = as_number_list(*v, "sweep.s_values");
        if (auto v = s.find("t2_values"); v != s.end())
            cfg.sweep.t2_values = as_number_list(*v, "sweep.t2_values");
    }

    if (auto it = j.find("degeneration"); it != j.end())
        cfg.degeneration.c_values = as_number_list(member(*it, "c_values"), "c_values");

    if (auto it = j.find("liouville"); it != j.end())
        cfg.liouville.k_values = as_number_list(member(*it, "k_values"), "k_values");

    if (auto it = j.find("converge"); it != j.end()) {
        const json& c = *it;
        if (auto k = c.find("kind"); k != c.end())
            cfg.converge.kind = study_kind_from_name(k->get<std::string>());
        if (auto v = c.find("n_values"); v != c.end()) {
            if (!v->is_array() || v->empty()) bad("'converge.n_values' must be a nonempty array");
            cfg.converge.n_values.clear();
            for (const json& e : *v) {
                if (!e.is_number_integer()) bad("'converge.n_values' must contain integers");
                cfg.converge.n_values.push_back(e.get<int>());
            }
        }
    }

    if (auto it = j.find("output"); it != j.end()) {
        cfg.output.dump_fields = bool_or(*it, "dump_fields", false);
        cfg.output.csv_slice = int_or(*it, "csv_slice", -1);
    }
    return cfg;
}

} // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

Lattice build_lattice(const RunConfig& cfg) {
    return Lattice{cfg.lattice.n, cfg.lattice.length};
}

ConformalBackground build_background(const RunConfig& cfg) {
    Lattice lat = build_lattice(cfg);
    if (cfg.background.flat) return ConformalBackground::flat(lat, cfg.background.r);
    ScalarField psi = harmonic_field(lat, cfg.background.psi.constant, cfg.background.psi.modes);
    return ConformalBackground::conformally_flat(psi);
}

ConformalData build_data(const RunConfig& cfg) {
    ConformalBackground bg = build_background(cfg);
    std::optional<SymTensorField> sig;
    if (cfg.sigma)
        sig = make_tt_field(build_lattice(cfg), cfg.sigma->constant, cfg.sigma->modes);
    return ConformalData(bg, sig, cfg.tau);
}

} // namespace cfrg
