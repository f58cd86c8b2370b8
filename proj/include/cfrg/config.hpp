#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfrg/conformal_data.hpp"
#include "cfrg/experiments.hpp"
#include "cfrg/tt.hpp"

namespace cfrg {

struct LatticeConfig {
    int n = 16;
    double length = 1.0;
};

struct PsiConfig {
    double constant = 1.0;
    std::vector<HarmonicMode> modes;
};

struct BackgroundConfig {
    bool flat = true;
    double r = 0.0;
    PsiConfig psi;
};

struct SigmaConfig {
    SymTensor3 constant;
    std::vector<TTWaveMode> modes;
};

struct SolverConfig {
    SolveMethod method = SolveMethod::Monotone;
    /// 0 means the background default.
    double tol = 0.0;
    int max_iter = 400;
    /// Extra Newton attempts from perturbed constant seeds.
    int restarts = 2;
};

struct SweepConfig {
    double c1 = 4.0;
    double c2 = 4.0;
    int samples_per_axis = 9;
    std::optional<std::vector<double>> s_values;
    std::optional<std::vector<double>> t2_values;
};

struct DegenerationConfig {
    std::vector<double> c_values{0.125, 8.0};
};

struct LiouvilleConfig {
    std::vector<double> k_values{0.01, 1.0 / 12.0, 1.0, 100.0};
};

struct ConvergeConfig {
    StudyKind kind = StudyKind::WaveSigma;
    std::vector<int> n_values{16, 32, 64};
};

struct OutputConfig {
    bool dump_fields = false;
    /// Plane index for a CSV slice of phi; -1 disables.
    int csv_slice = -1;
};

struct RunConfig {
    unsigned seed = 0;
    LatticeConfig lattice;
    BackgroundConfig background;
    std::optional<SigmaConfig> sigma;
    double tau = 0.0;
    SolverConfig solver;
    SweepConfig sweep;
    DegenerationConfig degeneration;
    LiouvilleConfig liouville;
    ConvergeConfig converge;
    OutputConfig output;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json_text(const std::string& text);

Lattice build_lattice(const RunConfig& cfg);
ConformalBackground build_background(const RunConfig& cfg);
ConformalData build_data(const RunConfig& cfg);

} // namespace cfrg
