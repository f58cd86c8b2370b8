#pragma once

#include <string>
#include <vector>

#include "cfrg/lichnerowicz.hpp"
#include "cfrg/tt.hpp"

namespace cfrg {

/// Nonconstant TT base with min sigma^2 = 1: diag(1,1,-2)/sqrt(6) plus a
/// transverse cosine mode along x1 of squared amplitude 1/12, so sigma^2
/// ranges over [1, 13/12].
SymTensorField unit_min_tt_base(const Lattice& lat);

struct SweepSample {
    double s = 0.0;   // sigma^2 scale
    double t2 = 0.0;  // tau^2
    double min_phi = 0.0;
    double max_phi = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string error;
};

struct SweepReport {
    double c1 = 0.0, c2 = 0.0;
    std::vector<double> s_values, t2_values;
    /// Sample index = s_index + s_count * t2_index.
    std::vector<SweepSample> samples;
    double global_min_phi = 0.0, global_max_phi = 0.0;
    double barrier_lo = 0.0, barrier_hi = 0.0;
    int failures = 0;
    bool barrier_violated = false;
};

/// Solves over a log-uniform (sigma^2 scale, tau^2) lattice covering
/// [1/c1, c1] x [1/c2, c2]; explicit axis values override the log grid.
/// Requires min sigma^2 of the base to be 1.
SweepReport bounds_sweep(const ConformalBackground& bg, const SymTensorField& base_sigma,
                         double c1, double c2, int samples_per_axis, double tol, int max_iter,
                         int threads = 1, const std::vector<double>* s_values = nullptr,
                         const std::vector<double>* t2_values = nullptr);

struct DegenerationRow {
    double c = 0.0;
    bool converged = false;
    /// max |phi_resolved - c*phi0| / c
    double scale_dev = 0.0;
    double max_phi_over_c = 0.0;
    double min_phi_over_c = 0.0;
    int iterations = 0;
    std::string error;
};

struct DegenerationReport {
    double tol = 0.0;
    std::vector<DegenerationRow> rows;
    bool all_match = false;
};

/// For each c, rescales (phi0, data0), re-solves from scratch with Newton
/// seeded at the constant root, and compares against c*phi0 (match threshold
/// 10*tol; the internal solves run at tol/100).
DegenerationReport degeneration_study(const ConformalData& data0, const ScalarField& phi0,
                                      const std::vector<double>& c_values, double tol);

struct TableCell {
    double r_const = 0.0;
    bool sigma_zero = true;
    bool tau_zero = true;
    std::string expected;
    std::string observed;
    std::string detail;
    double residual_max = 0.0;
    int iterations = 0;
    bool match = false;
};

struct TableScanReport {
    std::vector<TableCell> cells;
    bool all_match = false;
};

/// All 12 cells (R in {+1, 0, -1}) x (sigma present / absent) x (tau 1 / 0)
/// with representative nonconstant sigma; solvable cells carry a converged
/// solve, obstructed cells the obstruction reason.
TableScanReport table_scan(const Lattice& lat, double tol = 1e-9, int max_iter = 400);

enum class StudyKind { ConstantData, WaveSigma, TransferResidual, Hamiltonian, Momentum };

struct ConvergenceReport {
    StudyKind kind = StudyKind::WaveSigma;
    std::vector<int> n_values;
    /// Max-norm solution differences between consecutive grids at shared nodes.
    std::vector<double> diffs;
    std::vector<double> diff_orders;
    /// Per-grid residual norms (certificate or transferred-residual studies).
    std::vector<double> residual_norms;
    std::vector<double> residual_orders;
    /// Differences at roundoff scale; orders are not meaningful.
    bool exact = false;
};

ConvergenceReport convergence_study(StudyKind kind, const std::vector<int>& n_values,
                                    double tol, int max_iter);

const char* study_kind_name(StudyKind k);
StudyKind study_kind_from_name(const std::string& name);

} // namespace cfrg
