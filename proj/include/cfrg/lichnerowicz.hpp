#pragma once

#include <limits>
#include <string>
#include <utility>

#include "cfrg/conformal_data.hpp"

namespace cfrg {

enum class SolveMethod { Monotone, Newton };

struct SolveReport {
    ScalarField phi;
    double residual_max = 0.0;
    double residual_l2 = 0.0;
    int iterations = 0;
    SolveMethod method = SolveMethod::Monotone;
    bool converged = false;
    /// Constant barrier; NaN when no constant barrier exists for the data.
    double phi_minus = std::numeric_limits<double>::quiet_NaN();
    double phi_plus = std::numeric_limits<double>::quiet_NaN();
};

enum class Solvability { Solvable, Obstructed, TrivialFamily };

struct ObstructionReport {
    Solvability status = Solvability::Solvable;
    std::string reason;
};

/// Lap phi - (1/8) R phi + (1/8) sigma^2 phi^-7 - (1/12) tau^2 phi^5, nodewise.
ScalarField residual(const ScalarField& phi, const ConformalData& data);

/// Unique positive root of (1/12) t2 u^12 + (1/8) r u^8 - (1/8) s = 0.
/// Admissible sign patterns: (s>0, t2>0, any r), (s>0, t2=0, r>0),
/// (s=0, t2>0, r<0).  Closed forms in the reducible cases, bisection to
/// relative tolerance 1e-12 otherwise.
double constant_root(double r, double s, double t2);

/// Constant barrier (phi_minus, phi_plus): roots of the nonlinearity at the
/// unfavorable and favorable field extremes, verified to be a sub- and a
/// supersolution by evaluating the nonlinearity sign at the constants.
std::pair<double, double> sub_super_bounds(const ConformalData& data);

/// Solvability cell of the class tag per the constant-curvature table.
Solvability table_expectation(const ClassTag& tag);

/// Decides solvability from the sign-definite-integrand argument; requires
/// prescribed constant curvature.
ObstructionReport obstruction_check(const ConformalData& data, double yamabe_tol = 1e-6);

/// Monotone sub/supersolution iteration from phi_plus.  Iterates stay inside
/// the bracket and decrease pointwise; stops when the residual max-norm
/// reaches tol.
SolveReport solve_monotone(const ConformalData& data, double tol, int max_iter);

/// Damped Newton with Krylov inner solves; default start is the constant root
/// at field means.
SolveReport solve_newton(const ConformalData& data, double tol, int max_iter,
                         const ScalarField* phi0 = nullptr);

/// (c phi; sigma -> c^4 sigma, tau -> c^-2 tau).  The residual of the image
/// equals c times the input residual nodewise.
std::pair<ScalarField, ConformalData> scaling_transform(const ScalarField& phi,
                                                        const ConformalData& data, double c);

/// (phi/psi; flat -> conformally flat by psi, sigma -> psi^-2 sigma, tau
/// unchanged).  Requires a zero-curvature flat base.  Exact for constant psi;
/// otherwise the transferred residual is second-order small.
std::pair<ScalarField, ConformalData> conformal_transfer(const ScalarField& phi,
                                                         const ConformalData& data,
                                                         const ScalarField& psi);

/// 1e-9 for flat backgrounds, 1e-8 for conformally flat ones.
double default_tolerance(const ConformalBackground& bg);

const char* method_name(SolveMethod m);
const char* solvability_name(Solvability s);

} // namespace cfrg
