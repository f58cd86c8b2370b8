#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cfrg/lichnerowicz.hpp"
#include "cfrg/operators.hpp"
#include "cfrg/tt.hpp"
#include "helpers.hpp"

using namespace cfrg;

namespace {

ConformalData constant_data(const Lattice& lat, double r, double s, double tau) {
    return ConformalData::with_explicit_sigma2(ConformalBackground::flat(lat, r), std::nullopt,
                                               ScalarField(lat, s), tau);
}

/// sigma^2 = base * (1 + amp cos(2 pi x1 / L)); extremes are exact at even n.
ConformalData wave_sigma2_data(const Lattice& lat, double r, double base, double amp, double tau) {
    ScalarField s2(lat);
    const double w = 2.0 * M_PI / lat.length;
    for (int i3 = 0; i3 < lat.n; ++i3)
        for (int i2 = 0; i2 < lat.n; ++i2)
            for (int i1 = 0; i1 < lat.n; ++i1)
                s2(i1, i2, i3) = base * (1.0 + amp * std::cos(w * lat.coord(i1)));
    return ConformalData::with_explicit_sigma2(ConformalBackground::flat(lat, r), std::nullopt,
                                               std::move(s2), tau);
}

double poly(double r, double s, double t2, double u) {
    const double u4 = u * u * u * u;
    const double u8 = u4 * u4;
    return (t2 / 12.0) * u8 * u4 + 0.125 * r * u8 - 0.125 * s;
}

} // namespace

TEST_CASE("residual vanishes exactly on closed-form constant solutions") {
    Lattice lat(16);

    ScalarField one(lat, 1.0);
    CHECK(residual(one, constant_data(lat, 0.0, 2.0 / 3.0, 1.0)).max_abs() == 0.0);

    ScalarField two(lat, 2.0);
    CHECK(residual(two, constant_data(lat, 1.0, 256.0, 0.0)).max_abs() == 0.0);

    // tau is stored, not tau^2, and no double squares to exactly 3/2; the
    // residual carries the one-ulp representation error of sqrt(3/2)^2.
    CHECK(residual(one, constant_data(lat, -1.0, 0.0, std::sqrt(1.5))).max_abs() <= 1.0 / (1ull << 55));
}

TEST_CASE("residual rejects non-positive phi and mismatched lattices") {
    Lattice lat(16);
    ConformalData data = constant_data(lat, 0.0, 2.0 / 3.0, 1.0);

    ScalarField bad(lat, 1.0);
    bad(0, 0, 0) = 0.0;
    CHECK_THROWS_AS(residual(bad, data), ValidationError);
    bad(0, 0, 0) = -1.0;
    CHECK_THROWS_AS(residual(bad, data), ValidationError);

    ScalarField other(Lattice(32), 1.0);
    CHECK_THROWS_AS(residual(other, data), ValidationError);
}

TEST_CASE("constant root closed forms") {
    CHECK(constant_root(0.0, 2.0 / 3.0, 1.0) == 1.0);
    CHECK(constant_root(1.0, 256.0, 0.0) == 2.0);
    CHECK(constant_root(-1.0, 0.0, 1.5) == 1.0);

    CHECK(constant_root(2.0, 512.0, 0.0) == 2.0);
    CHECK(constant_root(-2.0, 0.0, 3.0) == 1.0);
    CHECK(constant_root(-8.0 / 3.0, 0.0, 2.0) ==
          doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
}

TEST_CASE("constant root bisection against frozen high-precision values") {
    CHECK(constant_root(1.0, 1.0, 1.0) ==
          doctest::Approx(0.94764035043761360).epsilon(1e-11));
    CHECK(constant_root(-2.0, 5.0, 3.0) ==
          doctest::Approx(1.15583941575074058).epsilon(1e-11));
    CHECK(constant_root(4.0, 0.25, 2.0) ==
          doctest::Approx(0.70032228165718934).epsilon(1e-11));
}

TEST_CASE("constant root solves its polynomial across admissible coefficients") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = coeff(rng);
        const double s = pos(rng);
        const double t2 = pos(rng);
        const double u = constant_root(r, s, t2);
        REQUIRE(u > 0.0);
        const double scale = std::abs(0.125 * r) * std::pow(u, 8) + 0.125 * s + (t2 / 12.0);
        CHECK(std::abs(poly(r, s, t2, u)) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("constant root rejects inadmissible sign patterns") {
    CHECK_THROWS_AS(constant_root(1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(constant_root(0.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(constant_root(-1.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(constant_root(0.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(constant_root(0.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(constant_root(1.0, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(constant_root(1.0, 1.0, -1.0), ValidationError);
    CHECK_THROWS_AS(constant_root(std::nan(""), 1.0, 1.0), ValidationError);
}

TEST_CASE("sub and super bounds bracket the field extremes") {
    Lattice lat(16);

    // sigma^2 in [1/2, 2] with R = 0, tau^2 = 1.
    ConformalData data = wave_sigma2_data(lat, 0.0, 1.25, 0.6, 1.0);
    CHECK(data.sigma2().min() == 0.5);
    CHECK(data.sigma2().max() == 2.0);
    auto [lo, hi] = sub_super_bounds(data);
    CHECK(lo == doctest::Approx(std::pow(0.75, 1.0 / 12.0)).epsilon(1e-14));
    CHECK(hi == doctest::Approx(std::pow(3.0, 1.0 / 12.0)).epsilon(1e-14));

    // Constant barriers really are sub- and supersolutions.
    ScalarField flo(lat, lo), fhi(lat, hi);
    CHECK(residual(flo, data).min() >= -1e-12);
    CHECK(residual(fhi, data).max() <= 1e-12);

    // Constant data collapses the bracket.
    auto [clo, chi] = sub_super_bounds(constant_data(lat, 0.0, 2.0 / 3.0, 1.0));
    CHECK(clo == 1.0);
    CHECK(chi == 1.0);

    auto [zlo, zhi] = sub_super_bounds(constant_data(lat, -1.0, 0.0, std::sqrt(1.5)));
    CHECK(zlo == 1.0);
    CHECK(zhi == 1.0);
}

TEST_CASE("sub and super bounds refuse non-solvable classes") {
    Lattice lat(16);
    CHECK_THROWS_AS(sub_super_bounds(constant_data(lat, 1.0, 0.0, 1.0)), ValidationError);
    CHECK_THROWS_AS(sub_super_bounds(constant_data(lat, 0.0, 0.0, 0.0)), ValidationError);
    CHECK_THROWS_AS(sub_super_bounds(constant_data(lat, 0.0, 1.0, 0.0)), ValidationError);
}

TEST_CASE("solvability table over all twelve class cells") {
    struct Cell {
        YamabeSign sign;
        bool s_zero, t_zero;
        Solvability expected;
    };
    const Cell cells[] = {
        {YamabeSign::Positive, true, true, Solvability::Obstructed},
        {YamabeSign::Positive, true, false, Solvability::Obstructed},
        {YamabeSign::Positive, false, true, Solvability::Solvable},
        {YamabeSign::Positive, false, false, Solvability::Solvable},
        {YamabeSign::Zero, true, true, Solvability::TrivialFamily},
        {YamabeSign::Zero, true, false, Solvability::Obstructed},
        {YamabeSign::Zero, false, true, Solvability::Obstructed},
        {YamabeSign::Zero, false, false, Solvability::Solvable},
        {YamabeSign::Negative, true, true, Solvability::Obstructed},
        {YamabeSign::Negative, true, false, Solvability::Solvable},
        {YamabeSign::Negative, false, true, Solvability::Obstructed},
        {YamabeSign::Negative, false, false, Solvability::Solvable},
    };
    int solvable = 0, obstructed = 0, trivial = 0;
    for (const Cell& c : cells) {
        CHECK(table_expectation(ClassTag{c.sign, c.s_zero, c.t_zero}) == c.expected);
        if (c.expected == Solvability::Solvable) ++solvable;
        if (c.expected == Solvability::Obstructed) ++obstructed;
        if (c.expected == Solvability::TrivialFamily) ++trivial;
    }
    CHECK(solvable == 5);
    CHECK(obstructed == 6);
    CHECK(trivial == 1);
}

TEST_CASE("obstruction check matches the table and explains refusals") {
    Lattice lat(16);
    const double rs[] = {1.0, 0.0, -1.0};
    for (double r : rs) {
        for (bool s_zero : {true, false}) {
            for (bool t_zero : {true, false}) {
                ConformalData data =
                    constant_data(lat, r, s_zero ? 0.0 : 1.0, t_zero ? 0.0 : 1.0);
                ObstructionReport rep = obstruction_check(data);
                const ClassTag tag{r > 0   ? YamabeSign::Positive
                                   : r < 0 ? YamabeSign::Negative
                                           : YamabeSign::Zero,
                                   s_zero, t_zero};
                CHECK(rep.status == table_expectation(tag));
                if (rep.status == Solvability::Obstructed) {
                    CHECK(!rep.reason.empty());
                    CHECK(rep.reason.find("strictly") != std::string::npos);
                } else if (rep.status == Solvability::TrivialFamily) {
                    CHECK(rep.reason.find("constant") != std::string::npos);
                } else {
                    CHECK(rep.reason.empty());
                }
            }
        }
    }

    ScalarField psi(lat, 2.0);
    ConformalData conf = ConformalData::with_explicit_sigma2(
        ConformalBackground::conformally_flat(psi), std::nullopt, ScalarField(lat, 1.0), 1.0);
    CHECK_THROWS_AS(obstruction_check(conf), ValidationError);
}

TEST_CASE("monotone solver reproduces constant solutions without iterating") {
    Lattice lat(16);

    SolveReport rep = solve_monotone(constant_data(lat, 0.0, 2.0 / 3.0, 1.0), 1e-9, 100);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(rep.residual_max == 0.0);
    CHECK(rep.phi.min() == 1.0);
    CHECK(rep.phi.max() == 1.0);
    CHECK(rep.phi_minus == 1.0);
    CHECK(rep.phi_plus == 1.0);

    SolveReport tt0 = solve_monotone(constant_data(lat, 1.0, 256.0, 0.0), 1e-9, 100);
    CHECK(tt0.converged);
    CHECK(tt0.phi.max() == 2.0);

    SolveReport neg = solve_monotone(constant_data(lat, -1.0, 0.0, std::sqrt(1.5)), 1e-9, 100);
    CHECK(neg.converged);
    CHECK(neg.phi.max() == 1.0);
}

TEST_CASE("monotone solver refuses non-solvable classes without iterating") {
    Lattice lat(16);
    CHECK_THROWS_AS(solve_monotone(constant_data(lat, 1.0, 0.0, 1.0), 1e-9, 100),
                    ValidationError);
    CHECK_THROWS_AS(solve_monotone(constant_data(lat, 0.0, 0.0, 0.0), 1e-9, 100),
                    ValidationError);
}

TEST_CASE("monotone and newton agree on nonconstant data") {
    Lattice lat(32);
    ConformalData data = wave_sigma2_data(lat, 0.0, 2.0 / 3.0, 0.5, 1.0);
    const double tol = 1e-10;

    SolveReport mono = solve_monotone(data, tol, 400);
    SolveReport newt = solve_newton(data, tol, 50);
    CHECK(mono.converged);
    CHECK(newt.converged);
    CHECK(mono.residual_max <= tol);
    CHECK(newt.residual_max <= tol);
    CHECK(testing::max_abs_diff(mono.phi, newt.phi) <= 10.0 * tol);

    // Solutions sit inside the constant barrier (slack 10 tol).
    CHECK(mono.phi.min() >= mono.phi_minus - 10.0 * tol);
    CHECK(mono.phi.max() <= mono.phi_plus + 10.0 * tol);
    CHECK(mono.phi.min() > 0.0);

    // Residual report is honest: recomputing it gives the same max-norm.
    CHECK(residual(mono.phi, data).max_abs() == doctest::Approx(mono.residual_max).epsilon(1e-12));
}

TEST_CASE("newton accepts a caller-provided start and rejects bad ones") {
    Lattice lat(16);
    ConformalData data = constant_data(lat, 1.0, 256.0, 0.0);

    ScalarField start(lat, 2.0);
    SolveReport rep = solve_newton(data, 1e-9, 50, &start);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(rep.residual_max == 0.0);

    ScalarField bad(lat, 1.0);
    bad(5, 5, 5) = -0.5;
    CHECK_THROWS_AS(solve_newton(data, 1e-9, 50, &bad), ValidationError);
}

TEST_CASE("newton from a tiny seed either reaches phi = 1 or reports stagnation") {
    Lattice lat(16);
    ConformalData data = constant_data(lat, -1.0, 0.0, std::sqrt(1.5));
    ScalarField seed(lat, 1e-3);
    try {
        SolveReport rep = solve_newton(data, 1e-9, 60, &seed);
        CHECK(rep.converged);
        CHECK(std::abs(rep.phi.min() - 1.0) <= 1e-6);
        CHECK(std::abs(rep.phi.max() - 1.0) <= 1e-6);
    } catch (const ConvergenceError&) {
        // Truthful failure is acceptable; the seed sits far outside the basin.
    }
}

TEST_CASE("newton converges to the same solution from distinct seeds") {
    Lattice lat(16);
    ConformalData data = wave_sigma2_data(lat, -1.0, 1.0, 0.25, 1.0);
    const double tol = 1e-10;

    ScalarField lo_seed(lat, 0.5), hi_seed(lat, 3.0);
    SolveReport a = solve_newton(data, tol, 80, &lo_seed);
    SolveReport b = solve_newton(data, tol, 80, &hi_seed);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(testing::max_abs_diff(a.phi, b.phi) <= 10.0 * tol);
}

TEST_CASE("solvers handle a conformally flat background") {
    Lattice lat(16);
    ScalarField psi(lat);
    const double w = 2.0 * M_PI;
    for (int i3 = 0; i3 < lat.n; ++i3)
        for (int i2 = 0; i2 < lat.n; ++i2)
            for (int i1 = 0; i1 < lat.n; ++i1)
                psi(i1, i2, i3) = 1.0 + 0.05 * std::cos(w * lat.coord(i1));

    ConformalData data = ConformalData::with_explicit_sigma2(
        ConformalBackground::conformally_flat(psi), std::nullopt, ScalarField(lat, 1.5), 1.0);
    const double tol = 1e-10;
    SolveReport rep = solve_newton(data, tol, 50);
    CHECK(rep.converged);
    CHECK(rep.residual_max <= tol);
    CHECK(rep.phi.min() > 0.0);
    CHECK(residual(rep.phi, data).max_abs() == doctest::Approx(rep.residual_max).epsilon(1e-10));
}

TEST_CASE("scaling transform is exact on the closed-form solution") {
    Lattice lat(16);
    ConformalData data = constant_data(lat, 0.0, 2.0 / 3.0, 1.0);
    ScalarField one(lat, 1.0);

    auto [phi1, data1] = scaling_transform(one, data, 1.0);
    CHECK(testing::max_abs_diff(phi1, one) == 0.0);
    CHECK(data1.tau() == 1.0);
    CHECK(testing::max_abs_diff(data1.sigma2(), data.sigma2()) == 0.0);

    auto [phi2, data2] = scaling_transform(one, data, 2.0);
    CHECK(phi2.min() == 2.0);
    CHECK(phi2.max() == 2.0);
    CHECK(data2.sigma2().max() == 256.0 * (2.0 / 3.0));
    CHECK(data2.tau() == 0.25);
    CHECK(residual(phi2, data2).max_abs() == 0.0);

    CHECK_THROWS_AS(scaling_transform(one, data, 0.0), ValidationError);
    CHECK_THROWS_AS(scaling_transform(one, data, -2.0), ValidationError);
}

TEST_CASE("scaling transform maps residuals linearly") {
    Lattice lat(16);
    ConformalData data = wave_sigma2_data(lat, -1.0, 1.0, 0.25, 1.0);
    ScalarField phi = testing::random_field(lat, 77, 0.8, 1.25);
    ScalarField res = residual(phi, data);

    for (double c : {1e-2, 1.0, 3.0, 1e2}) {
        auto [phi_c, data_c] = scaling_transform(phi, data, c);
        ScalarField res_c = residual(phi_c, data_c);
        double worst = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i)
            worst = std::max(worst, std::abs(res_c[i] - c * res[i]));
        CHECK(worst <= 1e-12 * c * std::max(1.0, res.max_abs()));
    }
}

TEST_CASE("conformal transfer with unit factor is the identity") {
    Lattice lat(16);
    ConformalData data = wave_sigma2_data(lat, 0.0, 2.0 / 3.0, 0.5, 1.0);
    SolveReport rep = solve_monotone(data, 1e-11, 400);
    REQUIRE(rep.converged);

    ScalarField unit(lat, 1.0);
    auto [phi_t, data_t] = conformal_transfer(rep.phi, data, unit);
    CHECK(testing::max_abs_diff(phi_t, rep.phi) == 0.0);
    CHECK(testing::max_abs_diff(data_t.sigma2(), data.sigma2()) == 0.0);
    CHECK(!data_t.background().is_flat());
    CHECK(residual(phi_t, data_t).max_abs() ==
          doctest::Approx(rep.residual_max).epsilon(1e-12));
}

TEST_CASE("conformal transfer with constant factor stays exact") {
    Lattice lat(16);
    ConformalData data = constant_data(lat, 0.0, 2.0 / 3.0, 1.0);
    ScalarField one(lat, 1.0), two(lat, 2.0);

    auto [phi_t, data_t] = conformal_transfer(one, data, two);
    CHECK(phi_t.max() == 0.5);
    CHECK(phi_t.min() == 0.5);
    CHECK(data_t.tau() == 1.0);
    CHECK(data_t.sigma2().max() == (2.0 / 3.0) / 4096.0);
    CHECK(residual(phi_t, data_t).max_abs() == 0.0);
}

TEST_CASE("conformal transfer residual shrinks at second order") {
    double prev = 0.0;
    for (int n : {16, 32}) {
        Lattice lat(n);
        ConformalData data = wave_sigma2_data(lat, 0.0, 2.0 / 3.0, 0.5, 1.0);
        SolveReport rep = solve_monotone(data, 1e-12, 600);
        REQUIRE(rep.converged);

        ScalarField psi(lat);
        const double w = 2.0 * M_PI;
        for (int i3 = 0; i3 < lat.n; ++i3)
            for (int i2 = 0; i2 < lat.n; ++i2)
                for (int i1 = 0; i1 < lat.n; ++i1)
                    psi(i1, i2, i3) = 1.0 + 0.1 * std::cos(w * lat.coord(i1));

        auto [phi_t, data_t] = conformal_transfer(rep.phi, data, psi);
        const double r = residual(phi_t, data_t).max_abs();
        if (n == 32) {
            const double ratio = prev / r;
            CHECK(ratio > 3.0);
            CHECK(ratio < 5.0);
        }
        prev = r;
    }
}

TEST_CASE("conformal transfer input validation") {
    Lattice lat(16);
    ScalarField one(lat, 1.0);

    ConformalData curved = constant_data(lat, 1.0, 256.0, 0.0);
    CHECK_THROWS_AS(conformal_transfer(one, curved, one), ValidationError);

    ConformalData data = constant_data(lat, 0.0, 2.0 / 3.0, 1.0);
    ScalarField bad(lat, 1.0);
    bad(1, 2, 3) = 0.0;
    CHECK_THROWS_AS(conformal_transfer(one, data, bad), ValidationError);
}

TEST_CASE("conformal data caches and classifies sigma") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);

    SymTensor3 base{};
    base[SymTensor3::XX] = 1.0;
    base[SymTensor3::YY] = 1.0;
    base[SymTensor3::ZZ] = -2.0;
    TTWaveMode mode;
    mode.k = {1, 0, 0};
    mode.eps[SymTensor3::YZ] = 0.5;
    SymTensorField sigma = make_tt_field(lat, base, {mode});

    ConformalData data(bg, sigma, 0.75);
    REQUIRE(data.sigma() != nullptr);
    ScalarField direct = norm_squared(sigma, bg);
    CHECK(testing::max_abs_diff(data.sigma2(), direct) == 0.0);
    CHECK(!data.sigma2_is_zero());
    CHECK(!data.tau_is_zero());

    // The structural-zero flag threshold sits at 1e-14.
    ConformalData tiny = ConformalData::with_explicit_sigma2(bg, std::nullopt,
                                                             ScalarField(lat, 0.9e-14), 0.0);
    CHECK(tiny.sigma2_is_zero());
    ConformalData small = ConformalData::with_explicit_sigma2(bg, std::nullopt,
                                                              ScalarField(lat, 1.1e-14), 0.0);
    CHECK(!small.sigma2_is_zero());

    CHECK_THROWS_AS(ConformalData::with_explicit_sigma2(bg, std::nullopt,
                                                        ScalarField(lat, -1.0), 0.0),
                    ValidationError);

    ClassTag tag = data.class_tag();
    CHECK(tag.sign == YamabeSign::Zero);
    CHECK(!tag.sigma2_zero);
    CHECK(!tag.tau_zero);
}

TEST_CASE("name helpers") {
    CHECK(std::string(method_name(SolveMethod::Monotone)) == "monotone");
    CHECK(std::string(method_name(SolveMethod::Newton)) == "newton");
    CHECK(std::string(solvability_name(Solvability::Solvable)) == "SOLVABLE");
    CHECK(std::string(solvability_name(Solvability::Obstructed)) == "OBSTRUCTED");
    CHECK(std::string(solvability_name(Solvability::TrivialFamily)) == "TRIVIAL_FAMILY");
    CHECK(default_tolerance(ConformalBackground::flat(Lattice(8), 0.0)) == 1e-9);
    CHECK(default_tolerance(ConformalBackground::conformally_flat(ScalarField(Lattice(8), 2.0))) ==
          1e-8);
}
