#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfrg/experiments.hpp"
#include "cfrg/operators.hpp"
#include "helpers.hpp"

using namespace cfrg;

namespace {

SymTensorField constant_unit_base(const Lattice& lat) {
    // diag(a, a, -2a) with 6 a^2 = 1.
    const double a = 1.0 / std::sqrt(6.0);
    SymTensor3 base{};
    base[SymTensor3::XX] = a;
    base[SymTensor3::YY] = a;
    base[SymTensor3::ZZ] = -2.0 * a;
    return make_tt_field(lat, base, {});
}

} // namespace

TEST_CASE("unit-min TT base has minimum sigma^2 exactly one") {
    Lattice lat(16);
    SymTensorField base = unit_min_tt_base(lat);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);
    ScalarField s2 = norm_squared(base, bg);
    CHECK(std::abs(s2.min() - 1.0) <= 1e-12);
    CHECK(s2.max() == doctest::Approx(13.0 / 12.0).epsilon(1e-13));
    auto [div, trace] = tt_check(base, bg);
    CHECK(div <= 1e-11);
    CHECK(trace <= 1e-14);

    // The mode needs n divisible by 4 so cos hits an exact zero.
    CHECK_THROWS_AS(unit_min_tt_base(Lattice(18)), ValidationError);
}

TEST_CASE("one-point sweep at the closed-form solution") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);
    const std::vector<double> s_axis{2.0 / 3.0};
    const std::vector<double> t2_axis{1.0};
    // c1 = 3/2 so the box [2/3, 3/2] admits the override value s = 2/3.
    SweepReport rep = bounds_sweep(bg, constant_unit_base(lat), 1.5, 1.0, 1, 1e-10, 200, 1,
                                   &s_axis, &t2_axis);
    REQUIRE(rep.samples.size() == 1);
    CHECK(rep.failures == 0);
    CHECK_FALSE(rep.barrier_violated);
    CHECK(rep.samples[0].converged);
    CHECK(rep.global_min_phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.global_max_phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.barrier_lo <= rep.global_min_phi * (1.0 + 1e-9));
    CHECK(rep.barrier_hi >= rep.global_max_phi * (1.0 - 1e-9));
}

TEST_CASE("five-by-five constant-base sweep follows the closed form") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);
    SweepReport rep = bounds_sweep(bg, constant_unit_base(lat), 4.0, 4.0, 5, 1e-10, 200);
    REQUIRE(rep.samples.size() == 25);
    CHECK(rep.failures == 0);
    CHECK_FALSE(rep.barrier_violated);

    // R = 0 constant data solves in closed form: phi = (3 s / (2 t2))^(1/12).
    for (const SweepSample& smp : rep.samples) {
        REQUIRE(smp.converged);
        const double expect = std::pow(1.5 * smp.s / smp.t2, 1.0 / 12.0);
        CHECK(smp.min_phi == doctest::Approx(expect).epsilon(1e-9));
        CHECK(smp.max_phi == doctest::Approx(expect).epsilon(1e-9));
    }
    // Extremes at opposite box corners: (s, t2) = (4, 1/4) and (1/4, 4).
    CHECK(rep.global_max_phi == doctest::Approx(std::pow(24.0, 1.0 / 12.0)).epsilon(1e-9));
    CHECK(rep.global_min_phi == doctest::Approx(std::pow(3.0 / 32.0, 1.0 / 12.0)).epsilon(1e-9));

    // Axes are log-uniform over [1/4, 4].
    REQUIRE(rep.s_values.size() == 5);
    CHECK(rep.s_values.front() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.s_values[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.s_values.back() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("sweep refinement changes aggregates by less than one percent") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);
    SymTensorField base = constant_unit_base(lat);
    SweepReport coarse = bounds_sweep(bg, base, 4.0, 4.0, 5, 1e-10, 200);
    SweepReport fine = bounds_sweep(bg, base, 4.0, 4.0, 9, 1e-10, 200, 2);
    CHECK(std::abs(fine.global_min_phi - coarse.global_min_phi) <
          0.01 * coarse.global_min_phi);
    CHECK(std::abs(fine.global_max_phi - coarse.global_max_phi) <
          0.01 * coarse.global_max_phi);
}

TEST_CASE("threaded sweep reproduces the single-threaded report") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, -1.0);
    SymTensorField base = unit_min_tt_base(lat);
    SweepReport one = bounds_sweep(bg, base, 2.0, 2.0, 3, 1e-9, 300, 1);
    SweepReport four = bounds_sweep(bg, base, 2.0, 2.0, 3, 1e-9, 300, 4);
    REQUIRE(one.samples.size() == four.samples.size());
    for (std::size_t i = 0; i < one.samples.size(); ++i) {
        CHECK(one.samples[i].min_phi == four.samples[i].min_phi);
        CHECK(one.samples[i].max_phi == four.samples[i].max_phi);
        CHECK(one.samples[i].iterations == four.samples[i].iterations);
    }
    CHECK(one.global_min_phi == four.global_min_phi);
    CHECK(one.global_max_phi == four.global_max_phi);
}

TEST_CASE("nonconstant sweep respects the corner barriers") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 1.0);
    SweepReport rep = bounds_sweep(bg, unit_min_tt_base(lat), 2.0, 2.0, 3, 1e-9, 300);
    CHECK(rep.failures == 0);
    CHECK_FALSE(rep.barrier_violated);
    CHECK(rep.barrier_lo > 0.0);
    CHECK(rep.barrier_lo <= rep.global_min_phi * (1.0 + 1e-8));
    CHECK(rep.barrier_hi >= rep.global_max_phi * (1.0 - 1e-8));
    for (const SweepSample& smp : rep.samples) REQUIRE(smp.converged);
}

TEST_CASE("sweep rejects a base whose minimum is not one") {
    Lattice lat(16);
    ConformalBackground bg = ConformalBackground::flat(lat, 0.0);
    SymTensor3 off{};
    off[SymTensor3::XX] = 1.0;
    off[SymTensor3::YY] = 1.0;
    off[SymTensor3::ZZ] = -2.0;
    SymTensorField base = make_tt_field(lat, off, {});
    CHECK_THROWS_AS(bounds_sweep(bg, base, 2.0, 2.0, 3, 1e-9, 300), ValidationError);
}

TEST_CASE("degeneration of the constant family is exact in c") {
    Lattice lat(16);
    ConformalData data = ConformalData::with_explicit_sigma2(
        ConformalBackground::flat(lat, 0.0), std::nullopt, ScalarField(lat, 2.0 / 3.0), 1.0);
    SolveReport base = solve_monotone(data, 1e-10, 100);
    REQUIRE(base.converged);

    DegenerationReport rep = degeneration_study(data, base.phi, {0.125, 1.0, 8.0}, 1e-9);
    CHECK(rep.all_match);
    REQUIRE(rep.rows.size() == 3);
    for (const DegenerationRow& row : rep.rows) {
        REQUIRE(row.converged);
        CHECK(row.scale_dev <= 1e-8);
        CHECK(std::abs(row.max_phi_over_c - 1.0) <= 1e-12);
        CHECK(std::abs(row.min_phi_over_c - 1.0) <= 1e-12);
    }
    CHECK(rep.rows[0].c == 0.125);
    CHECK(rep.rows[1].c == 1.0);
    CHECK(rep.rows[2].c == 8.0);
}

TEST_CASE("degeneration ratios stay constant for nonconstant data") {
    Lattice lat(16);
    ScalarField s2(lat);
    for (int i3 = 0; i3 < lat.n; ++i3)
        for (int i2 = 0; i2 < lat.n; ++i2)
            for (int i1 = 0; i1 < lat.n; ++i1)
                s2(i1, i2, i3) =
                    (2.0 / 3.0) * (1.0 + 0.5 * std::cos(2.0 * M_PI * lat.coord(i1)));
    ConformalData data = ConformalData::with_explicit_sigma2(ConformalBackground::flat(lat, 0.0),
                                                             std::nullopt, std::move(s2), 1.0);
    SolveReport base = solve_newton(data, 1e-11, 50);
    REQUIRE(base.converged);

    DegenerationReport rep = degeneration_study(data, base.phi, {0.25, 1.0, 4.0}, 1e-9);
    CHECK(rep.all_match);
    for (const DegenerationRow& row : rep.rows) {
        REQUIRE(row.converged);
        CHECK(row.scale_dev <= 1e-8);
    }
    // max phi / c is the same constant for every c (10 tol relative).
    const double ref = rep.rows[1].max_phi_over_c;
    for (const DegenerationRow& row : rep.rows)
        CHECK(std::abs(row.max_phi_over_c - ref) <= 1e-8 * ref);
}

TEST_CASE("table scan fills and matches all twelve cells") {
    TableScanReport rep = table_scan(Lattice(16));
    REQUIRE(rep.cells.size() == 12);
    CHECK(rep.all_match);

    int solvable = 0, obstructed = 0, trivial = 0;
    for (const TableCell& cell : rep.cells) {
        CHECK(cell.match);
        REQUIRE(!cell.observed.empty());
        REQUIRE(!cell.expected.empty());
        CHECK(cell.observed == cell.expected);
        if (cell.observed == "SOLVABLE") {
            ++solvable;
            CHECK(cell.residual_max <= 1e-9);
            CHECK(!cell.detail.empty());
        } else if (cell.observed == "OBSTRUCTED") {
            ++obstructed;
            CHECK(!cell.detail.empty());
        } else if (cell.observed == "TRIVIAL_FAMILY") {
            ++trivial;
        }
    }
    CHECK(solvable == 5);
    CHECK(obstructed == 6);
    CHECK(trivial == 1);
}

TEST_CASE("constant-data study reports exact agreement") {
    ConvergenceReport rep = convergence_study(StudyKind::ConstantData, {16, 32, 64}, 1e-10, 400);
    CHECK(rep.exact);
    REQUIRE(rep.diffs.size() == 2);
    CHECK(rep.diffs[0] <= 1e-10);
    CHECK(rep.diffs[1] <= 1e-10);
}

TEST_CASE("wave-sigma study observes second order") {
    ConvergenceReport rep = convergence_study(StudyKind::WaveSigma, {16, 32, 64}, 1e-10, 2000);
    CHECK_FALSE(rep.exact);
    REQUIRE(rep.diff_orders.size() == 1);
    CHECK(rep.diff_orders[0] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("transfer residual study observes second order") {
    ConvergenceReport rep =
        convergence_study(StudyKind::TransferResidual, {16, 32, 64}, 1e-10, 2000);
    REQUIRE(rep.residual_orders.size() == 2);
    for (double p : rep.residual_orders) CHECK(p == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("study input validation") {
    CHECK_THROWS_AS(convergence_study(StudyKind::WaveSigma, {16, 32}, 1e-10, 400),
                    ValidationError);
    CHECK_THROWS_AS(convergence_study(StudyKind::WaveSigma, {32, 16, 64}, 1e-10, 400),
                    ValidationError);
    CHECK_THROWS_AS(convergence_study(StudyKind::WaveSigma, {}, 1e-10, 400), ValidationError);
}

TEST_CASE("study kind names round-trip") {
    for (StudyKind k : {StudyKind::ConstantData, StudyKind::WaveSigma,
                        StudyKind::TransferResidual, StudyKind::Hamiltonian,
                        StudyKind::Momentum}) {
        CHECK(study_kind_from_name(study_kind_name(k)) == k);
    }
    CHECK_THROWS_AS(study_kind_from_name("bogus"), ValidationError);
}
