#include "romopt/dmd.hpp"

#include "romopt/io_util.hpp"
#include "romopt/linalg.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

using namespace romopt;
using testutil::random_matrix;
using testutil::random_vector;
using testutil::ScratchDir;

namespace {

Matrix orthonormal_columns(int rows, int cols, std::uint64_t seed) {
    return truncated_svd(random_matrix(rows, cols, seed), RankPolicy::fixed(cols)).u;
}

/// Planted linear system: snapshots x_k = Q·Bᵏ·z0 for a known small B.
SnapshotSeries planted_series(const Matrix& q, const Matrix& b, const Vector& z0, int m,
                              double t0 = 2.0, double dt = 0.25) {
    SnapshotSeries series;
    series.t0 = t0;
    series.dt = dt;
    series.states.resize(q.rows(), m);
    Vector z = z0;
    for (int k = 0; k < m; ++k) {
        series.states.col(k) = q * z;
        z = b * z;
    }
    return series;
}

}  // namespace

TEST_CASE("planted diagonal dynamics are recovered exactly") {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 0.9;
    b(1, 1) = 0.5;
    Matrix q = orthonormal_columns(10, 2, 700);
    Vector z0(2);
    z0 << 1.0, 1.0;
    SnapshotSeries series = planted_series(q, b, z0, 12);
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    REQUIRE(model.rank() == 2);
    CHECK(std::abs(model.eigenvalues[0] - std::complex<double>(0.9, 0.0)) <= 1e-8);
    CHECK(std::abs(model.eigenvalues[1] - std::complex<double>(0.5, 0.0)) <= 1e-8);
}

TEST_CASE("constant series collapses to a single unit eigenvalue") {
    Vector c = random_vector(7, 701);
    SnapshotSeries series;
    series.states = c.replicate(1, 6);
    series.t0 = 0.0;
    series.dt = 0.5;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    CHECK(std::abs(model.eigenvalues[0] - std::complex<double>(1.0, 0.0)) <= 1e-10);
}

TEST_CASE("geometric decay is recovered as its ratio") {
    Vector v = random_vector(5, 702);
    SnapshotSeries series;
    series.states.resize(5, 9);
    double scale = 1.0;
    for (int k = 0; k < 9; ++k) {
        series.states.col(k) = scale * v;
        scale *= 0.8;
    }
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    CHECK(std::abs(model.eigenvalues[0] - std::complex<double>(0.8, 0.0)) <= 1e-10);
}

TEST_CASE("reconstruction matches the first snapshot at t0") {
    Matrix b = random_matrix(3, 3, 703) * 0.4;
    Matrix q = orthonormal_columns(12, 3, 704);
    SnapshotSeries series = planted_series(q, b, random_vector(3, 705), 10);
    DmdModel model = fit_dmd(series, RankPolicy::fixed(3));
    Vector rec = reconstruct(model, series.t0);
    double rel = (rec - series.states.col(0)).norm() / series.states.col(0).norm();
    CHECK(rel <= std::max(model.training_residual, 1e-12));
}

TEST_CASE("reconstruction extrapolates a planted system to 20 steps") {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 0.9;
    b(1, 1) = 0.5;
    Matrix q = orthonormal_columns(10, 2, 706);
    Vector z0(2);
    z0 << 1.0, -2.0;
    SnapshotSeries series = planted_series(q, b, z0, 12);
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    // Oracle: propagate the planted operator analytically.
    Vector z20(2);
    z20 << std::pow(0.9, 20) * z0[0], std::pow(0.5, 20) * z0[1];
    Vector expected = q * z20;
    Vector rec = reconstruct(model, series.t0 + 20 * series.dt);
    CHECK(dmd_is_extrapolating(model, series.t0 + 20 * series.dt));
    CHECK((rec - expected).norm() <= 1e-6 * expected.norm());
}

TEST_CASE("constant series reconstructs the constant at fractional times") {
    Vector c = random_vector(6, 707);
    SnapshotSeries series;
    series.states = c.replicate(1, 5);
    series.t0 = 1.0;
    series.dt = 0.1;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    for (double t : {1.0, 1.17, 1.4}) {
        CHECK((reconstruct(model, t) - c).norm() <= 1e-10 * c.norm());
    }
}

TEST_CASE("reconstruction before t0 is rejected") {
    Vector c = random_vector(4, 708);
    SnapshotSeries series;
    series.states = c.replicate(1, 4);
    series.t0 = 5.0;
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    CHECK_THROWS_AS(reconstruct(model, 4.9), Error);
}

TEST_CASE("regime forecast strips a decaying transient") {
    Vector c = 3.0 * random_vector(8, 709);
    Vector d = random_vector(8, 710);
    SnapshotSeries series;
    series.states.resize(8, 12);
    double w = 1.0;
    for (int k = 0; k < 12; ++k) {
        series.states.col(k) = c + w * d;
        w *= 0.7;
    }
    series.t0 = 0.0;
    series.dt = 0.5;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    auto regime = regime_state(model, series.t0 + 100 * series.dt);
    CHECK(regime.excluded_modes.empty());
    CHECK((regime.state - c).norm() <= 1e-6 * c.norm());
}

TEST_CASE("regime of a constant series is the constant") {
    Vector c = random_vector(5, 711);
    SnapshotSeries series;
    series.states = c.replicate(1, 6);
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    auto regime = regime_state(model);
    CHECK((regime.state - c).norm() <= 1e-10 * c.norm());
}

TEST_CASE("purely growing dynamics have no stable regime") {
    Vector v = random_vector(5, 712);
    SnapshotSeries series;
    series.states.resize(5, 8);
    double scale = 1.0;
    for (int k = 0; k < 8; ++k) {
        series.states.col(k) = scale * v;
        scale *= 1.2;
    }
    DmdModel model = fit_dmd(series, RankPolicy::fixed(1));
    CHECK_THROWS_WITH_AS(static_cast<void>(regime_state(model, std::nullopt, 0.01)),
                         doctest::Contains("no stable dynamics"), Error);
}

TEST_CASE("growing modes are excluded but stable ones kept") {
    Vector c = 2.0 * random_vector(6, 713);
    Vector d = random_vector(6, 714);
    SnapshotSeries series;
    series.states.resize(6, 10);
    double w = 1.0;
    for (int k = 0; k < 10; ++k) {
        series.states.col(k) = c + w * d;
        w *= 1.15;
    }
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    auto regime = regime_state(model, std::nullopt, 0.01);
    CHECK(regime.excluded_modes.size() == 1);
    CHECK((regime.state - c).norm() <= 1e-6 * c.norm());
}

TEST_CASE("steady-only mode keeps just the unit eigenvalue") {
    Vector c = 2.0 * random_vector(6, 715);
    Vector d = random_vector(6, 716);
    SnapshotSeries series;
    series.states.resize(6, 10);
    double w = 1.0;
    for (int k = 0; k < 10; ++k) {
        series.states.col(k) = c + w * d;
        w *= 0.6;
    }
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    auto regime = regime_state(model, std::nullopt, 1e-6, true);
    CHECK(regime.excluded_modes.size() == 1);
    CHECK((regime.state - c).norm() <= 1e-8 * c.norm());
}

TEST_CASE("linear snapshot data is reproduced within 1e-8") {
    SplitMix64 rng(717);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 30;
        const int r = 4;
        const int m = 10;
        Matrix q = orthonormal_columns(n, r, rng.next_u64());
        Matrix b = random_matrix(r, r, rng.next_u64());
        b *= 1.05 / std::abs(eig_dense(b).values[0]);
        SnapshotSeries series = planted_series(q, b, random_vector(r, rng.next_u64()), m);
        DmdModel model = fit_dmd(series, RankPolicy::fixed(r));
        for (int k = 0; k < m; ++k) {
            Vector rec = reconstruct(model, series.t0 + k * series.dt);
            Vector truth = series.states.col(k);
            CHECK((rec - truth).norm() <= 1e-8 * truth.norm());
        }
    }
}

TEST_CASE("modes are eigenvectors of the dense one-step operator") {
    // Brute-force oracle: form Y·X† densely and apply it to each mode.
    Matrix b = random_matrix(5, 5, 718) * 0.5;
    Matrix q = orthonormal_columns(20, 5, 719);
    SnapshotSeries series = planted_series(q, b, random_vector(5, 720), 9);
    DmdModel model = fit_dmd(series, RankPolicy::fixed(5));
    Matrix x = series.states.leftCols(8);
    Matrix y = series.states.rightCols(8);
    Matrix a_dense = pseudo_inverse_apply(x, y);
    CMatrix ac = a_dense.cast<std::complex<double>>();
    for (int i = 0; i < model.rank(); ++i) {
        CVector phi = model.modes.col(i);
        double res = (ac * phi - model.eigenvalues[i] * phi).norm();
        CHECK(res <= 1e-7 * a_dense.norm() * phi.norm());
    }
}

TEST_CASE("real data gives a conjugation-closed spectrum") {
    SnapshotSeries series;
    series.states = random_matrix(15, 9, 721);
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(6));
    for (int i = 0; i < model.rank(); ++i) {
        auto lambda = model.eigenvalues[i];
        if (std::abs(lambda.imag()) <= 1e-12) continue;
        bool paired = false;
        for (int j = 0; j < model.rank(); ++j) {
            if (std::abs(model.eigenvalues[j] - std::conj(lambda)) <= 1e-9) paired = true;
        }
        CHECK(paired);
    }
    // Reconstruction of real data stays real.
    for (int k : {0, 4, 8}) {
        double t = series.t0 + k * series.dt;
        CVector factors(model.rank());
        for (int i = 0; i < model.rank(); ++i) {
            factors[i] = std::pow(model.eigenvalues[i], static_cast<double>(k)) *
                         model.amplitudes[i];
        }
        CVector full = model.modes * factors;
        CHECK(full.imag().norm() <= 1e-9 * series.states.col(k).norm());
        CHECK((full.real() - reconstruct(model, t)).norm() == 0.0);
    }
}

TEST_CASE("regime forecast is horizon-invariant once transients die") {
    Vector c = random_vector(6, 722);
    Vector d = random_vector(6, 723);
    SnapshotSeries series;
    series.states.resize(6, 10);
    double w = 1.0;
    for (int k = 0; k < 10; ++k) {
        series.states.col(k) = 2.0 * c + w * d;
        w *= 0.5;
    }
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(2));
    // 0.5^40 = 9e-13 < 1e-12: both horizons are past the transient floor.
    Vector r1 = regime_state(model, series.t0 + 41.0).state;
    Vector r2 = regime_state(model, series.t0 + 82.0).state;
    CHECK((r1 - r2).norm() <= 1e-9 * r1.norm());
}

TEST_CASE("fit rejects defective inputs") {
    SnapshotSeries two;
    two.states = random_matrix(4, 2, 724);
    CHECK_THROWS_AS(fit_dmd(two), Error);

    SnapshotSeries series;
    series.states = random_matrix(4, 6, 725);
    CHECK_THROWS_AS(fit_dmd(series, RankPolicy::fixed(6)), Error);

    SnapshotSeries zero;
    zero.states = Matrix::Zero(4, 6);
    CHECK_THROWS_AS(fit_dmd(zero), Error);

    SnapshotSeries bad_dt;
    bad_dt.states = random_matrix(4, 6, 726);
    bad_dt.dt = 0.0;
    CHECK_THROWS_AS(fit_dmd(bad_dt), Error);
}

TEST_CASE("regime horizon must not precede the training end") {
    SnapshotSeries series;
    series.states = random_matrix(4, 6, 727);
    series.t0 = 0.0;
    series.dt = 1.0;
    DmdModel model = fit_dmd(series, RankPolicy::fixed(3));
    CHECK_THROWS_AS(regime_state(model, 4.0), Error);
}

TEST_CASE("model file round trips bitwise") {
    ScratchDir dir("dmd_model_io");
    Matrix b = random_matrix(3, 3, 728) * 0.6;
    Matrix q = orthonormal_columns(9, 3, 729);
    SnapshotSeries series = planted_series(q, b, random_vector(3, 730), 8);
    DmdModel model = fit_dmd(series, RankPolicy::fixed(3));
    auto path = dir / "model.bin";
    save_dmd_model(model, path);
    DmdModel loaded = load_dmd_model(path);
    CHECK(loaded.modes == model.modes);
    CHECK(loaded.eigenvalues == model.eigenvalues);
    CHECK(loaded.amplitudes == model.amplitudes);
    CHECK(loaded.dt == model.dt);
    CHECK(loaded.t0 == model.t0);
    CHECK(loaded.snapshot_count == model.snapshot_count);
    CHECK(loaded.training_residual == model.training_residual);

    // Same fit, same bytes.
    auto path2 = dir / "model2.bin";
    save_dmd_model(fit_dmd(series, RankPolicy::fixed(3)), path2);
    CHECK(read_binary_file(path) == read_binary_file(path2));

    write_text_file(dir / "junk.bin", "not a model");
    CHECK_THROWS_AS(load_dmd_model(dir / "junk.bin"), ParseError);
}

TEST_CASE("snapshot series directory round trips bitwise") {
    ScratchDir dir("dmd_series_io");
    TriMesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    std::vector<StateVector> steps;
    SplitMix64 rng(731);
    for (int k = 0; k < 4; ++k) {
        Field p;
        p.name = "p";
        p.kind = FieldKind::Scalar;
        p.values = random_vector(3, rng.next_u64());
        Field tau;
        tau.name = "tau";
        tau.kind = FieldKind::Vector3;
        tau.values = random_vector(9, rng.next_u64());
        TriMesh with = mesh.with_field(p).with_field(tau);
        steps.push_back(flatten_fields(with, {"p", "tau"}));
    }
    save_snapshot_series(dir.path, mesh, steps, 50.0, 0.5);
    SeriesOnDisk loaded = load_snapshot_series(dir.path);
    CHECK(loaded.series.t0 == 50.0);
    CHECK(loaded.series.dt == 0.5);
    CHECK(loaded.vertex_count == 3);
    REQUIRE(loaded.series.count() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(loaded.series.states.col(k) == steps[k].data);
    }
    REQUIRE(loaded.layout.size() == 2);
    CHECK(loaded.layout[0].name == "p");
    CHECK(loaded.layout[1].kind == FieldKind::Vector3);

    std::filesystem::remove(dir / "step_0002.csv");
    CHECK_THROWS_AS(load_snapshot_series(dir.path), Error);
}
