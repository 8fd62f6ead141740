#include <doctest.h>

#include <cmath>

#include "depstat/mc.hpp"
#include "depstat/numerics.hpp"

using namespace depstat;

TEST_CASE("model parsing and validation") {
    ModelSpec g = parse_model("gaussian-rho:0.5");
    CHECK(g.model == Model::GaussianRho);
    CHECK(g.param == 0.5);
    CHECK(parse_model("independent:3").dim == 3);
    CHECK(parse_model("ar1:0.8").is_serial());
    CHECK(parse_model("quadratic:0.3").param == 0.3);
    CHECK_THROWS_AS(parse_model("gaussian-rho:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("nope"), std::invalid_argument);

    CHECK(parse_model("independent").is_null_model());
    CHECK(parse_model("gaussian-rho:0").is_null_model());
    CHECK(parse_model("ar1:0").is_null_model());
    CHECK_FALSE(parse_model("gaussian-rho:0.2").is_null_model());
    CHECK_FALSE(parse_model("quadratic:0").is_null_model());
}

TEST_CASE("generate: shapes and the deterministic quadratic") {
    RngStream s = make_stream(1, 0);
    Dataset ind = generate(parse_model("independent:3"), 25, s);
    REQUIRE(ind.blocks.has_value());
    CHECK(ind.blocks->n() == 25);
    CHECK(ind.blocks->block_count() == 3);

    Dataset quad = generate(parse_model("quadratic:0"), 30, s);
    const Matrix& m = quad.blocks->data();
    for (int i = 0; i < 30; ++i) CHECK(m(i, 1) == m(i, 0) * m(i, 0));

    Dataset series = generate(parse_model("ar1:0.5"), 40, s);
    REQUIRE(series.series.has_value());
    CHECK(series.series->length() == 40);

    Dataset circ = generate(parse_model("circular:0"), 30, s);
    for (int i = 0; i < 30; ++i) {
        const double x = circ.blocks->data()(i, 0);
        const double y = circ.blocks->data()(i, 1);
        CHECK(x * x + y * y == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("generate is reproducible from the stream") {
    RngStream a = make_stream(44, 9);
    RngStream b = make_stream(44, 9);
    Dataset da = generate(parse_model("gaussian-rho:0.7"), 20, a);
    Dataset db = generate(parse_model("gaussian-rho:0.7"), 20, b);
    CHECK(da.blocks->data() == db.blocks->data());
}

TEST_CASE("gaussian-rho(0) columns are uncorrelated in the large") {
    RngStream s = make_stream(3, 0);
    Dataset d = generate(parse_model("gaussian-rho:0"), 4000, s);
    const Matrix& m = d.blocks->data();
    std::vector<double> x(4000), y(4000);
    for (int i = 0; i < 4000; ++i) {
        x[static_cast<std::size_t>(i)] = m(i, 0);
        y[static_cast<std::size_t>(i)] = m(i, 1);
    }
    CHECK(std::abs(pearson_correlation(x, y)) < 0.05);
}

TEST_CASE("quadratic dependence: dcor clearly positive, linear correlation small") {
    RngStream s = make_stream(8, 0);
    const int n = 600;
    Dataset d = generate(parse_model("quadratic:0"), n, s);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = d.blocks->data()(i, 0);
        y[static_cast<std::size_t>(i)] = d.blocks->data()(i, 1);
    }
    Exponent alpha(1.0);
    CenteredKernel kx = block_kernel(*d.blocks, 0, alpha);
    CenteredKernel ky = block_kernel(*d.blocks, 1, alpha);
    CHECK(dcor(kx, ky) > 2.0 * std::abs(pearson_correlation(x, y)));
    CHECK(dcor(kx, ky) > 0.2);
}

TEST_CASE("test_pvalue rejects incompatible data") {
    RngStream s = make_stream(5, 0);
    Dataset blockdata = generate(parse_model("independent:2"), 20, s);
    Dataset seriesdata = generate(parse_model("ar1:0"), 20, s);
    CHECK_THROWS_AS(test_pvalue(TestKind::Portmanteau, blockdata, 1.0, 9, 1, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(test_pvalue(TestKind::Dcov, seriesdata, 1.0, 9, 1, 2), std::invalid_argument);
}

TEST_CASE("power_curve table is reproducible and carries the se formula") {
    ScenarioSpec sc;
    sc.model = parse_model("gaussian-rho:0.6");
    sc.n = 20;
    sc.runs = 40;
    sc.tests = {TestKind::Dcov, TestKind::PearsonAbs};
    sc.seed = 99;
    sc.reps = 49;
    sc.threads = 2;
    ScenarioSpec scenarios[] = {sc};
    PowerTable t1 = power_curve(scenarios);
    PowerTable t2 = power_curve(scenarios);
    REQUIRE(t1.rows.size() == 2);
    CHECK(t1.rows[0].rate == t2.rows[0].rate);
    CHECK(t1.rows[1].rejections == t2.rows[1].rejections);
    for (const auto& row : t1.rows) {
        CHECK(row.std_error ==
              doctest::Approx(std::sqrt(row.rate * (1 - row.rate) / row.runs)).epsilon(1e-14));
        CHECK(row.rate >= 0.0);
        CHECK(row.rate <= 1.0);
    }
    std::string csv = t1.to_csv();
    CHECK(csv.find("test,model,n,level,runs,reps,rejections,rate,se") == 0);
    CHECK(csv.find("gaussian-rho(0.6)") != std::string::npos);
}

TEST_CASE("calibrate requires a null model and reports the diagnostics") {
    ScenarioSpec sc;
    sc.model = parse_model("gaussian-rho:0.5");
    sc.n = 20;
    sc.runs = 10;
    sc.tests = {TestKind::Dcov};
    sc.reps = 19;
    CHECK_THROWS_AS(calibrate(sc), std::invalid_argument);

    sc.model = parse_model("independent");
    sc.runs = 60;
    sc.seed = 7;
    sc.threads = 2;
    auto reports = calibrate(sc);
    REQUIRE(reports.size() == 1);
    const auto& rep = reports[0];
    CHECK(rep.p_values.size() == 60);
    CHECK(rep.ks_distance >= 0.0);
    CHECK(rep.ks_distance <= 1.0);
    CHECK(rep.ks_critical_5pct == doctest::Approx(ks_critical_5pct(60)));
    CHECK(rep.band_low < 0.05);
    CHECK(rep.band_high > 0.05);
    CHECK(rep.row.rate <= 0.35);  // loose sanity bound at 60 runs
}

TEST_CASE("binomial helpers: pmf sums to one, band brackets the level") {
    NeumaierSum total;
    for (int k = 0; k <= 100; ++k) total.add(binomial_pmf(k, 100, 0.3));
    CHECK(total.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binomial_cdf(100, 100, 0.3) == doctest::Approx(1.0));
    CHECK(binomial_quantile(0.0, 100, 0.3) == 0);

    double lo, hi;
    binomial_band_99(500, 0.05, &lo, &hi);
    CHECK(lo == doctest::Approx(13.0 / 500));
    CHECK(hi == doctest::Approx(38.0 / 500));
}

TEST_CASE("ks distance: pinned small cases") {
    // single value at 0.5: D = 0.5
    std::vector<double> one{0.5};
    CHECK(ks_uniform_distance(one) == doctest::Approx(0.5));
    // perfectly spread grid i/(n+1) keeps D small
    std::vector<double> grid;
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
    CHECK(ks_uniform_distance(grid) <= 0.011);
    // everything piled at 1.0: F_n is 0 just below 1, so D = 1
    std::vector<double> pile(10, 1.0);
    CHECK(ks_uniform_distance(pile) == doctest::Approx(1.0));
}

TEST_CASE("miscalibration study: runs=1 emits no verdict") {
    MiscalibrationReport rep = residual_miscalibration_study(0.5, 30, 1, 19, 5);
    CHECK(rep.runs == 1);
    CHECK_FALSE(rep.verdict_available);
    CHECK(rep.p_bootstrap.size() == 1);
    CHECK(rep.p_naive.size() == 1);
    CHECK_THROWS_AS(residual_miscalibration_study(1.0, 30, 5, 9, 1), std::invalid_argument);
}

TEST_CASE("miscalibration study is reproducible") {
    MiscalibrationReport a = residual_miscalibration_study(0.4, 40, 6, 19, 11, 1.0, 2);
    MiscalibrationReport b = residual_miscalibration_study(0.4, 40, 6, 19, 11, 1.0, 1);
    CHECK(a.p_bootstrap == b.p_bootstrap);
    CHECK(a.p_naive == b.p_naive);
}
