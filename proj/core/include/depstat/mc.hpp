#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depstat/data.hpp"
#include "depstat/rng.hpp"
#include "depstat/serial.hpp"

namespace depstat {

/// Data-generating models for the simulation studies. The menu spans linear
/// (gaussian-rho), nonlinear non-monotone (quadratic, circular) and serial
/// (ar1) dependence.
enum class Model { Independent, GaussianRho, Quadratic, Circular, Ar1 };

struct ModelSpec {
    Model model = Model::Independent;
    double param = 0.0;  // rho | sigma | sigma | phi; unused for Independent
    int dim = 2;         // number of univariate blocks for Independent

    void validate() const;
    bool is_null_model() const;   // generates independent / white-noise data
    bool is_serial() const { return model == Model::Ar1; }
    std::string name() const;     // e.g. "gaussian-rho(0.5)"
};

ModelSpec parse_model(const std::string& descriptor);  // "gaussian-rho:0.5"

/// Tests the harness can run on generated data.
enum class TestKind { Dcov, RankDcov, Cvm, MobiusCombined, MobiusCvmCombined, Portmanteau, PearsonAbs };

const char* test_kind_name(TestKind k);
TestKind parse_test_kind(const std::string& name);

/// One generated data set. Block models fill `blocks`; ar1 fills `series`.
struct Dataset {
    std::optional<BlockSample> blocks;
    std::optional<SeriesSample> series;
};

Dataset generate(const ModelSpec& model, int n, RngStream& stream);

/// p-value of one test on one data set. `lags` applies to Portmanteau only.
double test_pvalue(TestKind kind, const Dataset& data, double alpha, int reps,
                   std::uint64_t seed, int lags);

struct ScenarioSpec {
    ModelSpec model;
    int n = 50;
    int runs = 500;
    double level = 0.05;
    std::vector<TestKind> tests;
    std::uint64_t seed = 0;
    int reps = 499;
    double alpha = 1.0;
    int lags = 3;
    int threads = 1;

    void validate() const;
};

struct PowerRow {
    std::string test;
    std::string model;
    int n = 0;
    double level = 0.05;
    int runs = 0;
    int reps = 0;
    int rejections = 0;
    double rate = 0.0;
    double std_error = 0.0;  // sqrt(rate (1-rate) / runs)
};

struct PowerTable {
    std::vector<PowerRow> rows;

    std::string to_csv() const;
    void write_csv(const std::string& path) const;
};

/// Power (rejection rate) over every test x scenario cell. Each run r draws
/// its data and its inner test seed from the stream (scenario.seed, r), so
/// tables are exactly reproducible and thread-count independent.
PowerTable power_curve(std::span<const ScenarioSpec> scenarios);

/// Null-calibration report: rejection rate with an exact-binomial acceptance
/// band plus the KS distance of the run p-values from uniform. Rejects
/// scenarios whose model is not a null model for the tests requested.
struct CalibrationReport {
    PowerRow row;
    double ks_distance = 0.0;
    double ks_critical_5pct = 0.0;
    double band_low = 0.0;    // exact binomial 99% band around the level
    double band_high = 1.0;
    std::vector<double> p_values;
};

std::vector<CalibrationReport> calibrate(const ScenarioSpec& scenario);

/// Exact binomial 99% acceptance band around `level` for `runs` trials,
/// as count quantiles divided by runs (never a normal approximation).
void binomial_band_99(int runs, double level, double* low, double* high);

/// The residual-effect demonstration: for each run, simulate AR(1)(phi),
/// fit, and compute the lag-1 residual dcov p-value two ways - naive
/// whole-series permutation of the residuals vs parametric bootstrap.
/// Estimation noise shifts the residual statistic's null law, so only the
/// bootstrap arm stays uniform.
struct MiscalibrationReport {
    double phi = 0.0;
    int n = 0;
    int runs = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> p_bootstrap;
    std::vector<double> p_naive;
    double ks_bootstrap = 0.0;
    double ks_naive = 0.0;
    double ks_critical_5pct = 0.0;
    bool verdict_available = false;  // false when runs are too few for the KS check
    bool bootstrap_uniform = false;  // ks_bootstrap < critical value
    bool naive_uniform = false;
};

MiscalibrationReport residual_miscalibration_study(double phi, int n, int runs, int reps,
                                                   std::uint64_t seed, double alpha = 1.0,
                                                   int threads = 1);

}  // namespace depstat
