// Acceptance suite: nine go/no-go checks run end to end against the library
// and the CLI binary (path in $DEPSTAT_CLI). Prints one PASS/FAIL line per
// criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "depstat/depstat.hpp"
#include "test_oracles.hpp"

using namespace depstat;

namespace {

int g_threads = 0;  // resolved in main

Matrix column(std::initializer_list<double> values) {
    Matrix m(static_cast<int>(values.size()), 1);
    int i = 0;
    for (double v : values) m(i++, 0) = v;
    return m;
}

BlockSample univariate_sample(const std::vector<Matrix>& cols) {
    const int n = cols[0].rows;
    Matrix joined(n, static_cast<int>(cols.size()));
    BlockSpec spec;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        for (int i = 0; i < n; ++i) joined(i, static_cast<int>(k)) = cols[k](i, 0);
        spec.blocks.push_back({static_cast<int>(k)});
    }
    return BlockSample(std::move(joined), std::move(spec));
}

CenteredKernel kernel_of(const Matrix& block, double alpha) {
    return double_center(pairwise_distances(block, Exponent(alpha)));
}

// ---------------------------------------------------------------- criterion 1
bool oracle_equivalence(std::string& detail) {
    oracle::FixtureRng rng(1001);
    double worst = 0.0;
    const double alphas[] = {0.5, 1.0, 1.5};
    for (int t = 0; t < 100; ++t) {
        const double alpha = alphas[t % 3];
        const int n = 3 + rng.below(28);
        Matrix x = oracle::random_matrix(n, 1 + rng.below(3), rng);
        Matrix y = oracle::random_matrix(n, 1 + rng.below(3), rng);
        const double got = dcov_stat(kernel_of(x, alpha), kernel_of(y, alpha));
        const double expected = oracle::brute_dcov(x, y, alpha);
        worst = std::max(worst, std::abs(got - expected));
    }
    Matrix line = column({0, 1, 2});
    const double fixture = dcov_stat(kernel_of(line, 1.0), kernel_of(line, 1.0));
    const double fixture_err = std::abs(fixture - 40.0 / 81.0);
    std::ostringstream os;
    os << "max |dcov - oracle| = " << worst << " over 100 fixtures; |V(0,1,2) - 40/81| = "
       << fixture_err;
    detail = os.str();
    return worst <= 1e-10 && fixture_err <= 1e-12;
}

// ---------------------------------------------------------------- criterion 2
bool mobius_identity(std::string& detail) {
    oracle::FixtureRng rng(1002);
    double worst_pair = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = 3 + rng.below(20);
        Matrix x = oracle::random_matrix(n, 1 + rng.below(2), rng);
        Matrix y = oracle::random_matrix(n, 1 + rng.below(2), rng);
        Matrix joined(n, x.cols + y.cols);
        BlockSpec spec;
        spec.blocks.resize(2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < x.cols; ++j) joined(i, j) = x(i, j);
            for (int j = 0; j < y.cols; ++j) joined(i, x.cols + j) = y(i, j);
        }
        for (int j = 0; j < x.cols; ++j) spec.blocks[0].push_back(j);
        for (int j = 0; j < y.cols; ++j) spec.blocks[1].push_back(x.cols + j);
        BlockSample sample(joined, spec);
        const double via_mobius = mobius_dcov(sample, 0b11u, Exponent(1.0));
        const double via_dcov = n * dcov_stat(kernel_of(x, 1.0), kernel_of(y, 1.0));
        worst_pair = std::max(worst_pair, std::abs(via_mobius - via_dcov));
    }
    double worst_triple = 0.0;
    for (int t = 0; t < 40; ++t) {
        const int n = 3 + rng.below(15);
        Matrix a = oracle::random_matrix(n, 1, rng);
        Matrix b = oracle::random_matrix(n, 1, rng);
        Matrix c = oracle::random_matrix(n, 1, rng);
        BlockSample sample = univariate_sample({a, b, c});
        const double got = mobius_dcov(sample, 0b111u, Exponent(1.0));
        const double expected = oracle::brute_mobius_dcov({a, b, c}, {0, 1, 2}, 1.0);
        worst_triple = std::max(worst_triple, std::abs(got - expected));
    }
    std::ostringstream os;
    os << "max ||A|=2 gap| = " << worst_pair << "; max |A|=3 oracle gap = " << worst_triple;
    detail = os.str();
    return worst_pair <= 1e-10 && worst_triple <= 1e-10;
}

// ---------------------------------------------------------------- criterion 3
bool rank_invariance(std::string& detail) {
    oracle::FixtureRng rng(1003);
    Matrix base(40, 3);
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 3; ++j) base(i, j) = 2.0 * rng.normalish();
    }
    BlockSpec spec = parse_block_spec("0,1;2");
    auto transforms = std::vector<std::function<double(double)>>{
        [](double v) { return v * v * v; },
        [](double v) { return std::exp(v); },
        [](double v) { return 5.0 * v + 2.0; },
    };
    BlockSample ranked_base = BlockSample(base, spec).ranked();
    Exponent alpha(1.0);
    CenteredKernel kx0 = block_kernel(ranked_base, 0, alpha);
    CenteredKernel ky0 = block_kernel(ranked_base, 1, alpha);
    const double dcov0 = dcov_stat(kx0, ky0);
    const double dcor0 = dcor(kx0, ky0);
    const double bn0 = bn_stat(ranked_base.block(0), ranked_base.block(1));
    const double mob0 = mobius_dcov(ranked_base, 0b11u, alpha);
    const double mobcvm0 = mobius_cvm(ranked_base, 0b11u);
    const double joint0 = joint_cvm(ranked_base);
    SeriesSample ranked_series = SeriesSample(base).ranked();
    const double lag0 = lag_dcov(ranked_series, 1, alpha);

    bool ok = true;
    for (const auto& g : transforms) {
        Matrix w = base;
        for (auto& v : w.v) v = g(v);
        BlockSample ranked = BlockSample(w, spec).ranked();
        CenteredKernel kx = block_kernel(ranked, 0, alpha);
        CenteredKernel ky = block_kernel(ranked, 1, alpha);
        ok = ok && dcov_stat(kx, ky) == dcov0;
        ok = ok && dcor(kx, ky) == dcor0;
        ok = ok && bn_stat(ranked.block(0), ranked.block(1)) == bn0;
        ok = ok && mobius_dcov(ranked, 0b11u, alpha) == mob0;
        ok = ok && mobius_cvm(ranked, 0b11u) == mobcvm0;
        ok = ok && joint_cvm(ranked) == joint0;
        ok = ok && lag_dcov(SeriesSample(w).ranked(), 1, alpha) == lag0;
    }
    detail = ok ? "dcov, dcor, bn, mobius, mobius-cvm, joint-cvm, lag-dcov all bit-equal "
                  "across x^3, exp(x), 5x+2"
                : "a rank-based statistic changed under a monotone transform";
    return ok;
}

// ---------------------------------------------------------------- criterion 4
bool cvm_fixtures(std::string& detail) {
    const double b = bn_stat(column({0, 1}), column({0, 1}));
    bool ok = (b == 1.0 / 32);

    oracle::FixtureRng rng(1004);
    double max_b = 0.0, min_b = 1.0;
    bool bit_equal = true;
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + rng.below(20);
        Matrix x = oracle::random_matrix(n, 1, rng);
        Matrix y = oracle::random_matrix(n, 1, rng);
        const double v = bn_stat(x, y);
        max_b = std::max(max_b, v);
        min_b = std::min(min_b, v);
        BlockSample sample = univariate_sample({x, y});
        bit_equal = bit_equal && (joint_cvm(sample) == v);
    }
    ok = ok && min_b >= 0.0 && max_b <= 1.0 / 16 && bit_equal;
    std::ostringstream os;
    os << "bn fixture = " << b << " (1/32 = " << 1.0 / 32 << "); range over 1000 = [" << min_b
       << ", " << max_b << "]; joint_cvm(d=2) bit-equal: " << (bit_equal ? "yes" : "no");
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------- criterion 5
bool null_calibration(std::string& detail) {
    // The spec pins the acceptance band for Binomial(500, 0.05) at 99%.
    const double band_lo = 0.028, band_hi = 0.078;
    struct Cell {
        TestKind test;
        const char* model;
        std::uint64_t seed;
    };
    const Cell cells[] = {
        {TestKind::Dcov, "independent:2", 20250501},
        {TestKind::RankDcov, "independent:2", 20250502},
        {TestKind::Cvm, "independent:2", 20250503},
        {TestKind::MobiusCombined, "independent:3", 20250504},
        {TestKind::Portmanteau, "ar1:0", 20250505},
    };
    std::ostringstream os;
    bool ok = true;
    for (const Cell& cell : cells) {
        ScenarioSpec sc;
        sc.model = parse_model(cell.model);
        sc.n = 50;
        sc.runs = 500;
        sc.level = 0.05;
        sc.tests = {cell.test};
        sc.seed = cell.seed;
        sc.reps = 499;
        sc.lags = 3;
        sc.threads = g_threads;
        auto reports = calibrate(sc);
        const double rate = reports[0].row.rate;
        const bool in_band = rate >= band_lo && rate <= band_hi;
        ok = ok && in_band;
        os << test_kind_name(cell.test) << "=" << rate << (in_band ? " " : " [OUT] ");
    }
    os << "band=[" << band_lo << ", " << band_hi << "]";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------- criterion 6
bool consistency_trend(std::string& detail) {
    std::vector<ScenarioSpec> scenarios;
    const int sizes[] = {25, 50, 100};
    for (int i = 0; i < 3; ++i) {
        ScenarioSpec sc;
        sc.model = parse_model("gaussian-rho:0.5");
        sc.n = sizes[i];
        sc.runs = 500;
        sc.tests = {TestKind::Dcov};
        sc.seed = 20250601 + static_cast<std::uint64_t>(i);
        sc.reps = 199;
        sc.threads = g_threads;
        scenarios.push_back(sc);
    }
    PowerTable table = power_curve(scenarios);
    std::ostringstream os;
    bool ok = true;
    for (int i = 0; i < 3; ++i) os << "n=" << sizes[i] << ": " << table.rows[static_cast<std::size_t>(i)].rate << "  ";
    for (int i = 0; i + 1 < 3; ++i) {
        const auto& a = table.rows[static_cast<std::size_t>(i)];
        const auto& b = table.rows[static_cast<std::size_t>(i) + 1];
        const double step = b.rate - a.rate;
        const double se_step =
            std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
        if (!(step > 2.0 * se_step)) {
            ok = false;
            os << "[step " << a.n << "->" << b.n << " = " << step << " <= 2*se " << 2 * se_step
               << "]";
        }
    }
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------- criterion 7
bool nonmonotone_detection(std::string& detail) {
    ScenarioSpec sc;
    sc.model = parse_model("quadratic:0.3");
    sc.n = 100;
    sc.runs = 500;
    sc.tests = {TestKind::Dcov, TestKind::RankDcov, TestKind::PearsonAbs};
    sc.seed = 20250701;
    sc.reps = 199;
    sc.threads = g_threads;
    ScenarioSpec scenarios[] = {sc};
    PowerTable table = power_curve(scenarios);
    const double p_dcov = table.rows[0].rate;
    const double p_rank = table.rows[1].rate;
    const double p_pearson = table.rows[2].rate;
    std::ostringstream os;
    os << "dcov=" << p_dcov << " rank-dcov=" << p_rank << " pearson=" << p_pearson;
    detail = os.str();
    return p_dcov >= 0.5 && p_rank >= 0.5 && p_pearson < 0.2;
}

// ---------------------------------------------------------------- criterion 8
bool residual_effect(std::string& detail) {
    MiscalibrationReport rep =
        residual_miscalibration_study(0.8, 200, 300, 499, 777, 1.0, g_threads);
    std::ostringstream os;
    os << "KS bootstrap = " << rep.ks_bootstrap << " (crit " << rep.ks_critical_5pct
       << "), KS naive = " << rep.ks_naive
       << (rep.naive_uniform ? " (naive looks uniform!)" : " (naive non-uniform, as expected)");
    detail = os.str();
    return rep.verdict_available && rep.bootstrap_uniform && !rep.naive_uniform;
}

// ---------------------------------------------------------------- criterion 9
struct CliRunner {
    std::string cli_path;

    bool available() const { return !cli_path.empty(); }

    int run(const std::string& args, const std::string& out_path) const {
        std::string cmd = cli_path + " " + args + " > " + out_path + " 2>/dev/null";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool cli_determinism(std::string& detail, const CliRunner& cli) {
    if (!cli.available()) {
        detail = "CLI binary not found (set DEPSTAT_CLI)";
        return false;
    }
    // a small but nontrivial data set
    oracle::FixtureRng rng(1009);
    Matrix data = oracle::random_matrix(40, 3, rng);
    write_csv(data, "/tmp/depstat_acc_data.csv");

    const std::pair<const char*, const char*> invocations[] = {
        {"dcov --input /tmp/depstat_acc_data.csv --blocks \"0;1,2\" --reps 499 --seed 31 --rank",
         "dcov"},
        {"mobius --input /tmp/depstat_acc_data.csv --blocks \"0;1;2\" --reps 199 --seed 32",
         "mobius"},
        {"serial --input /tmp/depstat_acc_data.csv --lags 3 --reps 199 --seed 33 --residual-ar1",
         "serial-residual"},
        {"embed --input /tmp/depstat_acc_data.csv --window 3 --reps 99 --seed 34", "embed"},
    };
    for (const auto& [args, name] : invocations) {
        std::string a1 = std::string(args) + " --threads 1";
        std::string a4 = std::string(args) + " --threads 4";
        if (cli.run(a1, "/tmp/depstat_acc_a.json") != 0 ||
            cli.run(a4, "/tmp/depstat_acc_b.json") != 0) {
            detail = std::string("CLI run failed for ") + name;
            return false;
        }
        std::string j1 = slurp("/tmp/depstat_acc_a.json");
        std::string j2 = slurp("/tmp/depstat_acc_b.json");
        if (j1.empty() || j1 != j2) {
            detail = std::string("JSON differs across --threads for ") + name;
            return false;
        }
    }

    // rank invariance through the CLI: cubed data, byte-identical output
    Matrix cubed = data;
    for (auto& v : cubed.v) v = v * v * v;
    write_csv(cubed, "/tmp/depstat_acc_cubed.csv");
    cli.run("dcov --input /tmp/depstat_acc_data.csv --blocks \"0;1,2\" --reps 199 --seed 35 --rank",
            "/tmp/depstat_acc_a.json");
    cli.run("dcov --input /tmp/depstat_acc_cubed.csv --blocks \"0;1,2\" --reps 199 --seed 35 --rank",
            "/tmp/depstat_acc_b.json");
    if (slurp("/tmp/depstat_acc_a.json") != slurp("/tmp/depstat_acc_b.json")) {
        detail = "rank-based CLI output changed under a monotone transform";
        return false;
    }
    detail = "byte-identical JSON across --threads for dcov/mobius/serial-residual/embed, "
             "and across x^3 with --rank";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    g_threads = resolve_threads(0);
    CliRunner cli;
    if (const char* env = std::getenv("DEPSTAT_CLI")) cli.cli_path = env;
    if (argc > 1) cli.cli_path = argv[1];

    struct Criterion {
        int id;
        const char* title;
        std::function<bool(std::string&)> run;
    };
    const Criterion criteria[] = {
        {1, "dcov oracle equivalence", oracle_equivalence},
        {2, "Mobius identity vs oracles", mobius_identity},
        {3, "rank invariance (bit-level)", rank_invariance},
        {4, "CvM fixtures and bounds", cvm_fixtures},
        {5, "null calibration in the binomial band", null_calibration},
        {6, "power consistency trend", consistency_trend},
        {7, "nonmonotone dependence detection", nonmonotone_detection},
        {8, "residual bootstrap calibration", residual_effect},
        {9, "CLI determinism across threads", [&](std::string& d) { return cli_determinism(d, cli); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s [%.1fs] — %s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                    secs, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criteria FAILED\n", failures);
    else std::printf("all 9 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
