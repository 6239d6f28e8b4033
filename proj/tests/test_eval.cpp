#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "naryq/error.hpp"
#include "naryq/eval.hpp"
#include "oracles.hpp"

namespace {

naryq::RankedList list_of(std::vector<int> ids) {
    naryq::RankedList l;
    l.ids = std::move(ids);
    l.distances.assign(l.ids.size(), 0.0);
    return l;
}

naryq::NeighborList truth_of(std::uint32_t nn) {
    naryq::NeighborList t;
    t.ids = {nn};
    t.distances = {0.0};
    return t;
}

// Small synthetic run shared by the harness checks.
naryq::ExperimentConfig tiny_config() {
    naryq::ExperimentConfig c;
    c.seed = 7;
    c.dim = 8;
    c.train_count = 150;
    c.base_count = 100;
    c.query_count = 20;
    c.clusters = 8;
    c.spread = 0.2;
    c.method = naryq::EvalMethod::lsq_nary;
    c.bits_per_dim = 2;
    c.bit_budget = 16;
    c.lambda = 0.0;
    c.iters = 10;
    c.r_grid = {1, 2, 4, 8, 16};
    return c;
}

} // namespace

TEST_CASE("recall counts hits by rank") {
    SUBCASE("hand-counted ranks") {
        // Query 0 hits at rank 0, query 1 at rank 3, query 2 never.
        std::vector<naryq::RankedList> retrieved = {
            list_of({5, 1, 2, 3}),
            list_of({9, 8, 7, 5}),
            list_of({1, 2, 3, 4}),
        };
        std::vector<naryq::NeighborList> truth = {truth_of(5), truth_of(5),
                                                  truth_of(5)};
        auto curve = naryq::recall_at_r(retrieved, truth, {1, 2, 4, 8});
        REQUIRE(curve.recall.size() == 4);
        CHECK(curve.recall[0] == doctest::Approx(1.0 / 3.0));
        CHECK(curve.recall[1] == doctest::Approx(1.0 / 3.0));
        CHECK(curve.recall[2] == doctest::Approx(2.0 / 3.0));
        CHECK(curve.recall[3] == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("half the queries hit inside the cutoff") {
        std::vector<naryq::RankedList> retrieved;
        std::vector<naryq::NeighborList> truth;
        for (int q = 0; q < 100; ++q) {
            std::vector<int> ids;
            for (int r = 0; r < 12; ++r) ids.push_back(1000 + r);
            // Even queries find their neighbor at rank 4, odd ones at rank 10.
            ids[q % 2 == 0 ? 4 : 10] = 77;
            retrieved.push_back(list_of(ids));
            truth.push_back(truth_of(77));
        }
        auto curve = naryq::recall_at_r(retrieved, truth, {1, 10, 12});
        CHECK(curve.recall[0] == doctest::Approx(0.0));
        CHECK(curve.recall[1] == doctest::Approx(0.5));
        CHECK(curve.recall[2] == doctest::Approx(1.0));
    }
    SUBCASE("all hits at rank zero give constant one") {
        std::vector<naryq::RankedList> retrieved(6, list_of({3, 2, 1}));
        std::vector<naryq::NeighborList> truth(6, truth_of(3));
        auto curve = naryq::recall_at_r(retrieved, truth, {1, 2, 4});
        for (double v : curve.recall) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("validation") {
        std::vector<naryq::RankedList> one = {list_of({1})};
        std::vector<naryq::NeighborList> truth = {truth_of(1)};
        CHECK_THROWS_AS(
            (void)naryq::recall_at_r({}, {}, {1}), naryq::Error);
        CHECK_THROWS_AS(
            (void)naryq::recall_at_r(one, {truth_of(1), truth_of(2)}, {1}),
            naryq::Error);
        CHECK_THROWS_AS((void)naryq::recall_at_r(one, truth, {}), naryq::Error);
        CHECK_THROWS_AS((void)naryq::recall_at_r(one, truth, {0, 2}),
                        naryq::Error);
        CHECK_THROWS_AS((void)naryq::recall_at_r(one, truth, {4, 2}),
                        naryq::Error);
        CHECK_THROWS_AS((void)naryq::recall_at_r(one, truth, {2, 2}),
                        naryq::Error);
        std::vector<naryq::NeighborList> empty_truth(1);
        CHECK_THROWS_AS((void)naryq::recall_at_r(one, empty_truth, {1}),
                        naryq::Error);
    }
}

TEST_CASE("auc is the normalized trapezoid over log2 R") {
    SUBCASE("constant curves") {
        naryq::RecallCurve one;
        one.r_grid = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
        one.recall.assign(one.r_grid.size(), 1.0);
        CHECK(naryq::auc_recall(one) == doctest::Approx(1.0).epsilon(1e-12));
        naryq::RecallCurve half = one;
        half.recall.assign(half.r_grid.size(), 0.5);
        CHECK(naryq::auc_recall(half) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("piecewise curve matches the oracle") {
        naryq::RecallCurve curve;
        curve.r_grid = {1, 2, 4, 8, 32, 100};
        curve.recall = {0.1, 0.3, 0.35, 0.6, 0.9, 1.0};
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < curve.r_grid.size(); ++i) {
            xs.push_back(std::log2(static_cast<double>(curve.r_grid[i])));
            ys.push_back(curve.recall[i]);
        }
        const double span = xs.back() - xs.front();
        CHECK(naryq::auc_recall(curve) ==
              doctest::Approx(oracle::trapezoid(xs, ys) / span).epsilon(1e-12));
    }
    SUBCASE("single-point grid returns its recall") {
        naryq::RecallCurve curve;
        curve.r_grid = {10};
        curve.recall = {0.73};
        CHECK(naryq::auc_recall(curve) == doctest::Approx(0.73));
    }
    SUBCASE("empty curve is rejected") {
        CHECK_THROWS_AS((void)naryq::auc_recall({}), naryq::Error);
    }
}

TEST_CASE("method and strategy names round-trip") {
    using naryq::EvalMethod;
    for (auto m : {EvalMethod::lsq_nary, EvalMethod::lsq_binary, EvalMethod::itq,
                   EvalMethod::pq, EvalMethod::ckmeans, EvalMethod::okmeans})
        CHECK(naryq::parse_eval_method(naryq::eval_method_name(m)) == m);
    CHECK(naryq::eval_method_name(EvalMethod::lsq_nary) == "lsq-nary");
    CHECK_THROWS_AS((void)naryq::parse_eval_method("sh"), naryq::Error);
    for (auto s :
         {naryq::Strategy::distance_estimation, naryq::Strategy::subset_indexing})
        CHECK(naryq::parse_strategy(naryq::strategy_name(s)) == s);
    CHECK_THROWS_AS((void)naryq::parse_strategy("linear"), naryq::Error);
}

TEST_CASE("parse_config reads every key") {
    std::istringstream in(
        "# benchmark cell\n"
        "seed = 13\n"
        "dim = 24\n"
        "train_count = 400   # fits in memory\n"
        "base_count = 900\n"
        "query_count = 33\n"
        "clusters = 12\n"
        "spread = 0.35\n"
        "train_path = a.f32\n"
        "base_path = b.f32\n"
        "query_path = q.f32\n"
        "\n"
        "method = ckmeans\n"
        "bits_per_dim = 3\n"
        "bit_budget = 96\n"
        "lambda = 0.25\n"
        "iters = 17\n"
        "strategy = subset-indexing\n"
        "k = 64\n"
        "r_grid = 1,4,16,64\n"
        "emit_trace = 1\n");
    auto c = naryq::parse_config(in);
    CHECK(c.seed == 13);
    CHECK(c.dim == 24);
    CHECK(c.train_count == 400);
    CHECK(c.base_count == 900);
    CHECK(c.query_count == 33);
    CHECK(c.clusters == 12);
    CHECK(c.spread == doctest::Approx(0.35));
    CHECK(c.train_path == "a.f32");
    CHECK(c.base_path == "b.f32");
    CHECK(c.query_path == "q.f32");
    CHECK(c.method == naryq::EvalMethod::ckmeans);
    CHECK(c.bits_per_dim == 3);
    CHECK(c.bit_budget == 96);
    CHECK(c.lambda == doctest::Approx(0.25));
    CHECK(c.iters == 17);
    CHECK(c.strategy == naryq::Strategy::subset_indexing);
    CHECK(c.k == 64);
    CHECK(c.r_grid == std::vector<int>{1, 4, 16, 64});
    CHECK(c.emit_trace);
}

TEST_CASE("parse_config rejects malformed input") {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return naryq::parse_config(in);
    };
    CHECK_THROWS_AS((void)parse("verbosity = 3\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("just some words\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("dim = eight\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("spread = fuzzy\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("dim = 8.5\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("method = simhash\n"), naryq::Error);
    CHECK_THROWS_AS((void)parse("r_grid = \n"), naryq::Error);
    CHECK_THROWS_AS((void)naryq::parse_config_file("/no/such/config.cfg"),
                    naryq::Error);
    // Comments and blank lines alone are a valid (default) config.
    CHECK(parse("# nothing\n\n").dim == 32);
}

TEST_CASE("near-lossless codes rank almost like exact search") {
    auto c = tiny_config();
    c.dim = 4;
    c.bit_budget = 40;
    c.bits_per_dim = 10;  // 1024 levels per dimension at m = D
    c.iters = 30;
    auto r = naryq::run_experiment(c);
    CHECK(r.code_length == 4);
    CHECK(r.effective_bits == 40);
    REQUIRE(r.curve.recall.size() == c.r_grid.size());
    CHECK(r.curve.recall.front() >= 0.9);
    CHECK(r.train_error < 1e-2);
}

TEST_CASE("experiment results are internally consistent") {
    auto c = tiny_config();
    auto r = naryq::run_experiment(c);
    CHECK(r.config.seed == c.seed);
    CHECK(r.code_length == 8);     // min(dim, 16/2)
    CHECK(r.effective_bits == 16);
    CHECK(r.curve.r_grid == c.r_grid);
    for (std::size_t i = 1; i < r.curve.recall.size(); ++i)
        CHECK(r.curve.recall[i] >= r.curve.recall[i - 1]);
    for (double v : r.curve.recall) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(r.auc == doctest::Approx(naryq::auc_recall(r.curve)).epsilon(1e-12));
    CHECK(r.train_error >= 0.0);
    CHECK(r.trace.empty());  // emit_trace off

    SUBCASE("same config twice gives identical results") {
        auto again = naryq::run_experiment(c);
        CHECK(again.curve.recall == r.curve.recall);
        CHECK(again.auc == r.auc);
        CHECK(again.train_error == r.train_error);
    }
    SUBCASE("subset indexing returns at most k candidates per query") {
        auto si = c;
        si.strategy = naryq::Strategy::subset_indexing;
        si.k = 10;
        si.r_grid = {1, 2, 4, 8};
        auto rs = naryq::run_experiment(si);
        for (double v : rs.curve.recall) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("budget plans follow the floor arithmetic") {
    auto c = tiny_config();
    c.dim = 32;
    c.train_count = 200;
    c.base_count = 120;
    c.query_count = 10;
    c.r_grid = {1, 2, 4};

    SUBCASE("n-ary floor: 64 bits at 5 per dim is 12 dims") {
        c.bit_budget = 64;
        c.bits_per_dim = 5;
        auto r = naryq::run_experiment(c);
        CHECK(r.code_length == 12);
        CHECK(r.effective_bits == 60);
    }
    SUBCASE("code length is capped at the data dimension") {
        c.bit_budget = 256;
        c.bits_per_dim = 2;
        auto r = naryq::run_experiment(c);
        CHECK(r.code_length == 32);
        CHECK(r.effective_bits == 64);
    }
    SUBCASE("binary methods spend one bit per dimension") {
        c.method = naryq::EvalMethod::itq;
        c.bits_per_dim = 1;
        c.bit_budget = 64;
        c.iters = 10;
        auto r = naryq::run_experiment(c);
        CHECK(r.code_length == 32);  // min(dim, budget)
        CHECK(r.effective_bits == 32);
    }
    SUBCASE("binary with bits_per_dim above one needs subset indexing") {
        c.method = naryq::EvalMethod::itq;
        c.bits_per_dim = 2;
        CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
    }
    SUBCASE("subset indexing rounds binary codes to whole chunks") {
        c.method = naryq::EvalMethod::lsq_binary;
        c.strategy = naryq::Strategy::subset_indexing;
        c.bits_per_dim = 5;
        c.bit_budget = 64;
        c.k = 20;
        auto r = naryq::run_experiment(c);
        CHECK(r.code_length == 30);  // min(32, 64) rounded down to 6 chunks
        CHECK(r.effective_bits == 30);
    }
    SUBCASE("budgets below one chunk or one dimension are rejected") {
        c.method = naryq::EvalMethod::itq;
        c.strategy = naryq::Strategy::subset_indexing;
        c.bits_per_dim = 5;
        c.bit_budget = 3;
        CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
        c.method = naryq::EvalMethod::lsq_nary;
        c.strategy = naryq::Strategy::distance_estimation;
        CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
    }
    SUBCASE("bits_per_dim range") {
        c.bits_per_dim = 0;
        CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
        c.bits_per_dim = 17;
        CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
    }
}

TEST_CASE("convergence traces shrink and pq has none") {
    auto c = tiny_config();
    c.emit_trace = true;

    for (auto method :
         {naryq::EvalMethod::lsq_nary, naryq::EvalMethod::lsq_binary,
          naryq::EvalMethod::itq, naryq::EvalMethod::ckmeans,
          naryq::EvalMethod::okmeans}) {
        CAPTURE(naryq::eval_method_name(method));
        auto cc = c;
        cc.method = method;
        if (method == naryq::EvalMethod::itq || method == naryq::EvalMethod::lsq_binary ||
            method == naryq::EvalMethod::okmeans)
            cc.bits_per_dim = 1;
        auto trace = naryq::convergence_trace(cc);
        REQUIRE(!trace.empty());
        CHECK(trace.size() <= static_cast<std::size_t>(cc.iters) + 1);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] <= trace[i - 1] + 1e-9 * (1.0 + std::abs(trace[i - 1])));
        // run_experiment carries the same trace when asked.
        auto r = naryq::run_experiment(cc);
        CHECK(r.trace == trace);
    }

    auto pq = c;
    pq.method = naryq::EvalMethod::pq;
    CHECK_THROWS_AS((void)naryq::convergence_trace(pq), naryq::Error);
}

TEST_CASE("codes as embedding features separate labeled clusters") {
    // Two well-separated blobs along the first axis.
    const auto blob = [](unsigned seed, int count, std::vector<int>& labels) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> g(0.0, 0.1);
        Eigen::MatrixXd pts(3, count);
        labels.clear();
        for (int j = 0; j < count; ++j) {
            const int label = j % 2;
            labels.push_back(label);
            for (int i = 0; i < 3; ++i)
                pts(i, j) = (label ? 1.0 : -1.0) * (i == 0 ? 1.0 : 0.0) + g(rng);
        }
        return naryq::DataMatrix(pts);
    };
    std::vector<int> train_labels, test_labels;
    const auto train = blob(43, 200, train_labels);
    const auto test = blob(44, 120, test_labels);

    // Identical splits: every point matches itself.
    CHECK(naryq::embedding_classification(train, train_labels, train,
                                          train_labels) == doctest::Approx(1.0));
    // Held-out points still land in the right blob.
    CHECK(naryq::embedding_classification(train, train_labels, test,
                                          test_labels) == doctest::Approx(1.0));

    // Labels drawn independently of geometry put accuracy near chance.
    std::vector<int> coin_train(train_labels.size()), coin_test(test_labels.size());
    std::mt19937 coins(7);
    for (int& v : coin_train) v = static_cast<int>(coins() & 1u);
    for (int& v : coin_test) v = static_cast<int>(coins() & 1u);
    const double chance =
        naryq::embedding_classification(train, coin_train, test, coin_test);
    CHECK(chance >= 0.3);
    CHECK(chance <= 0.7);

    Eigen::MatrixXd other = Eigen::MatrixXd::Zero(2, 120);
    CHECK_THROWS_AS((void)naryq::embedding_classification(
                        train, train_labels, naryq::DataMatrix(other), test_labels),
                    naryq::Error);
    std::vector<int> short_labels(train_labels.begin(), train_labels.end() - 1);
    CHECK_THROWS_AS((void)naryq::embedding_classification(train, short_labels,
                                                          test, test_labels),
                    naryq::Error);
}

TEST_CASE("reports are deterministic text") {
    auto c = tiny_config();
    c.emit_trace = true;
    auto r = naryq::run_experiment(c);
    const std::string a = naryq::format_report(r);
    const std::string b = naryq::format_report(naryq::run_experiment(c));
    CHECK(a == b);

    CHECK(a.find("report = naryq-eval\n") == 0);
    CHECK(a.find("method = lsq-nary\n") != std::string::npos);
    CHECK(a.find("strategy = distance-estimation\n") != std::string::npos);
    CHECK(a.find("auc = ") != std::string::npos);
    CHECK(a.find("R,recall\n") != std::string::npos);
    CHECK(a.find("trace:\n") != std::string::npos);
    // One CSV row per grid point.
    std::size_t rows = 0;
    for (int rg : c.r_grid) {
        const std::string row = std::to_string(rg) + ",";
        if (a.find("\n" + row) != std::string::npos) ++rows;
    }
    CHECK(rows == c.r_grid.size());

    const auto path =
        (std::filesystem::temp_directory_path() / "naryq_report.txt").string();
    naryq::write_report(r, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == a);
}

TEST_CASE("bench sweep emits one row per feasible cell") {
    naryq::BenchConfig bench;
    bench.base = tiny_config();
    bench.base.iters = 8;
    bench.budgets = {16};
    bench.bits_per_dim = {1, 2};
    bench.methods = {naryq::EvalMethod::lsq_nary, naryq::EvalMethod::itq};
    const std::string csv = naryq::run_bench(bench);

    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line))
        if (!line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == 4);  // header + lsq bpd 1,2 + itq bpd 1
    CHECK(rows[0] ==
          "method,strategy,bit_budget,bits_per_dim,code_length,effective_bits,auc");
    CHECK(rows[1].rfind("lsq-nary,distance-estimation,16,1,8,8,", 0) == 0);
    CHECK(rows[2].rfind("lsq-nary,distance-estimation,16,2,8,16,", 0) == 0);
    CHECK(rows[3].rfind("itq,distance-estimation,16,1,8,8,", 0) == 0);

    SUBCASE("infeasible cells are dropped, not fatal") {
        naryq::BenchConfig tight = bench;
        tight.base.strategy = naryq::Strategy::subset_indexing;
        tight.base.k = 10;
        tight.budgets = {4};
        tight.bits_per_dim = {8};  // one 8-bit chunk needs 8 bits; 4 < 8 for itq
        tight.methods = {naryq::EvalMethod::itq};
        const std::string out = naryq::run_bench(tight);
        CHECK(out ==
              "method,strategy,bit_budget,bits_per_dim,code_length,effective_bits,auc\n");
    }
}

TEST_CASE("bench config files override sweeps") {
    const auto path =
        (std::filesystem::temp_directory_path() / "naryq_bench.cfg").string();
    {
        std::ofstream out(path);
        out << "dim = 8\n"
               "sweep_budgets = 16,32\n"
               "sweep_bits_per_dim = 1,2,4\n"
               "sweep_methods = lsq-nary, pq\n"
               "iters = 5\n";
    }
    auto bench = naryq::parse_bench_config_file(path);
    CHECK(bench.base.dim == 8);
    CHECK(bench.base.iters == 5);
    CHECK(bench.budgets == std::vector<int>{16, 32});
    CHECK(bench.bits_per_dim == std::vector<int>{1, 2, 4});
    REQUIRE(bench.methods.size() == 2);
    CHECK(bench.methods[0] == naryq::EvalMethod::lsq_nary);
    CHECK(bench.methods[1] == naryq::EvalMethod::pq);
    CHECK_THROWS_AS((void)naryq::parse_bench_config_file("/no/such.cfg"),
                    naryq::Error);
}

TEST_CASE("external split paths must come as a full set") {
    auto c = tiny_config();
    c.train_path = "only_train.f32";
    CHECK_THROWS_AS((void)naryq::run_experiment(c), naryq::Error);
}
