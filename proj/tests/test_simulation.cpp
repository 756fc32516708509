#include "doctest.h"

#include "rwfit/simulation.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace rwfit;

namespace {

SimConfig tiny_config() {
    SimConfig cfg;
    cfg.replications = 4;
    cfg.base_seed = 99;
    cfg.beta_true = 10.0;
    cfg.gamma_true = 0.0;
    return cfg;
}

} // namespace

TEST_SUITE("simulation") {

TEST_CASE("replication seeds are deterministic and distinct") {
    CHECK(replication_seed(7, 2.0, 20, 3) == replication_seed(7, 2.0, 20, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {1ULL, 2ULL})
        for (double d : {0.5, 2.0})
            for (int n : {20, 50})
                for (int rep = 0; rep < 25; ++rep)
                    seen.insert(replication_seed(base, d, n, rep));
    CHECK(seen.size() == 2u * 2u * 2u * 25u);
}

TEST_CASE("joint metrics") {
    auto zero = joint_metrics({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    CHECK(zero.first == 0.0);
    CHECK(zero.second == 0.0);

    // published-table cross-checks: the joint columns are the mean of the
    // per-parameter biases and the Euclidean norm of the per-parameter RMSEs
    auto lspf = joint_metrics({-0.1610, -0.0431, 0.2325},
                              {0.5483, 0.7763, 0.5881});
    CHECK(lspf.first == doctest::Approx(0.0095).epsilon(5e-4));
    CHECK(lspf.second == doctest::Approx(1.1177).epsilon(5e-4));

    auto mme = joint_metrics({-0.5971, -0.1231, 1.4276},
                             {0.7107, 0.7617, 2.3191});
    CHECK(mme.first == doctest::Approx(0.2358).epsilon(5e-5));
    CHECK(mme.second == doctest::Approx(2.5423).epsilon(5e-4));

    auto mle = joint_metrics({-0.5512, 0.0091, -0.2040},
                             {0.5463, 0.5123, 0.7746});
    CHECK(mle.first == doctest::Approx(-0.7461 / 3.0).epsilon(5e-5));
}

TEST_CASE("a perfect estimator scores zero everywhere") {
    SimConfig cfg = tiny_config();
    SimCell cell = run_cell_custom(
        [&](const Sample&) { return RwParams{2.0, cfg.beta_true, cfg.gamma_true}; },
        2.0, 6, cfg);
    CHECK(cell.available);
    CHECK(cell.failure_count == 0);
    CHECK(cell.bias_location == 0.0);
    CHECK(cell.bias_shape == 0.0);
    CHECK(cell.bias_scale == 0.0);
    CHECK(cell.rmse_location == 0.0);
    CHECK(cell.rmse_shape == 0.0);
    CHECK(cell.rmse_scale == 0.0);
    CHECK(cell.joint_bias == 0.0);
    CHECK(cell.joint_rmse == 0.0);
}

TEST_CASE("a constant unit offset scores bias one, rmse one") {
    SimConfig cfg = tiny_config();
    SimCell cell = run_cell_custom(
        [&](const Sample&) {
            return RwParams{3.0, cfg.beta_true + 1.0, cfg.gamma_true + 1.0};
        },
        2.0, 6, cfg);
    CHECK(cell.bias_location == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.bias_shape == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.bias_scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.rmse_location == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.rmse_shape == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.rmse_scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.joint_bias == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cell.joint_rmse ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("failures are excluded and counted") {
    SimConfig cfg = tiny_config();
    cfg.replications = 6;
    int calls = 0;
    SimCell cell = run_cell_custom(
        [&](const Sample&) -> RwParams {
            if (++calls % 2 == 0) throw EstimationError("synthetic failure");
            return RwParams{2.0, cfg.beta_true, cfg.gamma_true};
        },
        2.0, 6, cfg);
    CHECK(cell.failure_count == 3);
    CHECK(cell.available);
    CHECK(cell.bias_shape == 0.0);

    SimCell dead = run_cell_custom(
        [](const Sample&) -> RwParams {
            throw EstimationError("synthetic failure");
        },
        2.0, 6, cfg);
    CHECK(dead.failure_count == 6);
    CHECK_FALSE(dead.available);
}

TEST_CASE("non-finite estimates count as failures") {
    SimConfig cfg = tiny_config();
    SimCell cell = run_cell_custom(
        [](const Sample&) {
            return RwParams{std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0};
        },
        2.0, 6, cfg);
    CHECK(cell.failure_count == cfg.replications);
    CHECK_FALSE(cell.available);
}

TEST_CASE("replications draw common samples across estimators") {
    SimConfig cfg = tiny_config();
    std::vector<std::vector<double>> first, second;
    auto recorder = [](std::vector<std::vector<double>>& sink) {
        return [&sink](const Sample& s) {
            sink.push_back(s.values);
            return RwParams{2.0, 10.0, 0.0};
        };
    };
    run_cell_custom(recorder(first), 2.0, 8, cfg);
    run_cell_custom(recorder(second), 2.0, 8, cfg);
    REQUIRE(first.size() == second.size());
    CHECK(first == second);
    CHECK(first[0] != first[1]);
}

TEST_CASE("full cell runs are reproducible") {
    SimConfig cfg = tiny_config();
    cfg.replications = 3;
    SimCell a = run_cell(Method::MLE, 2.0, 20, cfg);
    SimCell b = run_cell(Method::MLE, 2.0, 20, cfg);
    CHECK(a.bias_location == b.bias_location);
    CHECK(a.bias_shape == b.bias_shape);
    CHECK(a.bias_scale == b.bias_scale);
    CHECK(a.rmse_location == b.rmse_location);
    CHECK(a.rmse_shape == b.rmse_shape);
    CHECK(a.rmse_scale == b.rmse_scale);
    CHECK(a.joint_rmse == b.joint_rmse);
    CHECK(a.failure_count == b.failure_count);
}

TEST_CASE("grid ordering is delta-major") {
    SimConfig cfg = tiny_config();
    cfg.replications = 2;
    cfg.delta_values = {1.0, 2.0};
    cfg.n_values = {6};
    cfg.methods = {Method::MLE, Method::MME};
    SimReport rep = run_simulation(cfg);
    REQUIRE(rep.cells.size() == 4);
    CHECK(rep.cells[0].delta0 == 1.0);
    CHECK(rep.cells[0].method == Method::MLE);
    CHECK(rep.cells[1].delta0 == 1.0);
    CHECK(rep.cells[1].method == Method::MME);
    CHECK(rep.cells[2].delta0 == 2.0);
    CHECK(rep.cells[3].delta0 == 2.0);
}

TEST_CASE("configuration validation") {
    SimConfig cfg = tiny_config();
    cfg.replications = 0;
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.delta_values = {2.0, -1.0};
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
}

TEST_CASE("csv rendering and parsing round-trip") {
    SimConfig cfg = tiny_config();
    SimCell unit = run_cell_custom(
        [&](const Sample&) {
            return RwParams{3.0, cfg.beta_true + 1.0, cfg.gamma_true + 1.0};
        },
        2.0, 5, cfg);

    SimCell missing;
    missing.method = Method::MME;
    missing.delta0 = 0.5;
    missing.n = 20;
    missing.failure_count = 4;
    missing.available = false;

    SimReport rep;
    rep.config = cfg;
    rep.cells = {unit, missing};

    std::string csv = render_table_csv(rep);
    CHECK(csv.find("2,5,mle,1,1,1,1,1,1,1,1.73205,0") != std::string::npos);
    CHECK(csv.find("0.5,20,mme,nan,nan,nan,nan,nan,nan,nan,nan,4") !=
          std::string::npos);

    std::vector<SimCell> parsed = read_sim_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].method == Method::MLE);
    CHECK(parsed[0].delta0 == 2.0);
    CHECK(parsed[0].n == 5);
    CHECK(parsed[0].available);
    CHECK(parsed[0].bias_location == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(parsed[0].joint_rmse ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-5));
    CHECK(parsed[0].failure_count == 0);
    CHECK_FALSE(parsed[1].available);
    CHECK(parsed[1].failure_count == 4);
}

TEST_CASE("csv parse errors carry line numbers") {
    CHECK_THROWS_AS(read_sim_csv("bogus header\n"), std::runtime_error);
    std::string good_header =
        "delta,n,method,location_bias,location_rmse,shape_bias,shape_rmse,"
        "scale_bias,scale_rmse,joint_bias,joint_rmse,failures\n";
    try {
        read_sim_csv(good_header + "2,5,mle,1,1\n");
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("text table labels each shape block") {
    SimConfig cfg = tiny_config();
    SimCell unit = run_cell_custom(
        [&](const Sample&) { return RwParams{2.0, 10.0, 0.0}; }, 2.0, 5, cfg);
    SimReport rep;
    rep.config = cfg;
    rep.cells = {unit};
    std::string text = render_table_text(rep);
    CHECK(text.find("shape delta") != std::string::npos);
    CHECK(text.find("mle") != std::string::npos);
}

} // TEST_SUITE
