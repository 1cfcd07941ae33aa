#include "fixtures.hpp"

#include <doctest.h>

using namespace smc;

TEST_CASE("bundle case validates") {
    const NetworkCase nc = make_wecc6_case();
    CHECK(validate_case(nc).empty());
    CHECK(nc.num_buses() == 6);
    CHECK(nc.num_generators() == 3);
    CHECK(nc.num_wind() == 3);
    CHECK(nc.num_aggregators() == 4);
    CHECK(nc.num_appliances() == 800);
}

TEST_CASE("validation reports paths") {
    NetworkCase nc = make_wecc6_case();
    nc.generators[1].p_min = 60.0;  // p_max is 50
    nc.lines[2].reactance_pu = 0.0;
    nc.aggregators[0].appliances[3].energy_total = 1.0;
    const auto v = validate_case(nc);
    auto has = [&](const std::string& path) {
        for (const auto& x : v)
            if (x.path.find(path) == 0) return true;
        return false;
    };
    CHECK(has("generators[1].p_min"));
    CHECK(has("lines[2].reactance_pu"));
    CHECK(has("aggregators[0].appliances[3] (user 4, appliance 1).energy_total"));
}

TEST_CASE("islanded bus is rejected") {
    NetworkCase nc = make_wecc6_case();
    // cut bus 3 from both neighbours
    nc.lines.erase(nc.lines.begin() + 3, nc.lines.begin() + 5);
    bool found = false;
    for (const auto& v : validate_case(nc)) found = found || v.path == "buses[2]";
    CHECK(found);
}

TEST_CASE("susceptance matrices") {
    const NetworkCase nc = make_wecc6_case();
    const FlowMatrices fm = build_flow_matrices(nc);
    // Laplacian: symmetric, zero row sums, PSD, diagonal = sum of 1/x at the bus
    CHECK((fm.B_n - fm.B_n.transpose()).norm() < 1e-12);
    CHECK(fm.B_n.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fm.B_n);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
    CHECK(eig.eigenvalues()(1) > 1e-6);  // connected: single zero eigenvalue
    // bus 1 touches lines 1-6 (x=0.2) and 4-1 (x=0.4)
    CHECK(fm.B_n(0, 0) == doctest::Approx(1 / 0.2 + 1 / 0.4));
    CHECK(fm.B_n(0, 5) == doctest::Approx(-1 / 0.2));
    // flow on line 1-6 with theta_1 = 0.02, others zero: 0.02 / 0.2 = 0.1 p.u.
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(6);
    theta[0] = 0.02;
    CHECK((fm.B_f * theta)[0] == doctest::Approx(0.1));
    // injections equal the net outflow over incident lines
    Eigen::VectorXd flows = fm.B_f * theta;
    CHECK((fm.B_n * theta - fm.A_n.transpose() * flows).norm() < 1e-12);
}

TEST_CASE("flow matrices reject bad data") {
    NetworkCase nc = make_wecc6_case();
    nc.lines[0].reactance_pu = -0.1;
    CHECK_THROWS_AS(build_flow_matrices(nc), std::invalid_argument);
    nc = make_wecc6_case();
    nc.generators[0].bus = 9;
    CHECK_THROWS_AS(build_flow_matrices(nc), std::invalid_argument);
}

TEST_CASE("appliance constraints") {
    Appliance a;
    a.energy_total = 6.0;
    a.p_min = 0.0;
    a.p_max = 2.0;
    a.t_start = 2;
    a.t_end = 4;
    const auto c = appliance_constraints(a, 5);
    CHECK(c.window == std::vector<int>{2, 3, 4});
    CHECK(c.pinned == std::vector<int>{1, 5});
    CHECK(c.contains({0, 2, 2, 2, 0}));
    CHECK_FALSE(c.contains({0.1, 2, 2, 1.9, 0}));
    CHECK_FALSE(c.contains({0, 3, 1.5, 1.5, 0}));
    a.energy_total = 6.5;
    CHECK_THROWS_AS(appliance_constraints(a, 5), std::invalid_argument);
}

TEST_CASE("phev draws follow the table") {
    int short_window = 0;
    for (int k = 0; k < 2000; ++k) {
        const Appliance a = draw_phev(5, k, 1, k + 1, 24);
        const double e = a.energy_total * 1000.0, p = a.p_max * 1000.0;
        CHECK((std::abs(e - 10) < 1e-9 || std::abs(e - 11) < 1e-9 || std::abs(e - 12) < 1e-9));
        CHECK((std::abs(p - 2.1) < 1e-9 || std::abs(p - 2.3) < 1e-9 || std::abs(p - 2.5) < 1e-9));
        CHECK(a.t_start == 1);
        CHECK((a.t_end == 6 || a.t_end == 7));
        CHECK(a.energy_total <= a.p_max * a.span());
        short_window += a.t_end == 6;
    }
    CHECK(short_window / 2000.0 == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("utility of a schedule") {
    Appliance a;
    a.t_start = 1;
    a.t_end = 2;
    a.utility_gamma = {2.0, 0.0, 0.0};
    a.utility_delta = {3.0, 1.0, 5.0};
    // slot 1: -1/2 * 2 * 1 + 3 = 2; slot 2: 1 * 2 = 2; slot 3 is outside the window
    CHECK(a.utility({1.0, 2.0, 7.0}) == doctest::Approx(4.0));
}
