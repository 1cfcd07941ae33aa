#include <doctest.h>

#include "smc/qp.hpp"

#include <Eigen/Dense>

#include <random>
#include <sstream>

using namespace smc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SparseMatrix sparse(const MatrixXd& m) { return m.sparseView(); }

QuadraticProgram dense_qp(const MatrixXd& Q, const VectorXd& c, const MatrixXd& A, const VectorXd& b, const MatrixXd& G,
                          const VectorXd& h) {
    QuadraticProgram qp;
    qp.Q = sparse(Q);
    qp.c = c;
    qp.A_eq = sparse(A);
    qp.b_eq = b;
    qp.A_in = sparse(G);
    qp.h_in = h;
    return qp;
}

double dual_gap(const QuadraticProgram& qp, const QpSolution& s) {
    const double primal = 0.5 * s.x.dot(qp.Q * s.x) + qp.c.dot(s.x);
    const double dual = -0.5 * s.x.dot(qp.Q * s.x) - qp.b_eq.dot(s.duals_eq) - qp.h_in.dot(s.duals_in);
    return std::abs(primal - dual);
}

MatrixXd random_psd(std::mt19937& rng, int n, int rank) {
    std::normal_distribution<double> nd;
    MatrixXd F(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) F(i, j) = nd(rng);
    return F * F.transpose();
}

}  // namespace

TEST_CASE("scalar bound: min (x-1)^2 s.t. x >= 2") {
    // (x-1)^2 = x^2 - 2x + 1 -> Q = 2, c = -2, offset 1
    auto qp = dense_qp(MatrixXd::Constant(1, 1, 2.0), VectorXd::Constant(1, -2.0), MatrixXd(0, 1), VectorXd(0),
                       MatrixXd::Constant(1, 1, -1.0), VectorXd::Constant(1, -2.0));
    qp.offset = 1.0;
    auto sol = solve_qp(qp);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.duals_in[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.kkt.max() <= 1e-8);
}

TEST_CASE("simplex projection: min 1/2 |x|^2 s.t. x1 + x2 = 1") {
    auto qp = dense_qp(MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Ones(1, 2), VectorXd::Ones(1),
                       MatrixXd(0, 2), VectorXd(0));
    auto sol = solve_qp(qp);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sol.duals_eq[0] == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("contradictory bounds are infeasible") {
    MatrixXd G(2, 1);
    G << 1.0, -1.0;
    VectorXd h(2);
    h << 0.0, -1.0;
    auto qp = dense_qp(MatrixXd::Zero(1, 1), VectorXd::Zero(1), MatrixXd(0, 1), VectorXd(0), G, h);
    auto sol = solve_qp(qp);
    CHECK(sol.status == QpStatus::infeasible);
}

TEST_CASE("inconsistent equalities are infeasible") {
    MatrixXd A(2, 2);
    A << 1, 1, 1, 1;
    VectorXd b(2);
    b << 1, 2;
    MatrixXd G = -MatrixXd::Identity(2, 2);
    auto qp = dense_qp(MatrixXd::Identity(2, 2), VectorXd::Zero(2), A, b, G, VectorXd::Zero(2));
    auto sol = solve_qp(qp);
    CHECK(sol.status == QpStatus::infeasible);
}

TEST_CASE("linear descent direction without blocking constraint is unbounded") {
    // min -x  s.t. x >= 0
    auto qp = dense_qp(MatrixXd::Zero(1, 1), VectorXd::Constant(1, -1.0), MatrixXd(0, 1), VectorXd(0),
                       MatrixXd::Constant(1, 1, -1.0), VectorXd::Zero(1));
    auto sol = solve_qp(qp);
    CHECK(sol.status == QpStatus::unbounded);
}

TEST_CASE("asymmetric or indefinite Q is rejected") {
    MatrixXd Q(2, 2);
    Q << 1, 2, 0, 1;
    auto qp = dense_qp(Q, VectorXd::Zero(2), MatrixXd(0, 2), VectorXd(0), MatrixXd(0, 2), VectorXd(0));
    CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);
    Q << 1, 0, 0, -1;
    qp.Q = sparse(Q);
    CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);
}

TEST_CASE("equality-only QPs match the closed-form KKT solution") {
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 29;
        const int m = trial % std::max(1, n / 2);
        MatrixXd Q = random_psd(rng, n, n) + 0.1 * MatrixXd::Identity(n, n);
        VectorXd c(n), b(m);
        MatrixXd A(m, n);
        for (int i = 0; i < n; ++i) c[i] = nd(rng);
        for (int i = 0; i < m; ++i) {
            b[i] = nd(rng);
            for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
        }
        MatrixXd K = MatrixXd::Zero(n + m, n + m);
        K.topLeftCorner(n, n) = Q;
        K.topRightCorner(n, m) = A.transpose();
        K.bottomLeftCorner(m, n) = A;
        VectorXd rhs(n + m);
        rhs << -c, b;
        VectorXd ref = K.fullPivLu().solve(rhs);

        auto sol = solve_qp(dense_qp(Q, c, A, b, MatrixXd(0, n), VectorXd(0)));
        REQUIRE(sol.status == QpStatus::optimal);
        CHECK((sol.x - ref.head(n)).lpNorm<Eigen::Infinity>() <= 1e-6);
        CHECK((sol.duals_eq - ref.tail(m)).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("random inequality QPs: KKT certificate, duality gap, scaling") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 20;
        const int me = trial % 3;
        const int mi = n + trial % 7;
        MatrixXd Q = random_psd(rng, n, std::max(1, n / 2));
        VectorXd c(n);
        for (int i = 0; i < n; ++i) c[i] = nd(rng);
        // feasible by construction around a random point; bounded via a box
        VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0[i] = nd(rng);
        MatrixXd A(me, n);
        for (int i = 0; i < me; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
        VectorXd b = A * x0;
        MatrixXd G(mi + 2 * n, n);
        VectorXd h(mi + 2 * n);
        for (int i = 0; i < mi; ++i) {
            for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
            h[i] = G.row(i).dot(x0) + ud(rng);
        }
        G.bottomRows(2 * n) << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) {
            h[mi + i] = x0[i] + 5.0;
            h[mi + n + i] = -x0[i] + 5.0;
        }
        auto qp = dense_qp(Q, c, A, b, G, h);
        auto sol = solve_qp(qp);
        REQUIRE(sol.status == QpStatus::optimal);
        CHECK(sol.kkt.max() <= 1e-8);
        CHECK(sol.duals_in.minCoeff() >= 0.0);
        const double primal = 0.5 * sol.x.dot(Q * sol.x) + c.dot(sol.x);
        CHECK(dual_gap(qp, sol) <= 1e-6 * (1.0 + std::abs(primal)));

        // positive scaling of the objective: same argmin, duals scale
        const double alpha = 3.5;
        auto scaled = qp;
        scaled.Q *= alpha;
        scaled.c *= alpha;
        auto sol2 = solve_qp(scaled);
        REQUIRE(sol2.status == QpStatus::optimal);
        const double f1 = primal;
        const double f2 = 0.5 * sol2.x.dot(Q * sol2.x) + c.dot(sol2.x);
        CHECK(std::abs(f1 - f2) <= 1e-6 * (1.0 + std::abs(f1)));
        if (n >= 1 && Q.ldlt().rcond() > 1e-8) {
            CHECK((sol.x - sol2.x).lpNorm<Eigen::Infinity>() <= 1e-6);
            CHECK((alpha * sol.duals_in - sol2.duals_in).lpNorm<Eigen::Infinity>() <= 1e-5 * alpha);
        }
    }
}

TEST_CASE("strictly convex scaling invariance of argmin and duals") {
    MatrixXd Q(2, 2);
    Q << 2, 0.5, 0.5, 1;
    VectorXd c(2);
    c << -1, -3;
    MatrixXd G(3, 2);
    G << 1, 1, -1, 0, 0, -1;
    VectorXd h(3);
    h << 1, 0, 0;
    auto qp = dense_qp(Q, c, MatrixXd(0, 2), VectorXd(0), G, h);
    auto base = solve_qp(qp);
    REQUIRE(base.status == QpStatus::optimal);
    for (double alpha : {0.01, 2.0, 100.0}) {
        auto scaled = qp;
        scaled.Q *= alpha;
        scaled.c *= alpha;
        auto sol = solve_qp(scaled);
        REQUIRE(sol.status == QpStatus::optimal);
        CHECK((sol.x - base.x).norm() <= 1e-6);
        CHECK((sol.duals_in - alpha * base.duals_in).norm() <= 1e-6 * alpha);
    }
}

TEST_CASE("triplet dump round-trips") {
    QpBuilder b;
    int x = b.add_variable("x", 1.0);
    int y = b.add_variable("y", -2.0);
    b.add_quadratic(x, x, 2.0);
    b.add_quadratic(x, y, 0.25);
    b.add_equality(QpBuilder::Row{}.add(x, 1.0).add(y, 1.0), 3.0);
    b.add_inequality(QpBuilder::Row{}.add(y, 1.0), 1.0 / 3.0);
    b.add_offset(7.125);
    auto qp = b.build();
    std::stringstream ss;
    write_triplets(qp, ss);
    auto back = read_triplets(ss);
    CHECK(MatrixXd(back.Q) == MatrixXd(qp.Q));
    CHECK(back.c == qp.c);
    CHECK(MatrixXd(back.A_eq) == MatrixXd(qp.A_eq));
    CHECK(back.b_eq == qp.b_eq);
    CHECK(MatrixXd(back.A_in) == MatrixXd(qp.A_in));
    CHECK(back.h_in == qp.h_in);
    CHECK(back.offset == qp.offset);
}
