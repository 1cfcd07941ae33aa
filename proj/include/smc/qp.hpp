#pragma once

// Convex quadratic programming:
//
//   minimize    1/2 x'Q x + c'x
//   subject to  A_eq x  = b_eq
//               A_in x <= h_in
//
// Dual convention: the Lagrangian is
//   f(x) + y'(A_eq x - b_eq) + z'(A_in x - h_in),   z >= 0,
// so stationarity reads Q x + c + A_eq' y + A_in' z = 0.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <string>
#include <vector>

namespace smc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

struct QuadraticProgram {
    SparseMatrix Q;
    Eigen::VectorXd c;
    SparseMatrix A_eq;
    Eigen::VectorXd b_eq;
    SparseMatrix A_in;
    Eigen::VectorXd h_in;
    // constant term added to the reported objective
    double offset = 0.0;
    // optional, one per variable; used in diagnostics and dumps
    std::vector<std::string> names;

    int num_variables() const { return static_cast<int>(c.size()); }
    int num_equalities() const { return static_cast<int>(b_eq.size()); }
    int num_inequalities() const { return static_cast<int>(h_in.size()); }

    double objective(const Eigen::VectorXd& x) const;
};

enum class QpStatus { optimal, infeasible, unbounded, max_iter };

std::string to_string(QpStatus status);

struct KktResiduals {
    // ||Qx + c + A_eq'y + A_in'z||_inf / (1 + ||c||_inf)
    double stationarity = 0.0;
    // ||A_eq x - b_eq||_inf
    double primal_eq = 0.0;
    // ||max(A_in x - h_in, 0)||_inf
    double primal_in = 0.0;
    // max_i |z_i (h_i - A_in,i x)|
    double complementarity = 0.0;

    double max() const;
};

struct QpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd duals_eq;
    Eigen::VectorXd duals_in;
    QpStatus status = QpStatus::max_iter;
    KktResiduals kkt;
    double objective = 0.0;
    int iterations = 0;
    bool polished = false;
};

struct QpSettings {
    double tol = 1e-8;
    int max_iter = 50000;
    bool polish = true;
};

/// Checks dimensions, symmetry of Q, and that Q is PSD up to a small
/// tolerance. Throws std::invalid_argument on the first violation.
void validate_qp(const QuadraticProgram& qp);

KktResiduals kkt_residuals(const QuadraticProgram& qp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& z);

/// Solves the program with a primal-dual interior point method. When the
/// interior point phase converges, an active-set polish step refines the
/// solution; the polished point is kept only if it reduces the KKT residuals.
QpSolution solve_qp(const QuadraticProgram& qp, const QpSettings& settings = {});

/// Sparse triplet dump, one section per matrix:
///
///   qp <n> <m_eq> <m_in>
///   Q <nnz>        followed by "<row> <col> <value>" lines (0-based)
///   c <n>          followed by one value per line
///   A_eq <nnz> / b_eq <m_eq> / A_in <nnz> / h_in <m_in>   likewise
///   offset <value>
///
/// Values are printed with 17 significant digits.
void write_triplets(const QuadraticProgram& qp, std::ostream& out);
QuadraticProgram read_triplets(std::istream& in);

/// Incremental construction helper used by the assemblers.
class QpBuilder {
public:
    int add_variable(std::string name, double linear_cost = 0.0);
    void add_quadratic(int i, int j, double value);  // accumulates into Q(i,j) and Q(j,i) for i != j
    void add_linear(int i, double value);

    struct Row {
        std::vector<int> cols;
        std::vector<double> vals;
        Row& add(int col, double val) {
            cols.push_back(col);
            vals.push_back(val);
            return *this;
        }
    };

    int add_equality(const Row& row, double rhs);
    int add_inequality(const Row& row, double rhs);  // row . x <= rhs
    void add_offset(double value) { offset_ += value; }

    int num_variables() const { return static_cast<int>(names_.size()); }

    QuadraticProgram build() const;

private:
    std::vector<std::string> names_;
    std::vector<double> c_;
    std::vector<Triplet> q_;
    std::vector<Triplet> eq_;
    std::vector<double> b_eq_;
    std::vector<Triplet> in_;
    std::vector<double> h_in_;
    double offset_ = 0.0;
};

}  // namespace smc
