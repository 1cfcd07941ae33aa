#include "smc/qp.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace smc {

using Eigen::VectorXd;
using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

double QuadraticProgram::objective(const VectorXd& x) const {
    return 0.5 * x.dot(Q * x) + c.dot(x) + offset;
}

std::string to_string(QpStatus status) {
    switch (status) {
        case QpStatus::optimal: return "optimal";
        case QpStatus::infeasible: return "infeasible";
        case QpStatus::unbounded: return "unbounded";
        case QpStatus::max_iter: return "max_iter";
    }
    return "unknown";
}

double KktResiduals::max() const {
    return std::max({stationarity, primal_eq, primal_in, complementarity});
}

namespace {

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double max_abs(const SparseMatrix& m) {
    double out = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
    return out;
}

// Position of (row, col) inside the compressed value array of a column-major matrix.
int value_index(const SparseMatrix& m, int row, int col) {
    const int* inner = m.innerIndexPtr();
    const int begin = m.outerIndexPtr()[col];
    const int end = m.outerIndexPtr()[col + 1];
    const int* pos = std::lower_bound(inner + begin, inner + end, row);
    if (pos == inner + end || *pos != row) throw std::logic_error("kkt pattern lookup failed");
    return static_cast<int>(pos - inner);
}

// Reduced Newton system of the interior point method,
//
//   [ Q + G'DG + dx I    A'    ] [dx]   [rx]
//   [ A                 -dy I  ] [dy] = [ry]
//
// stored as its lower triangle with a fixed sparsity pattern so that the
// symbolic factorization is computed once.
class ReducedKkt {
public:
    ReducedKkt(const QuadraticProgram& qp, double reg) : qp_(qp), reg_(reg) {
        n_ = qp.num_variables();
        me_ = qp.num_equalities();
        G_ = RowSparse(qp.A_in);
        std::vector<Triplet> pattern;
        for (int k = 0; k < qp.Q.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.Q, k); it; ++it)
                if (it.row() >= it.col()) pattern.emplace_back(it.row(), it.col(), 1.0);
        for (int i = 0; i < n_ + me_; ++i) pattern.emplace_back(i, i, 1.0);
        for (int k = 0; k < qp.A_eq.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.A_eq, k); it; ++it)
                pattern.emplace_back(n_ + it.row(), it.col(), 1.0);
        for (int r = 0; r < G_.outerSize(); ++r)
            for (RowSparse::InnerIterator a(G_, r); a; ++a)
                for (RowSparse::InnerIterator b(G_, r); b; ++b)
                    if (a.col() >= b.col()) pattern.emplace_back(a.col(), b.col(), 1.0);
        K_.resize(n_ + me_, n_ + me_);
        K_.setFromTriplets(pattern.begin(), pattern.end());
        K_.makeCompressed();

        base_.assign(K_.nonZeros(), 0.0);
        for (int k = 0; k < qp.Q.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.Q, k); it; ++it)
                if (it.row() >= it.col()) base_[value_index(K_, it.row(), it.col())] += it.value();
        for (int k = 0; k < qp.A_eq.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.A_eq, k); it; ++it)
                base_[value_index(K_, n_ + it.row(), it.col())] += it.value();
        diag_.resize(n_ + me_);
        for (int i = 0; i < n_ + me_; ++i) diag_[i] = value_index(K_, i, i);
        row_start_.assign(G_.rows() + 1, 0);
        for (int r = 0; r < G_.outerSize(); ++r) {
            for (RowSparse::InnerIterator a(G_, r); a; ++a)
                for (RowSparse::InnerIterator b(G_, r); b; ++b)
                    if (a.col() >= b.col()) {
                        contrib_pos_.push_back(value_index(K_, a.col(), b.col()));
                        contrib_coef_.push_back(a.value() * b.value());
                    }
            row_start_[r + 1] = static_cast<int>(contrib_pos_.size());
        }
        ldlt_.analyzePattern(K_);
    }

    // A zero pivot can appear when the barrier weights swamp the
    // regularization; retry with a larger shift, refinement absorbs it.
    bool factorize(const VectorXd& d) {
        d_ = d;
        for (double reg = reg_; reg <= 1e6 * reg_; reg *= 100.0) {
            double* values = K_.valuePtr();
            std::copy(base_.begin(), base_.end(), values);
            for (int i = 0; i < n_; ++i) values[diag_[i]] += reg;
            for (int i = 0; i < me_; ++i) values[diag_[n_ + i]] -= reg;
            for (int r = 0; r + 1 < static_cast<int>(row_start_.size()); ++r)
                for (int k = row_start_[r]; k < row_start_[r + 1]; ++k)
                    values[contrib_pos_[k]] += d[r] * contrib_coef_[k];
            ldlt_.factorize(K_);
            if (ldlt_.info() == Eigen::Success) return true;
        }
        return false;
    }

    // Solves the unregularized system by iterative refinement on the
    // regularized factorization.
    VectorXd solve(const VectorXd& rhs) const {
        VectorXd sol = ldlt_.solve(rhs);
        VectorXd residual = rhs - apply(sol);
        double err = inf_norm(residual);
        // convergence can be slow when the shift is large; stop once a pass
        // no longer helps (rank-deficient rows would only drift the duals)
        for (int pass = 0; pass < 40 && err > 1e-13 * (1.0 + inf_norm(rhs)); ++pass) {
            VectorXd next = sol + ldlt_.solve(residual);
            VectorXd next_residual = rhs - apply(next);
            const double next_err = inf_norm(next_residual);
            if (!(next_err < err)) break;
            sol = std::move(next);
            residual = std::move(next_residual);
            err = next_err;
        }
        return sol;
    }

private:
    VectorXd apply(const VectorXd& v) const {
        VectorXd out(n_ + me_);
        const auto vx = v.head(n_);
        const auto vy = v.tail(me_);
        VectorXd gx = G_ * vx;
        out.head(n_) = qp_.Q * vx + G_.transpose() * d_.cwiseProduct(gx) + qp_.A_eq.transpose() * vy;
        out.tail(me_) = qp_.A_eq * vx;
        return out;
    }

    const QuadraticProgram& qp_;
    double reg_;
    int n_ = 0, me_ = 0;
    RowSparse G_;
    SparseMatrix K_;
    std::vector<double> base_;
    std::vector<int> diag_;
    std::vector<int> row_start_;
    std::vector<int> contrib_pos_;
    std::vector<double> contrib_coef_;
    VectorXd d_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

double max_step(const VectorXd& v, const VectorXd& dv) {
    double alpha = 1.0;
    for (int i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
    return alpha;
}

bool primal_infeasibility_certificate(const QuadraticProgram& qp, const VectorXd& y, const VectorXd& z) {
    const double scale = std::max(inf_norm(y), inf_norm(z));
    if (!(scale > 0.0)) return false;
    VectorXd yn = y / scale;
    VectorXd zn = z / scale;
    VectorXd atz = qp.A_eq.transpose() * yn + qp.A_in.transpose() * zn;
    const double gap = qp.b_eq.dot(yn) + qp.h_in.dot(zn);
    return inf_norm(atz) <= 1e-6 && gap < -1e-6;
}

bool dual_infeasibility_certificate(const QuadraticProgram& qp, const VectorXd& x) {
    const double scale = inf_norm(x);
    if (!(scale > 0.0)) return false;
    VectorXd xn = x / scale;
    if (inf_norm(qp.Q * xn) > 1e-6) return false;
    if (qp.num_equalities() > 0 && inf_norm(qp.A_eq * xn) > 1e-6) return false;
    if (qp.num_inequalities() > 0 && (qp.A_in * xn).maxCoeff() > 1e-6) return false;
    return qp.c.dot(xn) < -1e-6;
}

// Active-set refinement: treat constraints with z_i > slack_i as equalities
// and solve the resulting equality-constrained QP by proximal iterations
// started from the interior point solution. When the guess is wrong (a row
// left out ends up violated, or an active row needs a negative multiplier)
// the set is corrected and the solve repeated.
bool polish(const QuadraticProgram& qp, QpSolution& sol, double tol) {
    const int n = qp.num_variables();
    const int me = qp.num_equalities();
    const int mi = qp.num_inequalities();
    const RowSparse G(qp.A_in);
    std::vector<char> is_active(mi, 0);
    {
        const VectorXd slack = qp.h_in - qp.A_in * sol.x;
        for (int i = 0; i < mi; ++i) is_active[i] = sol.duals_in[i] > slack[i];
    }

    VectorXd best_x = sol.x, best_y = sol.duals_eq, best_z = sol.duals_in;
    KktResiduals best = sol.kkt;
    bool improved = false;
    VectorXd start_x = sol.x, start_y = sol.duals_eq, start_z = sol.duals_in;

    for (int round = 0; round < 6; ++round) {
        std::vector<int> active;
        for (int i = 0; i < mi; ++i)
            if (is_active[i]) active.push_back(i);
        const int ma = static_cast<int>(active.size());

        // Active rows are often linearly dependent (vertex solutions of the
        // linear parts), which breaks a symmetric factorization of the
        // regularized system; LU with partial pivoting copes.
        const int dim = n + me + ma;
        const double delta = 1e-7;
        std::vector<Triplet> trips;
        for (int k = 0; k < qp.Q.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.Q, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, delta);
        for (int k = 0; k < qp.A_eq.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.A_eq, k); it; ++it) {
                trips.emplace_back(n + it.row(), it.col(), it.value());
                trips.emplace_back(it.col(), n + it.row(), it.value());
            }
        for (int a = 0; a < ma; ++a)
            for (RowSparse::InnerIterator it(G, active[a]); it; ++it) {
                trips.emplace_back(n + me + a, it.col(), it.value());
                trips.emplace_back(it.col(), n + me + a, it.value());
            }
        for (int i = 0; i < me + ma; ++i) trips.emplace_back(n + i, n + i, -delta);
        SparseMatrix K(dim, dim);
        K.setFromTriplets(trips.begin(), trips.end());
        K.makeCompressed();
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) break;

        VectorXd rhs(dim);
        rhs.head(n) = -qp.c;
        rhs.segment(n, me) = qp.b_eq;
        for (int a = 0; a < ma; ++a) rhs[n + me + a] = qp.h_in[active[a]];

        VectorXd v(dim);
        v.head(n) = start_x;
        v.segment(n, me) = start_y;
        for (int a = 0; a < ma; ++a) v[n + me + a] = start_z[active[a]];

        VectorXd raw_z = VectorXd::Zero(mi);
        double round_score = std::numeric_limits<double>::infinity();
        int flat = 0;
        for (int pass = 0; pass < 25; ++pass) {
            VectorXd prox(dim);
            prox.head(n) = delta * v.head(n);
            prox.tail(me + ma) = -delta * v.tail(me + ma);
            VectorXd next = lu.solve(rhs + prox);
            if (!next.allFinite()) break;
            const double change = inf_norm(next - v);
            v = next;
            VectorXd x = v.head(n), y = v.segment(n, me), z = VectorXd::Zero(mi);
            for (int a = 0; a < ma; ++a) {
                raw_z[active[a]] = v[n + me + a];
                z[active[a]] = std::max(0.0, v[n + me + a]);
            }
            const KktResiduals res = kkt_residuals(qp, x, y, z);
            flat = res.max() < 0.5 * round_score ? 0 : flat + 1;
            round_score = std::min(round_score, res.max());
            if (res.max() < best.max()) {
                best = res;
                best_x = x;
                best_y = y;
                best_z = z;
                improved = true;
            }
            if (best.max() <= 1e-3 * tol || flat >= 3 || change <= 1e-15 * (1.0 + inf_norm(v))) break;
        }
        if (best.max() <= 1e-3 * tol) break;

        // correct the guess from the last iterate of this round
        const VectorXd x = v.head(n);
        const VectorXd slack = qp.h_in - qp.A_in * x;
        const double eps = std::max(tol, 1e-12);
        bool changed = false;
        for (int i = 0; i < mi; ++i) {
            if (is_active[i] && raw_z[i] < -eps) {
                is_active[i] = 0;
                changed = true;
            } else if (!is_active[i] && slack[i] < -eps) {
                is_active[i] = 1;
                changed = true;
            }
        }
        if (!changed) break;
        start_x = x;
        start_y = v.segment(n, me);
        start_z = raw_z.cwiseMax(0.0);
    }
    if (!improved) return false;
    sol.x = best_x;
    sol.duals_eq = best_y;
    sol.duals_in = best_z;
    sol.kkt = best;
    return true;
}

}  // namespace

void validate_qp(const QuadraticProgram& qp) {
    const int n = qp.num_variables();
    if (qp.Q.rows() != n || qp.Q.cols() != n) throw std::invalid_argument("qp: Q must be n x n");
    if (qp.A_eq.cols() != n || qp.A_eq.rows() != qp.b_eq.size())
        throw std::invalid_argument("qp: A_eq dimensions do not match b_eq and n");
    if (qp.A_in.cols() != n || qp.A_in.rows() != qp.h_in.size())
        throw std::invalid_argument("qp: A_in dimensions do not match h_in and n");
    if (!qp.c.allFinite() || !qp.b_eq.allFinite() || !qp.h_in.allFinite())
        throw std::invalid_argument("qp: non-finite vector data");
    if (!qp.names.empty() && static_cast<int>(qp.names.size()) != n)
        throw std::invalid_argument("qp: names must be empty or one per variable");
    if (n == 0) return;
    const double scale = 1.0 + max_abs(qp.Q);
    SparseMatrix asym = SparseMatrix(qp.Q.transpose()) - qp.Q;
    if (max_abs(asym) > 1e-12 * scale) throw std::invalid_argument("qp: Q is not symmetric");
    SparseMatrix shifted = qp.Q;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-9 * scale;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-8 * scale)
        throw std::invalid_argument("qp: Q is not positive semidefinite");
}

KktResiduals kkt_residuals(const QuadraticProgram& qp, const VectorXd& x, const VectorXd& y, const VectorXd& z) {
    KktResiduals r;
    VectorXd grad = qp.Q * x + qp.c + qp.A_eq.transpose() * y + qp.A_in.transpose() * z;
    r.stationarity = inf_norm(grad) / (1.0 + inf_norm(qp.c));
    if (qp.num_equalities() > 0) r.primal_eq = inf_norm(qp.A_eq * x - qp.b_eq);
    if (qp.num_inequalities() > 0) {
        VectorXd slack = qp.h_in - qp.A_in * x;
        r.primal_in = std::max(0.0, -slack.minCoeff());
        r.complementarity = inf_norm(z.cwiseProduct(slack));
        // a negative multiplier is a stationarity defect as well
        r.stationarity = std::max(r.stationarity, std::max(0.0, -z.minCoeff()));
    }
    return r;
}

QpSolution solve_qp(const QuadraticProgram& qp, const QpSettings& settings) {
    validate_qp(qp);
    const int n = qp.num_variables();
    const int me = qp.num_equalities();
    const int mi = qp.num_inequalities();
    const double tol = settings.tol;

    QpSolution sol;
    sol.x = VectorXd::Zero(n);
    sol.duals_eq = VectorXd::Zero(me);
    sol.duals_in = VectorXd::Zero(mi);

    const double data_scale =
        1.0 + std::max({max_abs(qp.Q), max_abs(qp.A_eq), max_abs(qp.A_in), inf_norm(qp.c)});
    ReducedKkt kkt(qp, 1e-10 * data_scale);

    // Starting point: least-squares-ish solve with unit barrier weights.
    VectorXd x, y, z, s;
    {
        VectorXd d = VectorXd::Ones(mi);
        if (!kkt.factorize(d)) {
            sol.status = QpStatus::max_iter;
            return sol;
        }
        VectorXd rhs(n + me);
        rhs.head(n) = -qp.c + qp.A_in.transpose() * qp.h_in;
        rhs.tail(me) = qp.b_eq;
        VectorXd v = kkt.solve(rhs);
        x = v.head(n);
        y = v.tail(me);
        // the same solve gives z ~ Gx - h; shift s and z into the interior
        s = qp.h_in - qp.A_in * x;
        z = -s;
        if (mi > 0) {
            const double ap = -s.minCoeff(), ad = -z.minCoeff();
            if (ap >= 0.0) s.array() += 1.0 + ap;
            if (ad >= 0.0) z.array() += 1.0 + ad;
        }
    }

    int iter = 0;
    int stalls = 0;
    int near = 0;
    // the iterate with the smallest KKT residual; late iterations can lose
    // accuracy once the barrier weights span too many decades
    VectorXd best_x = x, best_y = y, best_z = z;
    double best_res = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    QpStatus status = QpStatus::max_iter;
    for (; iter < settings.max_iter; ++iter) {
        VectorXd r_d = qp.Q * x + qp.c + qp.A_eq.transpose() * y + qp.A_in.transpose() * z;
        VectorXd r_p = qp.A_eq * x - qp.b_eq;
        VectorXd r_g = qp.A_in * x + s - qp.h_in;
        const double mu = mi > 0 ? s.dot(z) / mi : 0.0;

        KktResiduals res = kkt_residuals(qp, x, y, z);
        // keep going past tol while the residuals still shrink quickly; the
        // polish step needs a well-separated active set
        if (res.max() < best_res) {
            best_res = res.max();
            best_iter = iter;
            best_x = x;
            best_y = y;
            best_z = z;
        }
        if (res.max() <= tol) ++near;
        if (res.max() <= 1e-2 * tol || near >= 4 || (mi == 0 && res.max() <= tol)) {
            status = QpStatus::optimal;
            break;
        }
        if (best_res <= 1e3 * tol && iter - best_iter >= 8) break;
        if (std::max(inf_norm(y), inf_norm(z)) > 1e9 * data_scale &&
            primal_infeasibility_certificate(qp, y, z)) {
            status = QpStatus::infeasible;
            break;
        }
        if (inf_norm(x) > 1e9 * data_scale && dual_infeasibility_certificate(qp, x)) {
            status = QpStatus::unbounded;
            break;
        }

        VectorXd d = z.cwiseQuotient(s);
        if (!kkt.factorize(d)) break;

        auto newton = [&](const VectorXd& r_sz, VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds) {
            VectorXd rhs(n + me);
            rhs.head(n) = -r_d - qp.A_in.transpose() * (d.cwiseProduct(r_g) - r_sz.cwiseQuotient(s));
            rhs.tail(me) = -r_p;
            VectorXd v = kkt.solve(rhs);
            dx = v.head(n);
            dy = v.tail(me);
            dz = d.cwiseProduct(qp.A_in * dx + r_g) - r_sz.cwiseQuotient(s);
            ds = -(r_sz + s.cwiseProduct(dz)).cwiseQuotient(z);
        };

        VectorXd dx, dy, dz, ds;
        double alpha = 1.0;
        if (mi > 0) {
            VectorXd r_sz = s.cwiseProduct(z);
            newton(r_sz, dx, dy, dz, ds);
            const double alpha_aff = std::min(max_step(s, ds), max_step(z, dz));
            const double mu_aff = (s + alpha_aff * ds).dot(z + alpha_aff * dz) / mi;
            const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
            r_sz += ds.cwiseProduct(dz) - VectorXd::Constant(mi, sigma * mu);
            newton(r_sz, dx, dy, dz, ds);
            alpha = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
        } else {
            newton(VectorXd::Zero(0), dx, dy, dz, ds);
        }
        if (!dx.allFinite() || !dy.allFinite() || !dz.allFinite()) break;

        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        for (int i = 0; i < mi; ++i) {
            s[i] = std::max(s[i], 1e-300);
            z[i] = std::max(z[i], 1e-300);
        }

        stalls = alpha < 1e-8 ? stalls + 1 : 0;
        if (stalls >= 20 || iter >= 500) {
            if (primal_infeasibility_certificate(qp, y, z)) status = QpStatus::infeasible;
            else if (dual_infeasibility_certificate(qp, x)) status = QpStatus::unbounded;
            else if (res.max() <= tol) status = QpStatus::optimal;
            break;
        }
    }

    if (status == QpStatus::max_iter || status == QpStatus::optimal) {
        x = best_x;
        y = best_y;
        z = best_z;
    }
    sol.x = x;
    sol.duals_eq = y;
    sol.duals_in = z;
    sol.iterations = iter;
    sol.kkt = kkt_residuals(qp, x, y, z);
    if (status == QpStatus::max_iter && sol.kkt.max() <= tol) status = QpStatus::optimal;

    if (settings.polish && status != QpStatus::infeasible && status != QpStatus::unbounded) {
        sol.polished = polish(qp, sol, tol);
        if (sol.kkt.max() <= tol) status = QpStatus::optimal;
    }
    sol.status = status;
    sol.objective = qp.objective(sol.x);
    return sol;
}

void write_triplets(const QuadraticProgram& qp, std::ostream& out) {
    out << std::setprecision(17);
    out << "qp " << qp.num_variables() << ' ' << qp.num_equalities() << ' ' << qp.num_inequalities() << '\n';
    auto dump_matrix = [&](const char* tag, const SparseMatrix& m) {
        out << tag << ' ' << m.nonZeros() << '\n';
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    };
    auto dump_vector = [&](const char* tag, const VectorXd& v) {
        out << tag << ' ' << v.size() << '\n';
        for (int i = 0; i < v.size(); ++i) out << v[i] << '\n';
    };
    dump_matrix("Q", qp.Q);
    dump_vector("c", qp.c);
    dump_matrix("A_eq", qp.A_eq);
    dump_vector("b_eq", qp.b_eq);
    dump_matrix("A_in", qp.A_in);
    dump_vector("h_in", qp.h_in);
    out << "offset " << qp.offset << '\n';
}

QuadraticProgram read_triplets(std::istream& in) {
    auto expect = [&](const std::string& tag) {
        std::string got;
        if (!(in >> got) || got != tag) throw std::runtime_error("qp dump: expected '" + tag + "'");
    };
    int n = 0, me = 0, mi = 0;
    expect("qp");
    if (!(in >> n >> me >> mi)) throw std::runtime_error("qp dump: bad header");
    auto read_matrix = [&](const std::string& tag, int rows) {
        expect(tag);
        long nnz = 0;
        in >> nnz;
        std::vector<Triplet> trips;
        trips.reserve(nnz);
        for (long k = 0; k < nnz; ++k) {
            int r = 0, c = 0;
            double v = 0.0;
            if (!(in >> r >> c >> v)) throw std::runtime_error("qp dump: truncated " + tag);
            trips.emplace_back(r, c, v);
        }
        SparseMatrix m(rows, n);
        m.setFromTriplets(trips.begin(), trips.end());
        return m;
    };
    auto read_vector = [&](const std::string& tag) {
        expect(tag);
        long len = 0;
        in >> len;
        VectorXd v(len);
        for (long i = 0; i < len; ++i)
            if (!(in >> v[i])) throw std::runtime_error("qp dump: truncated " + tag);
        return v;
    };
    QuadraticProgram qp;
    qp.Q = read_matrix("Q", n);
    qp.c = read_vector("c");
    qp.A_eq = read_matrix("A_eq", me);
    qp.b_eq = read_vector("b_eq");
    qp.A_in = read_matrix("A_in", mi);
    qp.h_in = read_vector("h_in");
    expect("offset");
    in >> qp.offset;
    return qp;
}

int QpBuilder::add_variable(std::string name, double linear_cost) {
    names_.push_back(std::move(name));
    c_.push_back(linear_cost);
    return static_cast<int>(names_.size()) - 1;
}

void QpBuilder::add_quadratic(int i, int j, double value) {
    q_.emplace_back(i, j, value);
    if (i != j) q_.emplace_back(j, i, value);
}

void QpBuilder::add_linear(int i, double value) { c_.at(i) += value; }

int QpBuilder::add_equality(const Row& row, double rhs) {
    const int r = static_cast<int>(b_eq_.size());
    for (std::size_t k = 0; k < row.cols.size(); ++k) eq_.emplace_back(r, row.cols[k], row.vals[k]);
    b_eq_.push_back(rhs);
    return r;
}

int QpBuilder::add_inequality(const Row& row, double rhs) {
    const int r = static_cast<int>(h_in_.size());
    for (std::size_t k = 0; k < row.cols.size(); ++k) in_.emplace_back(r, row.cols[k], row.vals[k]);
    h_in_.push_back(rhs);
    return r;
}

QuadraticProgram QpBuilder::build() const {
    const int n = num_variables();
    QuadraticProgram qp;
    qp.Q.resize(n, n);
    qp.Q.setFromTriplets(q_.begin(), q_.end());
    qp.c = Eigen::Map<const VectorXd>(c_.data(), n);
    qp.A_eq.resize(static_cast<int>(b_eq_.size()), n);
    qp.A_eq.setFromTriplets(eq_.begin(), eq_.end());
    qp.b_eq = Eigen::Map<const VectorXd>(b_eq_.data(), static_cast<int>(b_eq_.size()));
    qp.A_in.resize(static_cast<int>(h_in_.size()), n);
    qp.A_in.setFromTriplets(in_.begin(), in_.end());
    qp.h_in = Eigen::Map<const VectorXd>(h_in_.data(), static_cast<int>(h_in_.size()));
    qp.offset = offset_;
    qp.names = names_;
    return qp;
}

}  // namespace smc
