#include "gridswitch/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridswitch {
namespace {

constexpr double kZeroTol = 1e-9;     // reduced-cost and pivot threshold
constexpr double kTieTol = 1e-9;      // ratio-test tie window
constexpr int kRefreshPeriod = 64;    // pivots between factorized rebuilds

enum class VarState : char { basic, at_lower, at_upper };

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

struct Tableau {
    int m = 0;                 // rows
    int nt = 0;                // structural + artificial columns
    int n = 0;                 // structural columns
    Eigen::MatrixXd full_a;    // m x nt, original coefficients
    Eigen::MatrixXd t;         // m x nt, B^-1 * full_a
    Eigen::VectorXd xb;        // basic variable values
    Eigen::VectorXd lo, up;    // bounds over all nt columns
    Eigen::VectorXd cost;      // current phase cost
    Eigen::VectorXd z;         // reduced costs
    std::vector<int> basis;    // var index basic in each row
    std::vector<VarState> state;

    double nonbasic_value(int j) const {
        return state[j] == VarState::at_lower ? lo[j] : up[j];
    }

    // Rebuild t, xb and z from the basis via a fresh factorization.
    void refresh(const Eigen::VectorXd& rhs) {
        Eigen::MatrixXd basis_mat(m, m);
        for (int i = 0; i < m; ++i) basis_mat.col(i) = full_a.col(basis[i]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
        t = lu.solve(full_a);
        Eigen::VectorXd r = rhs;
        for (int j = 0; j < nt; ++j) {
            if (state[j] != VarState::basic) {
                const double v = nonbasic_value(j);
                if (v != 0.0) r -= full_a.col(j) * v;
            }
        }
        xb = lu.solve(r);
        recompute_z();
    }

    void recompute_z() {
        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
        z = cost - t.transpose() * cb;
    }

    double phase_objective() const {
        double obj = 0.0;
        for (int i = 0; i < m; ++i) obj += cost[basis[i]] * xb[i];
        for (int j = 0; j < nt; ++j) {
            if (state[j] != VarState::basic && cost[j] != 0.0) obj += cost[j] * nonbasic_value(j);
        }
        return obj;
    }
};

// Runs Bland-rule pivoting until the current phase cost is optimal.
// Returns the number of pivots taken.
int run_simplex(Tableau& tab, const Eigen::VectorXd& rhs, int max_iter) {
    const double inf = std::numeric_limits<double>::infinity();
    int iter = 0;
    int since_refresh = 0;
    while (true) {
        if (iter > max_iter) throw std::logic_error("lp: iteration limit exceeded");

        int enter = -1;
        int dir = 0;
        for (int j = 0; j < tab.nt; ++j) {
            if (tab.state[j] == VarState::basic) continue;
            if (tab.up[j] - tab.lo[j] <= 0.0) continue;  // fixed variable
            if (tab.state[j] == VarState::at_lower && tab.z[j] < -kZeroTol) {
                enter = j;
                dir = +1;
                break;
            }
            if (tab.state[j] == VarState::at_upper && tab.z[j] > kZeroTol) {
                enter = j;
                dir = -1;
                break;
            }
        }
        if (enter < 0) return iter;

        const Eigen::VectorXd d = tab.t.col(enter);
        const double own_range = tab.up[enter] - tab.lo[enter];

        double best_t = inf;
        int leave_row = -1;
        for (int i = 0; i < tab.m; ++i) {
            const double delta = dir * d[i];
            double t_i;
            if (delta > kZeroTol) {
                t_i = (tab.xb[i] - tab.lo[tab.basis[i]]) / delta;
            } else if (delta < -kZeroTol) {
                const double cap = tab.up[tab.basis[i]];
                if (!std::isfinite(cap)) continue;
                t_i = (cap - tab.xb[i]) / (-delta);
            } else {
                continue;
            }
            if (t_i < 0.0) t_i = 0.0;  // tolerate slight bound drift
            if (t_i < best_t - kTieTol) {
                best_t = t_i;
                leave_row = i;
            } else if (t_i <= best_t + kTieTol && leave_row >= 0 &&
                       tab.basis[i] < tab.basis[leave_row]) {
                leave_row = i;
                if (t_i < best_t) best_t = t_i;
            }
        }

        const bool flip = own_range <= best_t;
        const double step = flip ? own_range : best_t;
        if (!std::isfinite(step)) throw std::logic_error("lp: unbounded direction");

        if (step != 0.0) tab.xb -= (dir * step) * d;

        if (flip) {
            tab.state[enter] =
                (dir > 0) ? VarState::at_upper : VarState::at_lower;
        } else {
            const int row = leave_row;
            const int leaving = tab.basis[row];
            tab.state[leaving] =
                (dir * d[row] > 0.0) ? VarState::at_lower : VarState::at_upper;
            tab.basis[row] = enter;
            tab.state[enter] = VarState::basic;
            tab.xb[row] = (dir > 0) ? tab.lo[enter] + step : tab.up[enter] - step;

            const double piv = tab.t(row, enter);
            tab.t.row(row) /= piv;
            for (int i = 0; i < tab.m; ++i) {
                if (i == row) continue;
                const double f = tab.t(i, enter);
                if (std::abs(f) > 1e-13) tab.t.row(i) -= f * tab.t.row(row);
            }
            const double zf = tab.z[enter];
            if (std::abs(zf) > 1e-13) tab.z -= zf * tab.t.row(row).transpose();

            if (++since_refresh >= kRefreshPeriod) {
                tab.refresh(rhs);
                since_refresh = 0;
            }
        }
        ++iter;
    }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const int n = static_cast<int>(problem.objective.size());
    const int m = static_cast<int>(problem.eq_rhs.size());
    if (problem.eq_matrix.rows() != m || problem.eq_matrix.cols() != n ||
        problem.lower.size() != n || problem.upper.size() != n) {
        throw std::invalid_argument("lp: inconsistent dimensions");
    }
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(problem.lower[j]) || !std::isfinite(problem.upper[j]) ||
            problem.lower[j] > problem.upper[j] + 1e-12) {
            throw std::invalid_argument("lp: bounds must be finite with lower <= upper");
        }
    }

    Tableau tab;
    tab.m = m;
    tab.n = n;
    tab.nt = n + m;
    tab.full_a.resize(m, tab.nt);
    tab.full_a.leftCols(n) = problem.eq_matrix;
    tab.full_a.rightCols(m).setZero();
    tab.lo.resize(tab.nt);
    tab.up.resize(tab.nt);
    tab.lo.head(n) = problem.lower;
    tab.up.head(n) = problem.upper;
    tab.state.assign(tab.nt, VarState::at_lower);
    tab.basis.resize(m);

    // Start with every structural variable on its lower bound; one signed
    // artificial per row absorbs the residual so the initial basis is feasible.
    Eigen::VectorXd residual = problem.eq_rhs - problem.eq_matrix * problem.lower;
    tab.t.resize(m, tab.nt);
    tab.xb.resize(m);
    for (int i = 0; i < m; ++i) {
        const double sign = residual[i] >= 0.0 ? 1.0 : -1.0;
        tab.full_a(i, n + i) = sign;
        tab.t.row(i) = sign * tab.full_a.row(i);
        tab.t(i, n + i) = 1.0;
        tab.xb[i] = std::abs(residual[i]);
        tab.basis[i] = n + i;
        tab.state[n + i] = VarState::basic;
        tab.lo[n + i] = 0.0;
        tab.up[n + i] = std::numeric_limits<double>::infinity();
    }

    const int max_iter = 20000 + 200 * tab.nt;
    LpSolution sol;

    // Phase 1: minimize the artificial sum.
    tab.cost = Eigen::VectorXd::Zero(tab.nt);
    tab.cost.tail(m).setOnes();
    tab.recompute_z();
    int iters = run_simplex(tab, problem.eq_rhs, max_iter);

    const double feas_tol = 1e-7 * std::max(1.0, inf_norm(problem.eq_rhs));
    if (tab.phase_objective() > feas_tol) {
        sol.status = LpStatus::infeasible;
        sol.iterations = iters;
        return sol;
    }

    // Phase 2: artificials pinned at zero, original objective.
    for (int i = 0; i < m; ++i) tab.up[n + i] = 0.0;
    tab.cost.setZero();
    tab.cost.head(n) = problem.objective;
    tab.recompute_z();
    iters += run_simplex(tab, problem.eq_rhs, max_iter);

    sol.status = LpStatus::optimal;
    sol.iterations = iters;
    sol.x.resize(n);
    for (int j = 0; j < n; ++j) {
        sol.x[j] = tab.state[j] == VarState::basic ? 0.0 : tab.nonbasic_value(j);
    }
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.xb[i];
    }
    // Clamp basic values onto their boxes; drift beyond tolerance is a defect.
    for (int j = 0; j < n; ++j) {
        sol.x[j] = std::min(std::max(sol.x[j], problem.lower[j]), problem.upper[j]);
    }
    sol.objective = problem.objective.dot(sol.x);
    sol.max_residual = inf_norm(problem.eq_matrix * sol.x - problem.eq_rhs);

    const double scale = 1.0 + inf_norm(problem.eq_rhs);
    if (sol.max_residual > 1e-6 * scale) {
        throw std::logic_error("lp: optimal point failed the feasibility self-check");
    }
    return sol;
}

}  // namespace gridswitch
