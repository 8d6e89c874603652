#pragma once

#include <Eigen/Dense>

namespace gridswitch {

enum class LpStatus { optimal, infeasible };

/// minimize objective . x  subject to  eq_matrix x = eq_rhs,  lower <= x <= upper.
/// All variable bounds must be finite.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    double max_residual = 0.0;
};

/// Two-phase bounded-variable primal simplex. Entering and leaving variables
/// follow Bland's rule, so identical inputs produce identical solutions on any
/// platform. Unboundedness cannot occur under the finite-bounds precondition
/// and is reported as std::logic_error.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace gridswitch
