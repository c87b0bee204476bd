#pragma once

#include "horses/types.hpp"

#include <utility>
#include <vector>

namespace horses {

enum class FusionPairStrategy {
    AllPairs,      // evaluate every coordinate pair (O(p^2))
    SortedAdjacent // only pairs adjacent in sorted-coefficient order
};

struct SolverConfig {
    long max_sweeps = 10000;
    double objective_tol = 1e-9; // relative objective decrease per round
    double kkt_tol = 1e-6;
    FusionPairStrategy fusion_pair_strategy = FusionPairStrategy::AllPairs;
    std::optional<Eigen::VectorXd> initial_beta;
};

/// f(beta) = 0.5*||y - X beta||^2 + lambda1*sum_j |beta_j|
///           + lambda2*sum_{j<k} |beta_j - beta_k|
double objective(const Dataset& data, const Eigen::VectorXd& beta, const PenaltySpec& penalty);

/// sum_{j<k} |v_j - v_k| computed in O(p log p) via sorting.
double pairwise_abs_diff_sum(const Eigen::VectorXd& v);

/// Constraint-form penalty value alpha*sum|b_j| + (1-alpha)*sum_{j<k}|b_j-b_k|.
double constraint_value(const Eigen::VectorXd& beta, double alpha);

/// Grid upper bound 2*max_j |x_j'y| / alpha; the fitted vector is identically
/// zero for every lambda at or above it.
double lambda_max(const Dataset& data, double alpha);

/// One coordinate's exact subproblem: minimizing f over beta_k with the other
/// coordinates frozen at their current values. The derivative is piecewise
/// linear with breaks at 0 and the frozen values; `interval_signs` holds the
/// fixed sign pattern (sign of beta_k, summed signs against the frozen
/// values) for each of the breakpoints.size()+1 intervals in ascending order.
struct CoordinateSubproblem {
    Index k = 0;
    double partial_residual_inner = 0.0; // (y - sum_{j!=k} beta_j x_j)' x_k
    double gram_kk = 0.0;                // x_k' x_k
    std::vector<double> breakpoints;     // sorted ascending, exact-deduplicated
    struct IntervalSigns {
        int sign_beta_k;   // -1 below zero, +1 above
        int wall_sign_sum; // sum over j != k of sgn(beta_k - beta_j) on the interval
    };
    std::vector<IntervalSigns> interval_signs;
};

CoordinateSubproblem make_coordinate_subproblem(const Dataset& data, const Eigen::VectorXd& beta,
                                                Index k, const PenaltySpec& penalty);

/// Exact minimization of f over coordinate k with the others fixed. Returns
/// the minimizing value and whether it strictly decreases f.
std::pair<double, bool> descent_step(const Dataset& data, const Eigen::VectorXd& beta, Index k,
                                     const PenaltySpec& penalty);

/// One fusion pass: for each candidate pair (k,l) impose beta_k = beta_l =
/// gamma, minimize f over gamma, and apply the single best strictly improving
/// move. Returns the (possibly updated) coefficients and whether a move was
/// accepted. Fused coordinates stay independent and may split later.
std::pair<Eigen::VectorXd, bool> fusion_step(const Dataset& data, const Eigen::VectorXd& beta,
                                             const PenaltySpec& penalty,
                                             FusionPairStrategy strategy = FusionPairStrategy::AllPairs);

/// Modified pathwise coordinate descent: cyclic descent sweeps alternating
/// with fusion passes once a sweep stalls, until no move improves the
/// objective by more than config.objective_tol (relative) or max_sweeps is
/// reached (converged=false on the result in that case).
FitResult solve(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config = {});

/// Fits a descending lambda sequence at fixed alpha, warm-starting each fit
/// from the previous solution.
std::vector<FitResult> solve_path(const Dataset& data, double alpha,
                                  const std::vector<double>& lambdas_desc, double d,
                                  const SolverConfig& config = {});

/// Finds the Lagrangian lambda whose solution meets the constraint
/// alpha*sum|b| + (1-alpha)*sum|b_j - b_k| <= t with equality (monotone
/// bisection over [0, lambda_max]); returns lambda = 0 when the constraint is
/// already inactive at the unpenalized solution.
PenaltySpec constraint_to_lagrangian(const Dataset& data, double alpha, double t,
                                     const SolverConfig& config = {});

/// Theorem-derived sufficient penalty level ||y|| * sqrt(2(1-rho)) / (1-alpha):
/// for lambda above this value the coefficients of predictors k,l with sample
/// correlation rho are guaranteed equal whenever both are distinct from all
/// other coefficients.
double grouping_bound(double y_norm, double rho_kl, double alpha);

/// Maximum over coordinates of the distance from zero to the coordinate-wise
/// subdifferential interval of f at beta. Terms at a kink (|beta_k| or
/// |beta_k - beta_j| within equality_tol of zero) contribute free signs; all
/// others contribute their fixed signs.
double kkt_residual(const Dataset& data, const Eigen::VectorXd& beta, const PenaltySpec& penalty,
                    double equality_tol = 1e-12);

} // namespace horses
