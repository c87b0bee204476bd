#include "horses/solver.hpp"

#include "horses/data_model.hpp"
#include "horses/detail/piecewise.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace horses {

namespace {

void check_solvable(const Dataset& data) {
    if (data.y.size() != data.n()) throw DimensionMismatch("x rows and y length differ");
    if (data.p() < 1 || data.n() < 1) throw Error("empty dataset");
    if (!data.x.allFinite() || !data.y.allFinite()) throw NonFiniteInput("non-finite data");
}

// All state needed to run descent/fusion moves with O(n+p) updates.
struct SolveState {
    const Dataset& data;
    const PenaltySpec& pen;
    Eigen::VectorXd beta;
    Eigen::VectorXd residual; // y - X beta
    Eigen::MatrixXd gram;     // X'X
    double f = 0.0;           // tracked objective
    long fusion_moves = 0;

    SolveState(const Dataset& d, const PenaltySpec& p, Eigen::VectorXd b)
        : data(d), pen(p), beta(std::move(b)) {
        residual = data.y - data.x * beta;
        gram.noalias() = data.x.transpose() * data.x;
        for (Index j = 0; j < data.p(); ++j)
            if (!(gram(j, j) > 0.0)) throw ConstantColumn(j);
        f = objective(data, beta, pen);
    }
};

// Exact objective change of setting every coordinate in `members` to `gamma`,
// all others fixed: positive means improvement. Also returns the new
// residual. The smooth part is expanded as -r'w - 0.5*||w||^2 to avoid
// cancellation between large squared norms.
struct MoveDelta {
    double delta;
    Eigen::VectorXd new_residual;
};

MoveDelta move_delta(const SolveState& s, const std::vector<Index>& members, double gamma) {
    const double l1 = s.pen.lambda1();
    const double l2 = s.pen.lambda2();
    const Index p = s.data.p();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(s.data.n());
    for (Index i : members) w += (s.beta(i) - gamma) * s.data.x.col(i);
    const double d_smooth = -(s.residual.dot(w)) - 0.5 * w.squaredNorm();

    double d_l1 = 0.0;
    for (Index i : members) d_l1 += std::abs(s.beta(i)) - std::abs(gamma);
    d_l1 *= l1;

    double d_l2 = 0.0;
    if (l2 > 0.0) {
        for (size_t a = 0; a < members.size(); ++a)
            for (size_t b = a + 1; b < members.size(); ++b)
                d_l2 += std::abs(s.beta(members[a]) - s.beta(members[b]));
        std::vector<char> in_set(static_cast<size_t>(p), 0);
        for (Index i : members) in_set[static_cast<size_t>(i)] = 1;
        for (Index j = 0; j < p; ++j) {
            if (in_set[static_cast<size_t>(j)]) continue;
            for (Index i : members)
                d_l2 += std::abs(s.beta(i) - s.beta(j)) - std::abs(gamma - s.beta(j));
        }
        d_l2 *= l2;
    }

    return {d_smooth + d_l1 + d_l2, s.residual + w};
}

void apply_move(SolveState& s, const std::vector<Index>& members, double gamma,
                MoveDelta&& md) {
    for (Index i : members) s.beta(i) = gamma;
    s.residual = std::move(md.new_residual);
    s.f -= md.delta;
}

// Exact coordinate minimizer of f over beta_k with the rest fixed.
detail::PiecewiseMin coordinate_minimizer(const SolveState& s, Index k) {
    const double gram_kk = s.gram(k, k);
    const double lin = s.residual.dot(s.data.x.col(k)) + s.beta(k) * gram_kk;
    std::vector<double> walls;
    walls.reserve(static_cast<size_t>(s.data.p()) - 1);
    for (Index j = 0; j < s.data.p(); ++j)
        if (j != k) walls.push_back(s.beta(j));
    return detail::minimize_piecewise(gram_kk, lin, s.pen.lambda1(), walls, s.pen.lambda2());
}

// One full cyclic sweep; returns total objective decrease.
double descent_sweep(SolveState& s) {
    const double f_before = s.f;
    std::vector<Index> single(1);
    for (Index k = 0; k < s.data.p(); ++k) {
        const auto pm = coordinate_minimizer(s, k);
        if (pm.argmin == s.beta(k)) continue;
        single[0] = k;
        auto md = move_delta(s, single, pm.argmin);
        if (md.delta > 0.0) apply_move(s, single, pm.argmin, std::move(md));
    }
    return f_before - s.f;
}

// Minimizer of f over a common value gamma for the member set, others fixed.
// The restricted derivative has weight m*lambda1 on |gamma| and m*lambda2 on
// each wall |gamma - beta_j|, j outside the set.
detail::PiecewiseMin set_minimizer(const SolveState& s, const std::vector<Index>& members) {
    const auto m = static_cast<double>(members.size());
    double quad = 0.0;
    double lin = 0.0;
    for (Index i : members) {
        lin += s.residual.dot(s.data.x.col(i));
        for (Index j : members) {
            quad += s.gram(i, j);
            lin += s.beta(j) * s.gram(j, i);
        }
    }
    std::vector<char> in_set(static_cast<size_t>(s.data.p()), 0);
    for (Index i : members) in_set[static_cast<size_t>(i)] = 1;
    std::vector<double> walls;
    for (Index j = 0; j < s.data.p(); ++j)
        if (!in_set[static_cast<size_t>(j)]) walls.push_back(s.beta(j));
    return detail::minimize_piecewise(quad, lin, m * s.pen.lambda1(), walls, m * s.pen.lambda2());
}

struct BestMove {
    std::vector<Index> members;
    double gamma = 0.0;
    double delta = 0.0;
    std::optional<MoveDelta> md;
};

void consider(SolveState& s, BestMove& best, const std::vector<Index>& members) {
    const auto pm = set_minimizer(s, members);
    auto md = move_delta(s, members, pm.argmin);
    if (md.delta > best.delta) {
        best.members = members;
        best.gamma = pm.argmin;
        best.delta = md.delta;
        best.md = std::move(md);
    }
}

// The paper's fusion pass: best strictly improving pairwise equality move.
bool pairwise_fusion_pass(SolveState& s, FusionPairStrategy strategy) {
    const Index p = s.data.p();
    if (p < 2) return false;
    BestMove best;
    std::vector<Index> pair(2);
    if (strategy == FusionPairStrategy::AllPairs) {
        for (Index k = 0; k < p; ++k)
            for (Index l = k + 1; l < p; ++l) {
                pair[0] = k;
                pair[1] = l;
                consider(s, best, pair);
            }
    } else {
        std::vector<Index> order(static_cast<size_t>(p));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return s.beta(a) < s.beta(b); });
        for (size_t i = 0; i + 1 < order.size(); ++i) {
            pair[0] = std::min(order[i], order[i + 1]);
            pair[1] = std::max(order[i], order[i + 1]);
            consider(s, best, pair);
        }
    }
    if (best.delta > 0.0) {
        apply_move(s, best.members, best.gamma, std::move(*best.md));
        return true;
    }
    return false;
}

// Supplementary stall-breaking moves over the current equal-value groups:
// re-optimize a whole group's shared value, or merge two groups at a common
// value. Pairwise fusion alone cannot move an already-fused group of three or
// more (every pair move pays the difference penalty against the remaining
// members), so coordinate descent plus pairwise fusion can stall short of the
// optimum; these moves clear that.
bool group_move_pass(SolveState& s) {
    const Index p = s.data.p();
    std::vector<std::pair<double, Index>> vals(static_cast<size_t>(p));
    for (Index j = 0; j < p; ++j) vals[static_cast<size_t>(j)] = {s.beta(j), j};
    std::sort(vals.begin(), vals.end());

    std::vector<std::vector<Index>> groups; // exact equal-value classes
    for (size_t i = 0; i < vals.size();) {
        size_t e = i + 1;
        while (e < vals.size() && vals[e].first == vals[i].first) ++e;
        std::vector<Index> g;
        for (size_t m = i; m < e; ++m) g.push_back(vals[m].second);
        std::sort(g.begin(), g.end());
        groups.push_back(std::move(g));
        i = e;
    }

    BestMove best;
    for (const auto& g : groups)
        if (g.size() >= 2) consider(s, best, g);
    std::vector<Index> merged;
    for (size_t a = 0; a < groups.size(); ++a)
        for (size_t b = a + 1; b < groups.size(); ++b) {
            if (groups[a].size() == 1 && groups[b].size() == 1)
                continue; // singleton pairs are the pairwise fusion pass
            merged.clear();
            merged.insert(merged.end(), groups[a].begin(), groups[a].end());
            merged.insert(merged.end(), groups[b].begin(), groups[b].end());
            std::sort(merged.begin(), merged.end());
            consider(s, best, merged);
        }
    if (best.delta > 0.0) {
        apply_move(s, best.members, best.gamma, std::move(*best.md));
        return true;
    }
    return false;
}

} // namespace

double pairwise_abs_diff_sum(const Eigen::VectorXd& v) {
    const Index p = v.size();
    std::vector<double> sorted(v.data(), v.data() + p);
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (Index i = 0; i < p; ++i)
        sum += (2.0 * static_cast<double>(i) + 1.0 - static_cast<double>(p)) *
               sorted[static_cast<size_t>(i)];
    return sum;
}

double objective(const Dataset& data, const Eigen::VectorXd& beta, const PenaltySpec& penalty) {
    check_solvable(data);
    if (beta.size() != data.p()) throw DimensionMismatch("coefficient length != p");
    if (!beta.allFinite()) throw NonFiniteInput("non-finite coefficients");
    const Eigen::VectorXd r = data.y - data.x * beta;
    return 0.5 * r.squaredNorm() + penalty.lambda1() * beta.lpNorm<1>() +
           penalty.lambda2() * pairwise_abs_diff_sum(beta);
}

double constraint_value(const Eigen::VectorXd& beta, double alpha) {
    return alpha * beta.lpNorm<1>() + (1.0 - alpha) * pairwise_abs_diff_sum(beta);
}

double lambda_max(const Dataset& data, double alpha) {
    check_solvable(data);
    if (!(alpha > 0.0)) throw Error("alpha must be positive for lambda_max");
    return 2.0 * (data.x.transpose() * data.y).cwiseAbs().maxCoeff() / alpha;
}

CoordinateSubproblem make_coordinate_subproblem(const Dataset& data, const Eigen::VectorXd& beta,
                                                Index k, const PenaltySpec& penalty) {
    check_solvable(data);
    (void)penalty;
    if (beta.size() != data.p()) throw DimensionMismatch("coefficient length != p");
    if (k < 0 || k >= data.p()) throw BadK("coordinate index out of range");

    CoordinateSubproblem sub;
    sub.k = k;
    sub.gram_kk = data.x.col(k).squaredNorm();
    const Eigen::VectorXd r = data.y - data.x * beta;
    sub.partial_residual_inner = r.dot(data.x.col(k)) + beta(k) * sub.gram_kk;

    std::vector<double> walls;
    for (Index j = 0; j < data.p(); ++j)
        if (j != k) walls.push_back(beta(j));
    std::sort(walls.begin(), walls.end());

    sub.breakpoints = walls;
    sub.breakpoints.insert(
        std::lower_bound(sub.breakpoints.begin(), sub.breakpoints.end(), 0.0), 0.0);
    sub.breakpoints.erase(std::unique(sub.breakpoints.begin(), sub.breakpoints.end()),
                          sub.breakpoints.end());

    const auto w_count = walls.size();
    size_t at_or_below = 0;
    for (size_t i = 0; i <= sub.breakpoints.size(); ++i) {
        CoordinateSubproblem::IntervalSigns is{};
        if (i == 0) {
            is.sign_beta_k = -1;
            is.wall_sign_sum = -static_cast<int>(w_count);
        } else {
            const double lo = sub.breakpoints[i - 1];
            while (at_or_below < w_count && walls[at_or_below] <= lo) ++at_or_below;
            is.sign_beta_k = lo >= 0.0 ? 1 : -1;
            is.wall_sign_sum = 2 * static_cast<int>(at_or_below) - static_cast<int>(w_count);
        }
        sub.interval_signs.push_back(is);
    }
    return sub;
}

std::pair<double, bool> descent_step(const Dataset& data, const Eigen::VectorXd& beta, Index k,
                                     const PenaltySpec& penalty) {
    check_solvable(data);
    if (beta.size() != data.p()) throw DimensionMismatch("coefficient length != p");
    if (k < 0 || k >= data.p()) throw BadK("coordinate index out of range");

    SolveState s(data, penalty, beta);
    const auto pm = coordinate_minimizer(s, k);
    if (pm.argmin == beta(k)) return {pm.argmin, false};
    const auto md = move_delta(s, {k}, pm.argmin);
    return {pm.argmin, md.delta > 0.0};
}

std::pair<Eigen::VectorXd, bool> fusion_step(const Dataset& data, const Eigen::VectorXd& beta,
                                             const PenaltySpec& penalty,
                                             FusionPairStrategy strategy) {
    check_solvable(data);
    if (beta.size() != data.p()) throw DimensionMismatch("coefficient length != p");

    SolveState s(data, penalty, beta);
    const bool accepted = pairwise_fusion_pass(s, strategy);
    return {std::move(s.beta), accepted};
}

FitResult solve(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config) {
    check_solvable(data);
    if (config.max_sweeps < 1) throw Error("max_sweeps must be >= 1");

    Eigen::VectorXd beta0 = config.initial_beta.value_or(Eigen::VectorXd::Zero(data.p()));
    if (beta0.size() != data.p()) throw DimensionMismatch("initial_beta length != p");
    SolveState s(data, penalty, std::move(beta0));

    long sweeps = 0;
    bool converged = false;
    while (sweeps < config.max_sweeps) {
        ++sweeps;
        const double f0 = s.f;
        const double dec = descent_sweep(s);
        if (dec / std::max(1.0, std::abs(f0)) > config.objective_tol) continue;

        // Sweep stalled: try equality moves.
        const double f1 = s.f;
        bool moved = pairwise_fusion_pass(s, config.fusion_pair_strategy);
        if (!moved) moved = group_move_pass(s);
        if (!moved) {
            converged = true;
            break;
        }
        ++s.fusion_moves;
        if ((f1 - s.f) / std::max(1.0, std::abs(f1)) <= config.objective_tol) {
            converged = true; // accepted move, but below the improvement tolerance
            break;
        }
    }

    FitResult result;
    result.beta = std::move(s.beta);
    result.objective = objective(data, result.beta, penalty);
    result.groups = group_extract(result.beta);
    result.df = static_cast<int>(result.groups.groups.size());
    result.iterations = sweeps;
    result.fusion_moves_accepted = s.fusion_moves;
    result.converged = converged;
    result.kkt_residual = kkt_residual(data, result.beta, penalty);
    return result;
}

std::vector<FitResult> solve_path(const Dataset& data, double alpha,
                                  const std::vector<double>& lambdas_desc, double d,
                                  const SolverConfig& config) {
    std::vector<FitResult> fits;
    fits.reserve(lambdas_desc.size());
    SolverConfig cfg = config;
    for (double lambda : lambdas_desc) {
        const auto pen = PenaltySpec::lagrangian(alpha, lambda, d);
        fits.push_back(solve(data, pen, cfg));
        cfg.initial_beta = fits.back().beta;
    }
    return fits;
}

PenaltySpec constraint_to_lagrangian(const Dataset& data, double alpha, double t,
                                     const SolverConfig& config) {
    check_solvable(data);
    if (t < 0.0) throw InfeasibleT("t must be nonnegative");
    if (!(alpha > 0.0) || alpha > 1.0 + 1e-12) throw Error("alpha must lie in (0, 1]");
    const double d = std::max(default_threshold(data.p()), 1.0 / alpha);

    const double lam_hi = lambda_max(data, alpha);
    if (t == 0.0) return PenaltySpec::lagrangian(alpha, lam_hi, d);

    SolverConfig cfg = config;
    const auto penalty_at = [&](double lambda) {
        const auto fit = solve(data, PenaltySpec::lagrangian(alpha, lambda, d), cfg);
        cfg.initial_beta = fit.beta;
        return constraint_value(fit.beta, alpha);
    };

    if (penalty_at(0.0) <= t) return PenaltySpec::lagrangian(alpha, 0.0, d);

    double lo = 0.0, hi = lam_hi;
    double best_lambda = hi;
    double best_gap = std::abs(penalty_at(hi) - t);
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pv = penalty_at(mid);
        const double gap = std::abs(pv - t);
        if (gap < best_gap) {
            best_gap = gap;
            best_lambda = mid;
        }
        if (gap <= 1e-7 * std::max(1.0, t)) break;
        (pv > t ? lo : hi) = mid;
    }
    return PenaltySpec::lagrangian(alpha, best_lambda, d);
}

double grouping_bound(double y_norm, double rho_kl, double alpha) {
    if (!(y_norm >= 0.0)) throw Error("||y|| must be nonnegative");
    if (rho_kl < -1.0 - 1e-12 || rho_kl > 1.0 + 1e-12)
        throw Error("correlation must lie in [-1, 1]");
    if (alpha >= 1.0) throw AlphaOne("grouping bound is undefined at alpha = 1");
    const double gap = std::max(0.0, 2.0 * (1.0 - rho_kl));
    return y_norm * std::sqrt(gap) / (1.0 - alpha);
}

double kkt_residual(const Dataset& data, const Eigen::VectorXd& beta, const PenaltySpec& penalty,
                    double equality_tol) {
    check_solvable(data);
    if (beta.size() != data.p()) throw DimensionMismatch("coefficient length != p");

    const Eigen::VectorXd r = data.y - data.x * beta;
    const double l1 = penalty.lambda1();
    const double l2 = penalty.lambda2();
    double worst = 0.0;
    for (Index k = 0; k < data.p(); ++k) {
        double center = -r.dot(data.x.col(k)); // gradient of the smooth part
        double halfwidth = 0.0;
        if (std::abs(beta(k)) <= equality_tol)
            halfwidth += l1;
        else
            center += l1 * (beta(k) > 0.0 ? 1.0 : -1.0);
        for (Index j = 0; j < data.p(); ++j) {
            if (j == k) continue;
            const double diff = beta(k) - beta(j);
            if (std::abs(diff) <= equality_tol)
                halfwidth += l2;
            else
                center += l2 * (diff > 0.0 ? 1.0 : -1.0);
        }
        worst = std::max(worst, std::max(0.0, std::abs(center) - halfwidth));
    }
    return worst;
}

} // namespace horses
