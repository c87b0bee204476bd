#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace horses {

using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonFiniteInput : Error {
    using Error::Error;
};

/// Raised when a raw predictor column has zero variance and cannot be scaled.
struct ConstantColumn : Error {
    Index column;
    explicit ConstantColumn(Index j)
        : Error("constant column at index " + std::to_string(j)), column(j) {}
};

struct InfeasibleT : Error {
    using Error::Error;
};

struct AlphaOne : Error {
    using Error::Error;
};

struct InstanceTooLarge : Error {
    using Error::Error;
};

struct WrongDimension : Error {
    using Error::Error;
};

struct BadK : Error {
    using Error::Error;
};

struct EmptyGrid : Error {
    using Error::Error;
};

struct DfTooLarge : Error {
    using Error::Error;
};

struct NonpositiveRss : Error {
    using Error::Error;
};

struct BadModelId : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Core domain types
// ---------------------------------------------------------------------------

/// Design matrix plus response. When `standardized` is set, every column of
/// `x` has zero mean and unit sum of squares, and `y` has zero mean.
struct Dataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    bool standardized = false;

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }
};

/// Inverse transform for a standardization: column scale is the square root
/// of the centered sum of squares (no n-1 divisor).
struct StandardizationReport {
    double y_mean = 0.0;
    Eigen::VectorXd col_means;
    Eigen::VectorXd col_scales;
};

/// Default thresholding parameter d = sqrt(p).
inline double default_threshold(Index p) { return std::sqrt(static_cast<double>(p)); }

/// Penalty parameterization. The Lagrangian form weights the coefficient
/// penalty by lambda1 = lambda * alpha and the pairwise-difference penalty by
/// lambda2 = lambda * (1 - alpha). The thresholding parameter d bounds alpha
/// from below (alpha >= 1/d) so the fit always retains a sparsity component.
class PenaltySpec {
  public:
    /// Validating constructor for the (alpha, lambda) form; alpha must lie in
    /// [1/d, 1] and lambda must be nonnegative.
    static PenaltySpec lagrangian(double alpha, double lambda, double d);

    /// Raw (lambda1, lambda2) form. Skips the alpha-threshold validation so
    /// penalties with alpha outside [1/d, 1] (e.g. lambda1 = 0) can be
    /// expressed directly.
    static PenaltySpec from_lambdas(double lambda1, double lambda2);

    double lambda1() const { return lambda1_; }
    double lambda2() const { return lambda2_; }
    double lambda() const { return lambda1_ + lambda2_; }
    double alpha() const {
        const double l = lambda();
        return l > 0.0 ? lambda1_ / l : 1.0;
    }
    double d() const { return d_; }

  private:
    PenaltySpec(double l1, double l2, double d) : lambda1_(l1), lambda2_(l2), d_(d) {}

    double lambda1_ = 0.0;
    double lambda2_ = 0.0;
    double d_ = 1.0;
};

inline PenaltySpec PenaltySpec::lagrangian(double alpha, double lambda, double d) {
    if (!(d > 0.0)) throw Error("thresholding parameter d must be positive");
    if (!(lambda >= 0.0)) throw Error("lambda must be nonnegative");
    const double slack = 1e-12;
    if (alpha < 1.0 / d - slack || alpha > 1.0 + slack)
        throw Error("alpha must lie in [1/d, 1]");
    alpha = std::min(std::max(alpha, 1.0 / d), 1.0);
    return PenaltySpec(lambda * alpha, lambda * (1.0 - alpha), d);
}

inline PenaltySpec PenaltySpec::from_lambdas(double lambda1, double lambda2) {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
        throw Error("lambda1 and lambda2 must be nonnegative");
    const double l = lambda1 + lambda2;
    const double alpha = l > 0.0 ? lambda1 / l : 1.0;
    const double d = alpha > 0.0 ? std::max(1.0, 1.0 / alpha) : 1.0;
    return PenaltySpec(lambda1, lambda2, d);
}

/// One equal-value coefficient group: the shared value and the (sorted)
/// member indices.
struct Group {
    double value = 0.0;
    std::vector<Index> members;
};

/// Partition of {0..p-1} into equal-value nonzero groups plus the zero set.
/// Degrees of freedom of a fit is groups.size().
struct GroupStructure {
    std::vector<Group> groups;   // sorted ascending by value
    std::vector<Index> zero_set; // sorted ascending
    double tolerance = 0.0;
};

/// Absolute tolerance for treating coefficients as equal (or zero) when
/// extracting groups. Fusion moves set values exactly equal, so this only
/// absorbs float noise.
inline constexpr double kGroupTolerance = 1e-8;

/// Result of a penalized fit on standardized data.
struct FitResult {
    Eigen::VectorXd beta;
    GroupStructure groups;
    double objective = 0.0;
    int df = 0;
    long iterations = 0;
    long fusion_moves_accepted = 0;
    bool converged = false;
    double kkt_residual = 0.0;
};

} // namespace horses
