#pragma once

#include "horses/types.hpp"

namespace horses {

/// Centers y and transforms every column of x to zero mean and unit sum of
/// squares. Rejects constant columns and non-finite input.
std::pair<Dataset, StandardizationReport> standardize(const Eigen::MatrixXd& raw_x,
                                                      const Eigen::VectorXd& raw_y);

/// Maps standardized-scale coefficients back to the raw predictor scale and
/// derives the intercept. Predictions on raw data then equal predictions on
/// standardized data plus the response mean.
std::pair<Eigen::VectorXd, double> destandardize(const Eigen::VectorXd& beta,
                                                 const StandardizationReport& report);

/// Partitions coefficients into equal-value nonzero groups and the zero set.
/// Grouping is by value equality: nonzero coefficients are sorted and
/// consecutive values are merged while their gap stays within `tolerance`
/// (single linkage on the sorted line). A coefficient is zero when
/// |beta_j| <= tolerance.
GroupStructure group_extract(const Eigen::VectorXd& beta, double tolerance = kGroupTolerance);

} // namespace horses
