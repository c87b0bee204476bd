#include "horses/data_model.hpp"

#include <algorithm>
#include <numeric>

namespace horses {

std::pair<Dataset, StandardizationReport> standardize(const Eigen::MatrixXd& raw_x,
                                                      const Eigen::VectorXd& raw_y) {
    const Index n = raw_x.rows();
    const Index p = raw_x.cols();
    if (raw_y.size() != n)
        throw DimensionMismatch("x has " + std::to_string(n) + " rows but y has " +
                                std::to_string(raw_y.size()));
    if (n < 2 || p < 1) throw Error("need n >= 2 and p >= 1");
    if (!raw_x.allFinite() || !raw_y.allFinite())
        throw NonFiniteInput("non-finite entry in input data");

    StandardizationReport report;
    report.y_mean = raw_y.mean();
    report.col_means = raw_x.colwise().mean();
    report.col_scales.resize(p);

    Dataset out;
    out.x.resize(n, p);
    out.y = raw_y.array() - report.y_mean;
    for (Index j = 0; j < p; ++j) {
        Eigen::VectorXd centered = raw_x.col(j).array() - report.col_means(j);
        const double scale = std::sqrt(centered.squaredNorm());
        if (scale <= 1e-12 * std::max(1.0, std::abs(report.col_means(j))))
            throw ConstantColumn(j);
        report.col_scales(j) = scale;
        out.x.col(j) = centered / scale;
    }
    out.standardized = true;
    return {std::move(out), std::move(report)};
}

std::pair<Eigen::VectorXd, double> destandardize(const Eigen::VectorXd& beta,
                                                 const StandardizationReport& report) {
    if (beta.size() != report.col_scales.size() || beta.size() != report.col_means.size())
        throw DimensionMismatch("coefficient length does not match report");
    Eigen::VectorXd raw = beta.array() / report.col_scales.array();
    const double intercept = report.y_mean - raw.dot(report.col_means);
    return {std::move(raw), intercept};
}

GroupStructure group_extract(const Eigen::VectorXd& beta, double tolerance) {
    if (!(tolerance >= 0.0)) throw Error("tolerance must be nonnegative");

    GroupStructure gs;
    gs.tolerance = tolerance;

    std::vector<std::pair<double, Index>> nonzero;
    nonzero.reserve(static_cast<size_t>(beta.size()));
    for (Index j = 0; j < beta.size(); ++j) {
        if (std::abs(beta(j)) <= tolerance)
            gs.zero_set.push_back(j);
        else
            nonzero.emplace_back(beta(j), j);
    }
    std::sort(nonzero.begin(), nonzero.end());

    for (size_t i = 0; i < nonzero.size();) {
        size_t e = i + 1;
        while (e < nonzero.size() && nonzero[e].first - nonzero[e - 1].first <= tolerance) ++e;
        Group g;
        double sum = 0.0;
        for (size_t m = i; m < e; ++m) {
            g.members.push_back(nonzero[m].second);
            sum += nonzero[m].first;
        }
        std::sort(g.members.begin(), g.members.end());
        g.value = sum / static_cast<double>(e - i);
        gs.groups.push_back(std::move(g));
        i = e;
    }
    return gs;
}

} // namespace horses
