#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace penreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raw predictor matrix plus the centering/scaling metadata the solvers use
/// internally. Values are never modified; coefficients leave the solvers on
/// the scale of `values()`.
///
/// With an intercept, columns are centered at their mean and scaled by their
/// population standard deviation. Without one, columns are left uncentered
/// and scaled by their root mean square so that x'x/n = 1 still holds.
class DesignMatrix
{
public:
    DesignMatrix() = default;
    explicit DesignMatrix(MatrixXd values, bool intercept = true, std::vector<std::string> names = {});

    const MatrixXd& values() const { return values_; }
    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    bool intercept() const { return intercept_; }
    const std::vector<std::string>& names() const { return names_; }

    bool is_standardized() const { return standardized_ != nullptr; }
    /// Requires is_standardized().
    const VectorXd& column_means() const;
    const VectorXd& column_scales() const;
    const MatrixXd& standardized() const;

    /// Rows `rows` of this design, unstandardized.
    DesignMatrix subset_rows(const std::vector<Index>& rows) const;

    /// intercept + X * slopes for a (d+1)-vector laid out [intercept, slopes...].
    VectorXd predict(const VectorXd& coefficients) const;

private:
    friend DesignMatrix standardize(DesignMatrix design);

    struct Standardization
    {
        VectorXd means;
        VectorXd scales;
        MatrixXd values;
    };

    MatrixXd values_;
    bool intercept_ = true;
    std::vector<std::string> names_;
    std::shared_ptr<const Standardization> standardized_;
};

/// Populates centering/scaling metadata. Throws InvalidInput naming the first
/// constant column.
DesignMatrix standardize(DesignMatrix design);

/// Returns `design` standardized, reusing the metadata when already present.
DesignMatrix ensure_standardized(const DesignMatrix& design);

/// Smallest eigenvalue of X'X/n on the standardized columns.
double gram_min_eigenvalue(const DesignMatrix& design);

}  // namespace penreg
