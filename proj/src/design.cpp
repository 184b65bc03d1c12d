#include "penreg/design.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

DesignMatrix::DesignMatrix(MatrixXd values, bool intercept, std::vector<std::string> names)
    : values_(std::move(values)), intercept_(intercept), names_(std::move(names))
{
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw InvalidInput("design matrix must have at least one row and one column");
    }
    if (!values_.allFinite()) throw InvalidInput("design matrix contains non-finite values");
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(values_.cols()));
        for (Index j = 0; j < values_.cols(); ++j) names_.push_back(fmt::format("x{}", j + 1));
    }
    if (static_cast<Index>(names_.size()) != values_.cols()) {
        throw InvalidInput("column name count does not match design width");
    }
}

const VectorXd& DesignMatrix::column_means() const
{
    if (!standardized_) throw std::logic_error("design is not standardized");
    return standardized_->means;
}

const VectorXd& DesignMatrix::column_scales() const
{
    if (!standardized_) throw std::logic_error("design is not standardized");
    return standardized_->scales;
}

const MatrixXd& DesignMatrix::standardized() const
{
    if (!standardized_) throw std::logic_error("design is not standardized");
    return standardized_->values;
}

DesignMatrix DesignMatrix::subset_rows(const std::vector<Index>& rows) const
{
    MatrixXd sub(static_cast<Index>(rows.size()), values_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Index>(i)) = values_.row(rows[i]);
    return DesignMatrix(std::move(sub), intercept_, names_);
}

VectorXd DesignMatrix::predict(const VectorXd& coefficients) const
{
    if (coefficients.size() != values_.cols() + 1) {
        throw InvalidInput("coefficient vector must have length d + 1");
    }
    VectorXd out = values_ * coefficients.tail(values_.cols());
    out.array() += coefficients(0);
    return out;
}

DesignMatrix standardize(DesignMatrix design)
{
    const Index n = design.rows();
    const Index d = design.cols();
    auto s = std::make_shared<DesignMatrix::Standardization>();
    s->means = VectorXd::Zero(d);
    s->scales.resize(d);
    s->values = design.values_;
    for (Index j = 0; j < d; ++j) {
        auto col = s->values.col(j);
        if (design.intercept_) {
            const double mean = col.mean();
            col.array() -= mean;
            s->means(j) = mean;
        }
        const double scale = std::sqrt(col.squaredNorm() / static_cast<double>(n));
        const double magnitude = design.values_.col(j).cwiseAbs().maxCoeff();
        if (!(scale > 1e-12 * std::max(1.0, magnitude))) {
            throw InvalidInput(fmt::format("column '{}' is constant", design.names_[static_cast<std::size_t>(j)]));
        }
        col /= scale;
        s->scales(j) = scale;
    }
    design.standardized_ = std::move(s);
    return design;
}

DesignMatrix ensure_standardized(const DesignMatrix& design)
{
    if (design.is_standardized()) return design;
    return standardize(design);
}

double gram_min_eigenvalue(const DesignMatrix& design)
{
    const DesignMatrix std_design = ensure_standardized(design);
    const MatrixXd& xs = std_design.standardized();
    const MatrixXd gram = (xs.transpose() * xs) / static_cast<double>(xs.rows());
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

}  // namespace penreg
