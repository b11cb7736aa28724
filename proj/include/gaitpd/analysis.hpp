#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitpd/detector.hpp"

namespace gaitpd::analysis {

/// Dense row-major matrix, just enough for PCA on a handful of columns.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_states(std::span<const StateVector> states);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct EigenSystem {
    std::vector<double> values;          // descending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, iterated until the
/// off-diagonal Frobenius norm drops below tol.
EigenSystem jacobi_eigen(const Matrix& symmetric, double tol = 1e-12, std::size_t max_sweeps = 100);

struct PcaResult {
    Matrix components;                    // k x cols; rows orthonormal, zero on dropped columns
    std::vector<double> explained_variance;  // k, non-increasing
    double total_variance = 0.0;          // trace of the analysed covariance
    Matrix scores;                        // samples x k
    std::vector<double> column_mean;
    std::vector<double> column_scale;     // sd when standardized, else 1
    std::vector<std::size_t> dropped;     // constant columns

    std::vector<double> explained_ratio() const;
};

/// PCA with population covariance. Constant columns are dropped; component
/// signs make the largest-magnitude loading positive.
PcaResult pca(const Matrix& data, std::size_t k, bool standardize = true);

struct EvaluationReport {
    std::string detector;  // "kinematic" or "wbam"
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    double accuracy = 0.0;
    std::optional<double> delay_mean;  // percent of gait cycle, TPs only
    std::optional<double> delay_sd;    // population
    std::vector<detector::TrialRow> rows;  // sorted by trial_id
};

EvaluationReport evaluate(std::vector<detector::TrialRow> rows, std::string detector);

/// Accuracy as a percentage with one decimal, e.g. "98.8%".
std::string format_percent(double fraction);

std::string report_to_json(const EvaluationReport& report);
void write_scores_csv(std::ostream& out, const PcaResult& result);

}  // namespace gaitpd::analysis
