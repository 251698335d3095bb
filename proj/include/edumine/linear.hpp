#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edumine::models {

// y = a + sum_i b_i * x_i
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
};

class SingularDesignError : public std::runtime_error {
public:
    SingularDesignError(std::string msg, std::vector<std::size_t> columns)
        : std::runtime_error(std::move(msg)), dependent_columns(std::move(columns)) {}
    std::vector<std::size_t> dependent_columns;  // indices into the predictor matrix
};

// Least squares via Householder QR on the design matrix [1 | X]. Rank
// deficiency raises SingularDesignError naming the dependent columns; no
// silent regularization.
inline LinearModel fit_mlr(const std::vector<std::vector<double>>& X, std::span<const double> y) {
    std::size_t n = X.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("fit_mlr: size mismatch");
    std::size_t p = X[0].size();
    if (n <= p) throw std::invalid_argument("fit_mlr: need more rows than columns");

    std::size_t cols = p + 1;
    // column-major design matrix with intercept column first
    std::vector<std::vector<double>> A(cols, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        A[0][i] = 1.0;
        if (X[i].size() != p) throw std::invalid_argument("fit_mlr: ragged matrix");
        for (std::size_t j = 0; j < p; ++j) A[j + 1][i] = X[i][j];
    }
    std::vector<double> rhs(y.begin(), y.end());

    double max_col_norm = 0.0;
    for (const auto& col : A) {
        double s = 0.0;
        for (double v : col) s += v * v;
        max_col_norm = std::max(max_col_norm, std::sqrt(s));
    }
    const double tol = 1e-10 * std::max(1.0, max_col_norm);

    std::vector<std::size_t> dependent;
    for (std::size_t k = 0; k < cols; ++k) {
        // Householder reflector for column k below row k
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += A[k][i] * A[k][i];
        norm = std::sqrt(norm);
        if (norm < tol) {
            if (k > 0) dependent.push_back(k - 1);
            continue;
        }
        double alpha = A[k][k] > 0 ? -norm : norm;
        std::vector<double> v(n - k);
        v[0] = A[k][k] - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = A[k][i];
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;
        auto apply = [&](std::vector<double>& col) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * col[i];
            double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) col[i] -= f * v[i - k];
        };
        for (std::size_t j = k; j < cols; ++j) apply(A[j]);
        apply(rhs);
        if (std::fabs(A[k][k]) < tol && k > 0) dependent.push_back(k - 1);
    }
    if (!dependent.empty()) {
        std::string msg = "fit_mlr: rank-deficient design, dependent column(s):";
        for (std::size_t c : dependent) msg += " " + std::to_string(c);
        throw SingularDesignError(std::move(msg), std::move(dependent));
    }

    // back substitution on the upper-triangular factor
    std::vector<double> beta(cols, 0.0);
    for (std::size_t kk = cols; kk > 0; --kk) {
        std::size_t k = kk - 1;
        double s = rhs[k];
        for (std::size_t j = k + 1; j < cols; ++j) s -= A[j][k] * beta[j];
        beta[k] = s / A[k][k];
    }

    LinearModel model;
    model.intercept = beta[0];
    model.coefficients.assign(beta.begin() + 1, beta.end());
    return model;
}

inline double predict_mlr_one(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.coefficients.size())
        throw std::invalid_argument("predict_mlr: arity mismatch");
    double y = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) y += model.coefficients[j] * x[j];
    return y;
}

inline std::vector<double> predict_mlr(const LinearModel& model,
                                       const std::vector<std::vector<double>>& X) {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_mlr_one(model, row));
    return out;
}

}  // namespace edumine::models
