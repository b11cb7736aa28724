#include "gaitpd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace gaitpd::analysis {

Matrix Matrix::from_states(std::span<const StateVector> states) {
    Matrix m(states.size(), kNumStates);
    for (std::size_t r = 0; r < states.size(); ++r) {
        for (std::size_t c = 0; c < kNumStates; ++c) m(r, c) = states[r][c];
    }
    return m;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

}  // namespace

EigenSystem jacobi_eigen(const Matrix& symmetric, double tol, std::size_t max_sweeps) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw Error(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
    Matrix a = symmetric;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (std::size_t sweep = 0; sweep < max_sweeps && off_diagonal_norm(a) > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that zeroes a(p, q).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    EigenSystem out;
    for (std::size_t i : order) {
        out.values.push_back(a(i, i));
        std::vector<double> vec(n);
        for (std::size_t k = 0; k < n; ++k) vec[k] = v(k, i);
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

std::vector<double> PcaResult::explained_ratio() const {
    std::vector<double> out;
    for (double v : explained_variance) out.push_back(total_variance > 0.0 ? v / total_variance : 0.0);
    return out;
}

PcaResult pca(const Matrix& data, std::size_t k, bool standardize) {
    const std::size_t n = data.rows();
    const std::size_t cols = data.cols();
    if (n < cols + 1) {
        throw Error(ErrorCode::TooFewSamples,
                    std::to_string(n) + " samples for " + std::to_string(cols) + " columns");
    }
    if (k == 0 || k > cols) throw Error(ErrorCode::InvalidConfig, "k must lie in [1, columns]");

    PcaResult out;
    out.column_mean.assign(cols, 0.0);
    out.column_scale.assign(cols, 1.0);
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        bool constant = true;
        for (std::size_t r = 0; r < n; ++r) {
            sum += data(r, c);
            constant = constant && data(r, c) == data(0, c);
        }
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t r = 0; r < n; ++r) sq += (data(r, c) - mean) * (data(r, c) - mean);
        const double sd = std::sqrt(sq / static_cast<double>(n));
        // Rounding in the mean leaves a tiny spread on a constant column, so
        // constancy is decided on the raw values.
        out.column_mean[c] = constant ? data(0, c) : mean;
        if (constant || sd == 0.0) {
            out.dropped.push_back(c);
            continue;
        }
        if (standardize) out.column_scale[c] = sd;
        kept.push_back(c);
    }
    if (kept.empty()) throw Error(ErrorCode::DegenerateAllConstant, "every column is constant");

    const std::size_t m = kept.size();
    Matrix centred(n, m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t c = kept[j];
            centred(r, j) = (data(r, c) - out.column_mean[c]) / out.column_scale[c];
        }
    }
    Matrix cov(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += centred(r, i) * centred(r, j);
            cov(i, j) = cov(j, i) = sum / static_cast<double>(n);
        }
    }
    out.total_variance = 0.0;
    for (std::size_t i = 0; i < m; ++i) out.total_variance += cov(i, i);

    const EigenSystem eig = jacobi_eigen(cov);
    const std::size_t kk = std::min(k, m);
    out.components = Matrix(kk, cols);
    out.scores = Matrix(n, kk);
    for (std::size_t i = 0; i < kk; ++i) {
        std::vector<double> vec = eig.vectors[i];
        std::size_t big = 0;
        for (std::size_t j = 1; j < m; ++j) {
            if (std::abs(vec[j]) > std::abs(vec[big])) big = j;
        }
        if (vec[big] < 0.0) {
            for (double& x : vec) x = -x;
        }
        out.explained_variance.push_back(std::max(0.0, eig.values[i]));
        for (std::size_t j = 0; j < m; ++j) out.components(i, kept[j]) = vec[j];
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += centred(r, j) * vec[j];
            out.scores(r, i) = s;
        }
    }
    return out;
}

EvaluationReport evaluate(std::vector<detector::TrialRow> rows, std::string detector) {
    if (rows.empty()) throw Error(ErrorCode::EmptyRows, "nothing to evaluate");
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
    EvaluationReport rep;
    rep.detector = std::move(detector);
    std::vector<double> delays;
    for (const auto& r : rows) {
        rep.tp += r.tp;
        rep.fp += r.fp;
        rep.tn += r.tn;
        rep.fn += r.fn;
        if (r.tp > 0 && r.delay_pct) delays.push_back(*r.delay_pct);
    }
    const std::size_t total = rep.tp + rep.fp + rep.tn + rep.fn;
    rep.accuracy = total ? static_cast<double>(rep.tp + rep.tn) / static_cast<double>(total) : 0.0;
    if (!delays.empty()) {
        // Sorted accumulation keeps the result independent of row order.
        std::sort(delays.begin(), delays.end());
        double sum = 0.0;
        for (double d : delays) sum += d;
        const double mean = sum / static_cast<double>(delays.size());
        double sq = 0.0;
        for (double d : delays) sq += (d - mean) * (d - mean);
        rep.delay_mean = mean;
        rep.delay_sd = std::sqrt(sq / static_cast<double>(delays.size()));
    }
    rep.rows = std::move(rows);
    return rep;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
    return buf;
}

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json j;
    j["detector"] = report.detector;
    j["confusion"] = {{"tp", report.tp}, {"fp", report.fp}, {"tn", report.tn}, {"fn", report.fn}};
    j["accuracy"] = report.accuracy;
    j["accuracy_pct"] = format_percent(report.accuracy);
    j["delay_mean_pct"] = report.delay_mean ? nlohmann::ordered_json(*report.delay_mean) : nullptr;
    j["delay_sd_pct"] = report.delay_sd ? nlohmann::ordered_json(*report.delay_sd) : nullptr;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["trial_id"] = r.trial_id;
        row["tp"] = r.tp;
        row["fp"] = r.fp;
        row["tn"] = r.tn;
        row["fn"] = r.fn;
        row["delay_pct"] = r.delay_pct ? nlohmann::ordered_json(*r.delay_pct) : nullptr;
        row["detection_sample"] = r.detection_sample ? nlohmann::ordered_json(*r.detection_sample) : nullptr;
        row["onset_sample"] = r.onset_sample ? nlohmann::ordered_json(*r.onset_sample) : nullptr;
        rows.push_back(std::move(row));
    }
    return j.dump(2);
}

void write_scores_csv(std::ostream& out, const PcaResult& result) {
    out << "sample";
    for (std::size_t i = 0; i < result.scores.cols(); ++i) out << ",pc" << (i + 1);
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < result.scores.rows(); ++r) {
        out << r;
        for (std::size_t i = 0; i < result.scores.cols(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%.9g", result.scores(r, i));
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace gaitpd::analysis
