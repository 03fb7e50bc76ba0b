#include "driftguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/errors.hpp"

namespace driftguard::metrics {

void AccuracyMatrix::record(std::size_t t, std::size_t i, double acc) {
    if (t < 1 || i < 1 || i > t) {
        throw ProtocolError("accuracy slot (" + std::to_string(t) + "," + std::to_string(i) +
                            ") is outside the lower triangle");
    }
    if (!std::isfinite(acc) || acc < 0.0 || acc > 1.0) {
        throw ProtocolError("accuracy must lie in [0,1], got " + std::to_string(acc));
    }
    while (rows_.size() < t) rows_.emplace_back(rows_.size() + 1);
    auto& slot = rows_[t - 1][i - 1];
    if (slot) {
        throw ProtocolError("accuracy slot (" + std::to_string(t) + "," + std::to_string(i) +
                            ") already written");
    }
    slot = acc;
}

std::optional<double> AccuracyMatrix::at(std::size_t t, std::size_t i) const {
    if (t < 1 || i < 1 || i > t || t > rows_.size()) return std::nullopt;
    return rows_[t - 1][i - 1];
}

bool AccuracyMatrix::row_complete(std::size_t t) const {
    if (t < 1 || t > rows_.size()) return false;
    return std::all_of(rows_[t - 1].begin(), rows_[t - 1].end(),
                       [](const auto& v) { return v.has_value(); });
}

std::vector<std::vector<double>> AccuracyMatrix::to_rows() const {
    std::vector<std::vector<double>> out;
    for (std::size_t t = 1; t <= rows_.size() && row_complete(t); ++t) {
        std::vector<double> row;
        for (const auto& v : rows_[t - 1]) row.push_back(*v);
        out.push_back(std::move(row));
    }
    return out;
}

AccuracyMatrix AccuracyMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    AccuracyMatrix m;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].size() != t + 1) {
            throw ProtocolError("row " + std::to_string(t + 1) + " must have " +
                                std::to_string(t + 1) + " entries");
        }
        for (std::size_t i = 0; i < rows[t].size(); ++i) m.record(t + 1, i + 1, rows[t][i]);
    }
    return m;
}

double average_accuracy(const AccuracyMatrix& m, std::size_t T) {
    if (!m.row_complete(T)) {
        throw ProtocolError("row " + std::to_string(T) + " of the accuracy matrix is incomplete");
    }
    double sum = 0.0;
    for (std::size_t i = 1; i <= T; ++i) sum += *m.at(T, i);
    return sum / static_cast<double>(T);
}

double average_forgetting(const AccuracyMatrix& m, std::size_t T) {
    for (std::size_t t = 1; t <= T; ++t) {
        if (!m.row_complete(t)) {
            throw ProtocolError("row " + std::to_string(t) +
                                " of the accuracy matrix is incomplete");
        }
    }
    if (T == 1) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i < T; ++i) {
        double peak = *m.at(i, i);
        for (std::size_t t = i + 1; t < T; ++t) peak = std::max(peak, *m.at(t, i));
        sum += peak - *m.at(T, i);
    }
    return sum / static_cast<double>(T - 1);
}

}  // namespace driftguard::metrics
