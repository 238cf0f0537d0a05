#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tnstream {

/// How predicted label 0 (outlier) is counted.
enum class OutlierMode {
    AsCluster,  // all outliers form one extra predicted cluster
    Exclude,    // points predicted as outliers are dropped before scoring
};

/// Joint counts of predicted cluster i (rows) against true class j (columns).
struct ContingencyTable {
    std::vector<long> pred_labels;  // row labels, ascending
    std::vector<long> true_labels;  // column labels, ascending
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> a;  // row sums
    std::vector<std::size_t> b;  // column sums
    std::size_t n = 0;

    /// Every row and every column has exactly one nonzero cell.
    bool identical_partitions() const noexcept;
};

/// Throws Errc::LengthMismatch, Errc::Empty (also when Exclude drops every point).
ContingencyTable contingency(std::span<const long> truth, std::span<const long> pred,
                             OutlierMode mode = OutlierMode::AsCluster);

double purity(const ContingencyTable& table);
/// Mutual information over the geometric mean of the two entropies, natural
/// log. 1 for identical partitions, 0 if exactly one side is a single cluster.
double nmi(const ContingencyTable& table);
/// Contingency-binomial adjusted Rand index; 1 when the partitions coincide.
double ari(const ContingencyTable& table);
double ari(std::span<const long> truth, std::span<const long> pred, OutlierMode mode = OutlierMode::AsCluster);

struct Scores {
    double purity = 0.0;
    double ari = 0.0;
    double nmi = 0.0;
};

Scores evaluate(std::span<const long> truth, std::span<const long> pred, OutlierMode mode = OutlierMode::AsCluster);

}  // namespace tnstream
