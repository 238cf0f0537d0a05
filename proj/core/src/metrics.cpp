#include "tnstream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnstream/error.hpp"

namespace tnstream {

namespace {

std::size_t index_of(const std::vector<long>& sorted, long v)
{
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

// Σ c log(c / n) over nonzero counts; equals −n·H.
double scaled_entropy(const std::vector<std::size_t>& counts, double n)
{
    double s = 0.0;
    for (std::size_t c : counts) {
        if (c > 0) {
            s += static_cast<double>(c) * std::log(static_cast<double>(c) / n);
        }
    }
    return s;
}

}  // namespace

bool ContingencyTable::identical_partitions() const noexcept
{
    if (a.size() != b.size()) {
        return false;
    }
    for (const auto& row : counts) {
        if (std::count_if(row.begin(), row.end(), [](std::size_t c) { return c > 0; }) != 1) {
            return false;
        }
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        std::size_t nonzero = 0;
        for (const auto& row : counts) {
            nonzero += row[j] > 0;
        }
        if (nonzero != 1) {
            return false;
        }
    }
    return true;
}

ContingencyTable contingency(std::span<const long> truth, std::span<const long> pred, OutlierMode mode)
{
    if (truth.size() != pred.size()) {
        throw Error(Errc::LengthMismatch,
                    std::to_string(truth.size()) + " true labels vs " + std::to_string(pred.size()) + " predicted");
    }
    auto kept = [&](std::size_t i) { return mode == OutlierMode::AsCluster || pred[i] != 0; };

    ContingencyTable t;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (kept(i)) {
            t.pred_labels.push_back(pred[i]);
            t.true_labels.push_back(truth[i]);
        }
    }
    if (t.pred_labels.empty()) {
        throw Error(Errc::Empty, "no labels to score");
    }
    for (auto* v : {&t.pred_labels, &t.true_labels}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    t.counts.assign(t.pred_labels.size(), std::vector<std::size_t>(t.true_labels.size(), 0));
    t.a.assign(t.pred_labels.size(), 0);
    t.b.assign(t.true_labels.size(), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!kept(i)) {
            continue;
        }
        const std::size_t r = index_of(t.pred_labels, pred[i]);
        const std::size_t c = index_of(t.true_labels, truth[i]);
        ++t.counts[r][c];
        ++t.a[r];
        ++t.b[c];
        ++t.n;
    }
    return t;
}

double purity(const ContingencyTable& table)
{
    std::size_t hits = 0;
    for (const auto& row : table.counts) {
        hits += *std::max_element(row.begin(), row.end());
    }
    return static_cast<double>(hits) / static_cast<double>(table.n);
}

double nmi(const ContingencyTable& table)
{
    if (table.identical_partitions()) {
        return 1.0;
    }
    const double n = static_cast<double>(table.n);
    const double hc = scaled_entropy(table.a, n);
    const double hg = scaled_entropy(table.b, n);
    if (hc == 0.0 || hg == 0.0) {
        return 0.0;
    }
    double mi = 0.0;
    for (std::size_t i = 0; i < table.a.size(); ++i) {
        for (std::size_t j = 0; j < table.b.size(); ++j) {
            const double nij = static_cast<double>(table.counts[i][j]);
            if (nij > 0) {
                mi += nij * std::log(n * nij / (static_cast<double>(table.a[i]) * static_cast<double>(table.b[j])));
            }
        }
    }
    // Both sums carry the same factor n, so the ratio is MI / sqrt(H(C) H(G)).
    return mi / std::sqrt(hc * hg);
}

double ari(const ContingencyTable& table)
{
    if (table.identical_partitions()) {
        return 1.0;
    }
    // pair counts are integers; keep them exact and cross-multiply by the
    // total pair count so small tables give exact ratios
    __extension__ typedef __int128 wide;
    auto pairs = [](std::size_t m) { return static_cast<wide>(m) * (static_cast<wide>(m) - 1) / 2; };
    wide index = 0;
    for (const auto& row : table.counts) {
        for (std::size_t c : row) {
            index += pairs(c);
        }
    }
    wide sa = 0;
    wide sb = 0;
    for (std::size_t c : table.a) {
        sa += pairs(c);
    }
    for (std::size_t c : table.b) {
        sb += pairs(c);
    }
    const wide total = pairs(table.n);
    const wide num = 2 * (total * index - sa * sb);
    const wide den = total * (sa + sb) - 2 * sa * sb;
    if (den == 0) {
        return 1.0;
    }
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

double ari(std::span<const long> truth, std::span<const long> pred, OutlierMode mode)
{
    return ari(contingency(truth, pred, mode));
}

Scores evaluate(std::span<const long> truth, std::span<const long> pred, OutlierMode mode)
{
    const ContingencyTable t = contingency(truth, pred, mode);
    return {purity(t), ari(t), nmi(t)};
}

}  // namespace tnstream
