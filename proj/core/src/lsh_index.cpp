#include <algorithm>
#include <random>

#include "index_backends.hpp"

namespace tnstream::detail {

LshIndex::LshIndex(PointSet points, const LshParams& params) : SpatialIndex(std::move(points)), params_(params)
{
    const std::size_t dim = points_.dim();
    const std::size_t n = points_.size();

    offset_.assign(dim, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        const auto x = points_.coords(p);
        for (std::size_t d = 0; d < dim; ++d) {
            offset_[d] += x[d];
        }
    }
    for (double& o : offset_) {
        o /= static_cast<double>(n);
    }

    std::mt19937_64 rng(params_.seed);
    tables_.reserve(params_.num_tables);
    for (std::size_t t = 0; t < params_.num_tables; ++t) {
        tables_.emplace_back(params_.num_hyperplanes, dim, rng);
    }
    // Each hyperplane passes through a randomly drawn data point, so cuts
    // fall where the data is instead of all meeting at the mean.
    bias_.assign(params_.num_tables * params_.num_hyperplanes, 0.0);
    std::uniform_int_distribution<std::size_t> pick(0, n == 0 ? 0 : n - 1);
    for (std::size_t t = 0; t < params_.num_tables && n > 0; ++t) {
        for (std::size_t j = 0; j < params_.num_hyperplanes; ++j) {
            const auto anchor = points_.coords(pick(rng));
            const auto row = tables_[t].row(j);
            double b = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                b += row[d] * (anchor[d] - offset_[d]);
            }
            bias_[t * params_.num_hyperplanes + j] = b;
        }
    }

    fill_buckets();
}

LshIndex::LshIndex(PointSet points, const LshIndex& hashing)
    : SpatialIndex(std::move(points)),
      params_(hashing.params_),
      offset_(hashing.offset_),
      bias_(hashing.bias_),
      tables_(hashing.tables_)
{
    fill_buckets();
}

std::unique_ptr<SpatialIndex> LshIndex::rebuilt(PointSet points) const
{
    return std::make_unique<LshIndex>(std::move(points), *this);
}

void LshIndex::fill_buckets()
{
    const std::size_t dim = points_.dim();
    const std::size_t n = points_.size();
    buckets_.assign(params_.num_tables, {});
    point_keys_.resize(n * params_.num_tables);
    std::vector<double> centered(dim);
    for (std::size_t p = 0; p < n; ++p) {
        const auto x = points_.coords(p);
        for (std::size_t d = 0; d < dim; ++d) {
            centered[d] = x[d] - offset_[d];
        }
        for (std::size_t t = 0; t < params_.num_tables; ++t) {
            const std::uint64_t key = table_key(t, centered);
            point_keys_[p * params_.num_tables + t] = key;
            buckets_[t][key].push_back(static_cast<std::uint32_t>(p));
        }
    }
}

std::uint64_t LshIndex::table_key(std::size_t table, std::span<const double> centered) const
{
    // srp_signature() rule with a per-hyperplane offset: bit j set iff dot(w_j, x) >= b_j.
    const HyperplaneSet& w = tables_[table];
    const double* bias = bias_.data() + table * w.count();
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < w.count(); ++j) {
        const auto row = w.row(j);
        double dot = 0.0;
        for (std::size_t i = 0; i < centered.size(); ++i) {
            dot += row[i] * centered[i];
        }
        if (dot >= bias[j]) {
            key |= std::uint64_t{1} << j;
        }
    }
    return key;
}

void LshIndex::candidates(std::span<const double> query, std::size_t query_pos, std::vector<std::uint32_t>& out) const
{
    out.clear();
    std::vector<double> centered;
    if (query_pos == no_exclusion) {
        centered.resize(query.size());
        for (std::size_t d = 0; d < query.size(); ++d) {
            centered[d] = query[d] - offset_[d];
        }
    }
    // per-thread visit marks; a fresh epoch per call avoids clearing them
    thread_local std::vector<std::uint64_t> marks;
    thread_local std::uint64_t epoch = 0;
    if (marks.size() < points_.size()) {
        marks.resize(points_.size(), 0);
    }
    ++epoch;
    for (std::size_t t = 0; t < params_.num_tables; ++t) {
        const std::uint64_t key =
            query_pos == no_exclusion ? table_key(t, centered) : point_keys_[query_pos * params_.num_tables + t];
        const auto it = buckets_[t].find(key);
        if (it == buckets_[t].end()) {
            continue;
        }
        for (std::uint32_t pos : it->second) {
            if (marks[pos] != epoch) {
                marks[pos] = epoch;
                out.push_back(pos);
            }
        }
    }
}

void LshIndex::knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                        std::vector<Candidate>& out) const
{
    std::vector<std::uint32_t> cands;
    candidates(query, exclude_pos, cands);
    TopK top(k, out);
    for (std::uint32_t pos : cands) {
        if (pos == exclude_pos) {
            continue;
        }
        top.offer({squared_distance(query, points_.coords(pos)), points_.id(pos), pos});
    }
}

void LshIndex::range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const
{
    std::vector<std::uint32_t> cands;
    candidates(center, no_exclusion, cands);
    for (std::uint32_t pos : cands) {
        if (within_radius(squared_distance(center, points_.coords(pos)), r)) {
            out.push_back(pos);
        }
    }
}

}  // namespace tnstream::detail
