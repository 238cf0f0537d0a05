#include "tnstream/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "index_backends.hpp"
#include "tnstream/error.hpp"

namespace tnstream {

const char* to_string(BackendKind kind) noexcept
{
    switch (kind) {
    case BackendKind::KdTree: return "kdtree";
    case BackendKind::BallTree: return "balltree";
    case BackendKind::Lsh: return "lsh";
    }
    return "unknown";
}

std::optional<BackendKind> parse_backend(std::string_view name) noexcept
{
    if (name == "kdtree" || name == "kd" || name == "KdTree") {
        return BackendKind::KdTree;
    }
    if (name == "balltree" || name == "ball" || name == "BallTree") {
        return BackendKind::BallTree;
    }
    if (name == "lsh" || name == "Lsh") {
        return BackendKind::Lsh;
    }
    return std::nullopt;
}

IndexBackend IndexBackend::lsh(LshParams params)
{
    if (params.num_hyperplanes == 0 || params.num_hyperplanes > 64) {
        throw Error(Errc::InvalidArgument, "num_hyperplanes must be in [1, 64]");
    }
    if (params.num_tables == 0) {
        throw Error(Errc::InvalidArgument, "num_tables must be at least 1");
    }
    return IndexBackend(BackendKind::Lsh, params);
}

namespace {

void check_query_arity(const PointSet& ps, std::span<const double> q)
{
    if (q.size() != ps.dim()) {
        throw Error(Errc::DimensionMismatch, "query has " + std::to_string(q.size()) + " coordinates, index has " +
                                                 std::to_string(ps.dim()));
    }
}

void check_k(std::size_t k)
{
    if (k == 0) {
        throw Error(Errc::InvalidArgument, "k must be at least 1");
    }
}

}  // namespace

NeighborList SpatialIndex::finish_knn(std::vector<Candidate>& cands) const
{
    std::sort(cands.begin(), cands.end(), detail::candidate_less);
    NeighborList out;
    out.reserve(cands.size());
    for (const auto& c : cands) {
        out.push_back({c.id, std::sqrt(c.d2)});
    }
    return out;
}

NeighborList SpatialIndex::knn(PointId query, std::size_t k) const
{
    check_k(k);
    const std::size_t pos = points_.position(query);
    std::vector<Candidate> cands;
    knn_impl(points_.coords(pos), k, pos, cands);
    return finish_knn(cands);
}

NeighborList SpatialIndex::knn(std::span<const double> query, std::size_t k) const
{
    check_k(k);
    check_query_arity(points_, query);
    std::vector<Candidate> cands;
    knn_impl(query, k, no_exclusion, cands);
    return finish_knn(cands);
}

std::vector<PointId> SpatialIndex::range(std::span<const double> center, double r) const
{
    check_query_arity(points_, center);
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw Error(Errc::InvalidArgument, "range radius must be finite and non-negative");
    }
    std::vector<std::size_t> pos;
    range_impl(center, r, pos);
    std::vector<PointId> ids;
    ids.reserve(pos.size());
    for (std::size_t p : pos) {
        ids.push_back(points_.id(p));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<PointId> SpatialIndex::range(PointId center, double r) const
{
    return range(points_.coords_of(center), r);
}

std::unique_ptr<SpatialIndex> SpatialIndex::without(std::span<const PointId> removed) const
{
    std::vector<char> drop(points_.size(), 0);
    for (PointId id : removed) {
        drop[points_.position(id)] = 1;
    }
    PointSet rest(points_.dim());
    rest.reserve(points_.size());
    for (std::size_t p = 0; p < points_.size(); ++p) {
        if (!drop[p]) {
            rest.add(points_.id(p), points_.coords(p));
        }
    }
    if (rest.empty()) {
        throw Error(Errc::EmptyPointSet, "cannot index an empty point set");
    }
    return rebuilt(std::move(rest));
}

std::unique_ptr<SpatialIndex> build_index(PointSet points, const IndexBackend& backend)
{
    if (points.empty()) {
        throw Error(Errc::EmptyPointSet, "cannot index an empty point set");
    }
    if (points.size() > UINT32_MAX) {
        throw Error(Errc::InvalidArgument, "point set too large");
    }
    switch (backend.kind()) {
    case BackendKind::KdTree: return std::make_unique<detail::KdTreeIndex>(std::move(points));
    case BackendKind::BallTree: return std::make_unique<detail::BallTreeIndex>(std::move(points));
    case BackendKind::Lsh: return std::make_unique<detail::LshIndex>(std::move(points), *backend.lsh_params());
    }
    throw Error(Errc::InvalidArgument, "unknown backend");
}

namespace {

void draw_normals(std::vector<double>& weights, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& w : weights) {
        w = normal(rng);
    }
}

}  // namespace

HyperplaneSet::HyperplaneSet(std::size_t count, std::size_t dim, std::mt19937_64& rng)
    : count_(count), dim_(dim), weights_(count * dim)
{
    draw_normals(weights_, rng);
}

HyperplaneSet::HyperplaneSet(std::size_t count, std::size_t dim, std::uint64_t seed)
    : count_(count), dim_(dim), weights_(count * dim)
{
    std::mt19937_64 rng(seed);
    draw_normals(weights_, rng);
}

HyperplaneSet::HyperplaneSet(std::size_t count, std::size_t dim, std::vector<double> weights)
    : count_(count), dim_(dim), weights_(std::move(weights))
{
    if (weights_.size() != count * dim) {
        throw Error(Errc::DimensionMismatch, "hyperplane matrix has wrong number of entries");
    }
}

std::uint64_t SrpSignature::key() const noexcept
{
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < bits.size() && j < 64; ++j) {
        key |= static_cast<std::uint64_t>(bits[j] & 1U) << j;
    }
    return key;
}

SrpSignature srp_signature(std::span<const double> x, const HyperplaneSet& hyperplanes)
{
    if (x.size() != hyperplanes.dim()) {
        throw Error(Errc::DimensionMismatch, "hyperplane arity differs from point arity");
    }
    SrpSignature sig;
    sig.bits.resize(hyperplanes.count());
    for (std::size_t j = 0; j < hyperplanes.count(); ++j) {
        const auto w = hyperplanes.row(j);
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            dot += w[i] * x[i];
        }
        sig.bits[j] = dot >= 0.0 ? 1 : 0;
    }
    return sig;
}

}  // namespace tnstream
