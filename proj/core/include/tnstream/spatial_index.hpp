#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tnstream/point_set.hpp"

namespace tnstream {

enum class BackendKind { KdTree, BallTree, Lsh };

const char* to_string(BackendKind kind) noexcept;
std::optional<BackendKind> parse_backend(std::string_view name) noexcept;

struct LshParams {
    std::size_t num_hyperplanes = 16;  // signature bits per table, at most 64
    std::size_t num_tables = 8;
    std::uint64_t seed = 0;

    bool operator==(const LshParams&) const = default;
};

/// Backend selection. LSH parameters exist exactly when the kind is Lsh.
class IndexBackend {
public:
    static IndexBackend kd_tree() { return IndexBackend(BackendKind::KdTree, std::nullopt); }
    static IndexBackend ball_tree() { return IndexBackend(BackendKind::BallTree, std::nullopt); }
    /// Throws Errc::InvalidArgument for zero hyperplanes/tables or more than 64 bits.
    static IndexBackend lsh(LshParams params);
    static IndexBackend lsh(std::size_t num_hyperplanes, std::size_t num_tables, std::uint64_t seed)
    {
        return lsh(LshParams{num_hyperplanes, num_tables, seed});
    }

    BackendKind kind() const noexcept { return kind_; }
    const std::optional<LshParams>& lsh_params() const noexcept { return lsh_; }

    bool operator==(const IndexBackend&) const = default;

private:
    IndexBackend(BackendKind kind, std::optional<LshParams> lsh) : kind_(kind), lsh_(lsh) {}

    BackendKind kind_;
    std::optional<LshParams> lsh_;
};

struct Neighbor {
    PointId id;
    double distance;

    bool operator==(const Neighbor&) const = default;
};

/// Sorted ascending by (distance, id); never contains the query point.
using NeighborList = std::vector<Neighbor>;

/// Immutable neighbor-search structure over a PointSet.
///
/// Exact backends (KdTree, BallTree) return the true k nearest neighbors with
/// ties broken by smaller id, and exactly the closed ball for range queries.
/// The Lsh backend only inspects points whose signature collides with the
/// query in at least one table, then ranks/filters those candidates by true
/// distance, so its answers are a subset of the exact ones.
///
/// All query methods are const and safe to call concurrently.
class SpatialIndex {
public:
    virtual ~SpatialIndex() = default;

    SpatialIndex(const SpatialIndex&) = delete;
    SpatialIndex& operator=(const SpatialIndex&) = delete;

    const PointSet& points() const noexcept { return points_; }
    virtual BackendKind kind() const noexcept = 0;

    /// Neighbors of an indexed point, excluding the point itself.
    NeighborList knn(PointId query, std::size_t k) const;
    /// Neighbors of arbitrary coordinates; nothing is excluded.
    NeighborList knn(std::span<const double> query, std::size_t k) const;

    /// Ids with ‖x − center‖ ≤ r, ascending.
    std::vector<PointId> range(std::span<const double> center, double r) const;
    std::vector<PointId> range(PointId center, double r) const;

    /// Index over the same points minus `removed`, relative order kept.
    /// Exact backends rebuild; Lsh keeps its hash functions, so every
    /// remaining point stays in the buckets it was in. Either way a query
    /// whose answer here mentions no removed point gets the same answer from
    /// the result. Throws Errc::UnknownId, Errc::EmptyPointSet.
    std::unique_ptr<SpatialIndex> without(std::span<const PointId> removed) const;

    // Candidate in a knn search; ordering is (squared distance, id).
    struct Candidate {
        double d2;
        PointId id;
        std::size_t pos;
    };

protected:
    explicit SpatialIndex(PointSet points) : points_(std::move(points)) {}

    static constexpr std::size_t no_exclusion = static_cast<std::size_t>(-1);

    // Fills `out` with the best min(k, available) candidates, unordered.
    virtual void knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                          std::vector<Candidate>& out) const = 0;
    // Appends positions of points within the closed ball, any order.
    virtual void range_impl(std::span<const double> center, double r,
                            std::vector<std::size_t>& out) const = 0;
    // Same backend over `points`, which is a subset of points_.
    virtual std::unique_ptr<SpatialIndex> rebuilt(PointSet points) const = 0;

    PointSet points_;

private:
    NeighborList finish_knn(std::vector<Candidate>& cands) const;
};

/// Throws Errc::EmptyPointSet. The point set is moved into the index.
std::unique_ptr<SpatialIndex> build_index(PointSet points, const IndexBackend& backend);

/// Row-major matrix of hyperplane normals drawn from a seeded standard normal.
class HyperplaneSet {
public:
    HyperplaneSet(std::size_t count, std::size_t dim, std::uint64_t seed);
    HyperplaneSet(std::size_t count, std::size_t dim, std::mt19937_64& rng);
    /// Explicit normals, `weights.size() == count * dim`.
    HyperplaneSet(std::size_t count, std::size_t dim, std::vector<double> weights);

    std::size_t count() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> row(std::size_t i) const { return {weights_.data() + i * dim_, dim_}; }

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> weights_;
};

struct SrpSignature {
    std::vector<std::uint8_t> bits;  // one 0/1 value per hyperplane

    /// Bits packed little-endian into an integer; requires at most 64 bits.
    std::uint64_t key() const noexcept;
    bool operator==(const SrpSignature&) const = default;
};

/// Bit j is 1 iff dot(w_j, x) ≥ 0. Throws Errc::DimensionMismatch.
SrpSignature srp_signature(std::span<const double> x, const HyperplaneSet& hyperplanes);

}  // namespace tnstream
