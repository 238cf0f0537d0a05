#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tnstream/point_set.hpp"
#include "tnstream/spatial_index.hpp"

namespace tnstream {

struct SnnParams {
    std::size_t tk = 5;   // neighborhood size for shared-neighbor counting
    std::size_t mk = 4;   // minimum shared count for a neighbor to qualify
    double r_max = 0.05;  // radius cap

    /// Throws Errc::InvalidConfig.
    void validate() const;
};

/// Shared-nearest-neighbor queries over one index, with each point's tk-NN
/// list computed once and memoized. Not thread-safe; use one per thread.
class SnnContext {
public:
    SnnContext(const SpatialIndex& index, std::size_t tk);

    /// tk nearest neighbors of an indexed point (fewer if the index is small).
    const NeighborList& neighbors(PointId id);

    /// |KNN(tk, i) ∩ KNN(tk, j)|. Throws Errc::SamePoint, Errc::UnknownId.
    std::size_t snn_count(PointId i, PointId j);

    /// Largest distance from `seed` to one of its tk neighbors sharing at
    /// least mk neighbors with it, capped at r_max; empty when no neighbor
    /// qualifies. A zero distance (co-located points) is floored to the
    /// smallest positive double so the radius stays strictly positive.
    std::optional<double> adaptive_radius(PointId seed, const SnnParams& params);

    /// Switches to `next`, an index made from the current one with
    /// SpatialIndex::without(). Memoized lists that mention a dropped point
    /// are discarded; the rest are still the answers `next` would give.
    void rebase(const SpatialIndex& next);

    /// True when the seed's list and the lists of all its neighbors are
    /// memoized, i.e. adaptive_radius(seed) would not query the index.
    bool memoized(PointId seed) const;

private:
    const std::vector<PointId>& sorted_ids(std::size_t pos);

    const SpatialIndex* index_;
    std::size_t tk_;
    std::vector<std::optional<NeighborList>> lists_;
    std::vector<std::optional<std::vector<PointId>>> sorted_;
};

/// Exact count over `ps`. Throws Errc::SamePoint, Errc::UnknownId,
/// Errc::KTooLarge (tk ≥ |ps|), Errc::InvalidArgument (tk = 0).
std::size_t snn_count(const PointSet& ps, PointId i, PointId j, std::size_t tk);

/// Exact adaptive radius of `seed` among `unassigned`.
std::optional<double> adaptive_radius(const PointSet& unassigned, PointId seed, const SnnParams& params);

}  // namespace tnstream
