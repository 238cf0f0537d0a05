#include "tnstream/snn_radius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tnstream/error.hpp"

namespace tnstream {

void SnnParams::validate() const
{
    if (tk < 1) {
        throw Error(Errc::InvalidConfig, "tk must be at least 1");
    }
    if (mk > tk) {
        throw Error(Errc::InvalidConfig, "mk must not exceed tk");
    }
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
        throw Error(Errc::InvalidConfig, "r_max must be positive and finite");
    }
}

SnnContext::SnnContext(const SpatialIndex& index, std::size_t tk)
    : index_(&index), tk_(tk), lists_(index.points().size()), sorted_(index.points().size())
{
    if (tk == 0) {
        throw Error(Errc::InvalidArgument, "tk must be at least 1");
    }
}

const NeighborList& SnnContext::neighbors(PointId id)
{
    const std::size_t pos = index_->points().position(id);
    if (!lists_[pos]) {
        lists_[pos] = index_->knn(id, tk_);
    }
    return *lists_[pos];
}

const std::vector<PointId>& SnnContext::sorted_ids(std::size_t pos)
{
    if (!sorted_[pos]) {
        std::vector<PointId> ids;
        for (const Neighbor& nb : neighbors(index_->points().id(pos))) {
            ids.push_back(nb.id);
        }
        std::sort(ids.begin(), ids.end());
        sorted_[pos] = std::move(ids);
    }
    return *sorted_[pos];
}

std::size_t SnnContext::snn_count(PointId i, PointId j)
{
    if (i == j) {
        throw Error(Errc::SamePoint, "shared-neighbor count of point " + std::to_string(i) + " with itself");
    }
    const auto& a = sorted_ids(index_->points().position(i));
    const auto& b = sorted_ids(index_->points().position(j));
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

void SnnContext::rebase(const SpatialIndex& next)
{
    const PointSet& before = index_->points();
    const PointSet& after = next.points();
    std::vector<std::optional<NeighborList>> lists(after.size());
    std::vector<std::optional<std::vector<PointId>>> sorted(after.size());
    for (std::size_t pos = 0; pos < after.size(); ++pos) {
        const std::size_t old = before.position(after.id(pos));
        if (!lists_[old]) {
            continue;
        }
        const bool intact = std::all_of(lists_[old]->begin(), lists_[old]->end(),
                                        [&](const Neighbor& nb) { return after.contains(nb.id); });
        if (intact) {
            lists[pos] = std::move(lists_[old]);
            sorted[pos] = std::move(sorted_[old]);
        }
    }
    index_ = &next;
    lists_ = std::move(lists);
    sorted_ = std::move(sorted);
}

bool SnnContext::memoized(PointId seed) const
{
    const PointSet& ps = index_->points();
    const auto& own = lists_[ps.position(seed)];
    if (!own) {
        return false;
    }
    return std::all_of(own->begin(), own->end(), [&](const Neighbor& nb) { return lists_[ps.position(nb.id)].has_value(); });
}

std::optional<double> SnnContext::adaptive_radius(PointId seed, const SnnParams& params)
{
    std::optional<double> radius;
    for (const Neighbor& nb : neighbors(seed)) {
        if (snn_count(seed, nb.id) >= params.mk) {
            radius = std::max(radius.value_or(0.0), nb.distance);
        }
    }
    if (!radius) {
        return std::nullopt;
    }
    const double floored = std::max(*radius, std::numeric_limits<double>::denorm_min());
    return std::min(params.r_max, floored);
}

std::size_t snn_count(const PointSet& ps, PointId i, PointId j, std::size_t tk)
{
    if (tk == 0) {
        throw Error(Errc::InvalidArgument, "tk must be at least 1");
    }
    if (i == j) {
        throw Error(Errc::SamePoint, "shared-neighbor count of point " + std::to_string(i) + " with itself");
    }
    ps.position(i);
    ps.position(j);
    if (tk >= ps.size()) {
        throw Error(Errc::KTooLarge, "tk must be smaller than the point count");
    }
    const auto index = build_index(ps, IndexBackend::kd_tree());
    SnnContext ctx(*index, tk);
    return ctx.snn_count(i, j);
}

std::optional<double> adaptive_radius(const PointSet& unassigned, PointId seed, const SnnParams& params)
{
    params.validate();
    unassigned.position(seed);
    if (unassigned.size() < 2) {
        return std::nullopt;
    }
    const auto index = build_index(unassigned, IndexBackend::kd_tree());
    SnnContext ctx(*index, params.tk);
    return ctx.adaptive_radius(seed, params);
}

}  // namespace tnstream
