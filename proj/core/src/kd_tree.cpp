#include <algorithm>
#include <limits>
#include <numeric>

#include "index_backends.hpp"

namespace tnstream::detail {

namespace {
constexpr std::uint32_t leaf_size = 12;
}

KdTreeIndex::KdTreeIndex(PointSet points) : SpatialIndex(std::move(points))
{
    perm_.resize(points_.size());
    std::iota(perm_.begin(), perm_.end(), 0U);
    nodes_.reserve(2 * points_.size() / leaf_size + 1);
    build(0, static_cast<std::uint32_t>(perm_.size()));
}

std::int32_t KdTreeIndex::build(std::uint32_t begin, std::uint32_t end)
{
    const std::size_t dim = points_.dim();
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    bounds_.resize(bounds_.size() + 2 * dim);

    double* lo = bounds_.data() + static_cast<std::size_t>(index) * 2 * dim;
    double* hi = lo + dim;
    std::fill(lo, lo + dim, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim, -std::numeric_limits<double>::infinity());
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto x = points_.coords(perm_[i]);
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], x[d]);
            hi[d] = std::max(hi[d], x[d]);
        }
    }
    if (end - begin <= leaf_size) {
        return index;
    }

    std::size_t split_dim = 0;
    double widest = -1.0;
    for (std::size_t d = 0; d < dim; ++d) {
        if (hi[d] - lo[d] > widest) {
            widest = hi[d] - lo[d];
            split_dim = d;
        }
    }
    if (widest <= 0.0) {
        return index;  // all points identical
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double xa = points_.coords(a)[split_dim];
                         const double xb = points_.coords(b)[split_dim];
                         return xa < xb || (xa == xb && a < b);
                     });

    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

double KdTreeIndex::box_lower_bound(std::size_t node, std::span<const double> q) const noexcept
{
    const std::size_t dim = points_.dim();
    const double* lo = bounds_.data() + node * 2 * dim;
    const double* hi = lo + dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double gap = 0.0;
        if (q[d] < lo[d]) {
            gap = lo[d] - q[d];
        } else if (q[d] > hi[d]) {
            gap = q[d] - hi[d];
        }
        s += gap * gap;
    }
    return s;
}

void KdTreeIndex::knn_visit(std::size_t node, std::span<const double> q, std::size_t exclude_pos, TopK& top) const
{
    const Node& n = nodes_[node];
    if (n.left < 0) {
        for (std::uint32_t i = n.begin; i < n.end; ++i) {
            const std::size_t pos = perm_[i];
            if (pos == exclude_pos) {
                continue;
            }
            top.offer({squared_distance(q, points_.coords(pos)), points_.id(pos), pos});
        }
        return;
    }
    const auto l = static_cast<std::size_t>(n.left);
    const auto r = static_cast<std::size_t>(n.right);
    const double lb_l = box_lower_bound(l, q);
    const double lb_r = box_lower_bound(r, q);
    const bool left_first = lb_l <= lb_r;
    const std::size_t first = left_first ? l : r;
    const std::size_t second = left_first ? r : l;
    const double lb_first = left_first ? lb_l : lb_r;
    const double lb_second = left_first ? lb_r : lb_l;
    if (!top.can_prune(lb_first)) {
        knn_visit(first, q, exclude_pos, top);
    }
    if (!top.can_prune(lb_second)) {
        knn_visit(second, q, exclude_pos, top);
    }
}

void KdTreeIndex::knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                           std::vector<Candidate>& out) const
{
    TopK top(k, out);
    knn_visit(0, query, exclude_pos, top);
}

void KdTreeIndex::range_visit(std::size_t node, std::span<const double> q, double r,
                              std::vector<std::size_t>& out) const
{
    if (!within_radius(box_lower_bound(node, q), r)) {
        return;
    }
    const Node& n = nodes_[node];
    if (n.left < 0) {
        for (std::uint32_t i = n.begin; i < n.end; ++i) {
            const std::size_t pos = perm_[i];
            if (within_radius(squared_distance(q, points_.coords(pos)), r)) {
                out.push_back(pos);
            }
        }
        return;
    }
    range_visit(static_cast<std::size_t>(n.left), q, r, out);
    range_visit(static_cast<std::size_t>(n.right), q, r, out);
}

void KdTreeIndex::range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const
{
    range_visit(0, center, r, out);
}

std::unique_ptr<SpatialIndex> KdTreeIndex::rebuilt(PointSet points) const
{
    return std::make_unique<KdTreeIndex>(std::move(points));
}

}  // namespace tnstream::detail
