#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "index_backends.hpp"

namespace tnstream::detail {

namespace {

constexpr std::uint32_t leaf_size = 12;

// Triangle-inequality bounds are computed in floating point; the relative
// slack keeps a point sitting exactly on a ball boundary from being pruned.
constexpr double bound_slack = 1e-9;

bool ball_excluded(double dist_to_center, double radius, double threshold) noexcept
{
    const double gap = dist_to_center - radius;
    return gap > threshold + bound_slack * (dist_to_center + radius + threshold);
}

}  // namespace

BallTreeIndex::BallTreeIndex(PointSet points) : SpatialIndex(std::move(points))
{
    perm_.resize(points_.size());
    std::iota(perm_.begin(), perm_.end(), 0U);
    nodes_.reserve(2 * points_.size() / leaf_size + 1);
    build(0, static_cast<std::uint32_t>(perm_.size()));
}

std::int32_t BallTreeIndex::build(std::uint32_t begin, std::uint32_t end)
{
    const std::size_t dim = points_.dim();
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    centers_.resize(centers_.size() + dim, 0.0);

    double* c = centers_.data() + static_cast<std::size_t>(index) * dim;
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto x = points_.coords(perm_[i]);
        for (std::size_t d = 0; d < dim; ++d) {
            c[d] += x[d];
        }
    }
    const double count = static_cast<double>(end - begin);
    for (std::size_t d = 0; d < dim; ++d) {
        c[d] /= count;
    }

    double radius = 0.0;
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto x = points_.coords(perm_[i]);
        radius = std::max(radius, distance({c, dim}, x));
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], x[d]);
            hi[d] = std::max(hi[d], x[d]);
        }
    }
    nodes_[static_cast<std::size_t>(index)].radius = radius;
    if (end - begin <= leaf_size || radius == 0.0) {
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

void BallTreeIndex::knn_visit(std::size_t node, std::span<const double> q, std::size_t exclude_pos,
                              TopK& top) const
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
    const double dl = distance(q, center(l));
    const double dr = distance(q, center(r));
    const double gl = dl - nodes_[l].radius;
    const double gr = dr - nodes_[r].radius;
    const bool left_first = gl <= gr;

    auto visit = [&](std::size_t child, double dist) {
        if (top.full() && ball_excluded(dist, nodes_[child].radius, std::sqrt(top.worst_d2()))) {
            return;
        }
        knn_visit(child, q, exclude_pos, top);
    };
    if (left_first) {
        visit(l, dl);
        visit(r, dr);
    } else {
        visit(r, dr);
        visit(l, dl);
    }
}

void BallTreeIndex::knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                             std::vector<Candidate>& out) const
{
    TopK top(k, out);
    knn_visit(0, query, exclude_pos, top);
}

void BallTreeIndex::range_visit(std::size_t node, std::span<const double> q, double r,
                                std::vector<std::size_t>& out) const
{
    const Node& n = nodes_[node];
    if (ball_excluded(distance(q, center(node)), n.radius, r)) {
        return;
    }
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

void BallTreeIndex::range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const
{
    range_visit(0, center, r, out);
}

std::unique_ptr<SpatialIndex> BallTreeIndex::rebuilt(PointSet points) const
{
    return std::make_unique<BallTreeIndex>(std::move(points));
}

}  // namespace tnstream::detail
