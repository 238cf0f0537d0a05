#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tnstream/spatial_index.hpp"

namespace tnstream::detail {

using Candidate = SpatialIndex::Candidate;

inline bool candidate_less(const Candidate& a, const Candidate& b) noexcept
{
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
}

// Bounded max-heap keeping the k best candidates by (d2, id).
class TopK {
public:
    TopK(std::size_t k, std::vector<Candidate>& heap) : k_(k), heap_(heap) { heap_.clear(); }

    bool full() const noexcept { return heap_.size() >= k_; }
    double worst_d2() const noexcept { return heap_.front().d2; }

    // Subtrees whose lower bound exceeds the current worst cannot contribute;
    // equality must still be explored because a smaller id may tie.
    bool can_prune(double lower_bound_d2) const noexcept { return full() && lower_bound_d2 > worst_d2(); }

    void offer(const Candidate& c)
    {
        if (k_ == 0) {
            return;
        }
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end(), candidate_less);
        } else if (candidate_less(c, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), candidate_less);
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end(), candidate_less);
        }
    }

private:
    std::size_t k_;
    std::vector<Candidate>& heap_;
};

class KdTreeIndex final : public SpatialIndex {
public:
    explicit KdTreeIndex(PointSet points);
    BackendKind kind() const noexcept override { return BackendKind::KdTree; }

protected:
    void knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                  std::vector<Candidate>& out) const override;
    void range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const override;
    std::unique_ptr<SpatialIndex> rebuilt(PointSet points) const override;

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    double box_lower_bound(std::size_t node, std::span<const double> q) const noexcept;
    void knn_visit(std::size_t node, std::span<const double> q, std::size_t exclude_pos, TopK& top) const;
    void range_visit(std::size_t node, std::span<const double> q, double r, std::vector<std::size_t>& out) const;

    std::vector<std::uint32_t> perm_;
    std::vector<Node> nodes_;
    std::vector<double> bounds_;  // per node: lo[dim], hi[dim]
};

class BallTreeIndex final : public SpatialIndex {
public:
    explicit BallTreeIndex(PointSet points);
    BackendKind kind() const noexcept override { return BackendKind::BallTree; }

protected:
    void knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                  std::vector<Candidate>& out) const override;
    void range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const override;
    std::unique_ptr<SpatialIndex> rebuilt(PointSet points) const override;

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left = -1;
        std::int32_t right = -1;
        double radius = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    std::span<const double> center(std::size_t node) const
    {
        return {centers_.data() + node * points_.dim(), points_.dim()};
    }
    void knn_visit(std::size_t node, std::span<const double> q, std::size_t exclude_pos, TopK& top) const;
    void range_visit(std::size_t node, std::span<const double> q, double r, std::vector<std::size_t>& out) const;

    std::vector<std::uint32_t> perm_;
    std::vector<Node> nodes_;
    std::vector<double> centers_;
};

class LshIndex final : public SpatialIndex {
public:
    LshIndex(PointSet points, const LshParams& params);
    // Reuses the hash functions of `hashing`.
    LshIndex(PointSet points, const LshIndex& hashing);
    BackendKind kind() const noexcept override { return BackendKind::Lsh; }

protected:
    void knn_impl(std::span<const double> query, std::size_t k, std::size_t exclude_pos,
                  std::vector<Candidate>& out) const override;
    void range_impl(std::span<const double> center, double r, std::vector<std::size_t>& out) const override;
    std::unique_ptr<SpatialIndex> rebuilt(PointSet points) const override;

private:
    void fill_buckets();
    std::uint64_t table_key(std::size_t table, std::span<const double> centered) const;
    // Positions colliding with the query in at least one table, deduplicated.
    void candidates(std::span<const double> query, std::size_t query_pos, std::vector<std::uint32_t>& out) const;

    LshParams params_;
    std::vector<double> offset_;  // hashing is done on mean-centered coordinates
    std::vector<double> bias_;    // [table * num_hyperplanes + j]
    std::vector<HyperplaneSet> tables_;
    std::vector<std::uint64_t> point_keys_;  // [pos * num_tables + table]
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> buckets_;
};

}  // namespace tnstream::detail
