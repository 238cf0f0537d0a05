#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace tnstream {

using PointId = std::uint64_t;

/// An ordered collection of fixed-dimension points with unique ids.
///
/// Coordinates are stored row-major in one contiguous buffer. Insertion
/// order is preserved and is the "position" used by the index structures.
class PointSet {
public:
    explicit PointSet(std::size_t dim);

    /// Rows become ids 0..n-1. All rows must share the same arity.
    static PointSet from_rows(const std::vector<std::vector<double>>& rows);

    void add(PointId id, std::span<const double> coords);
    void reserve(std::size_t n);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    PointId id(std::size_t pos) const { return ids_[pos]; }
    std::span<const PointId> ids() const noexcept { return ids_; }
    std::span<const double> coords(std::size_t pos) const
    {
        return {data_.data() + pos * dim_, dim_};
    }

    bool contains(PointId id) const { return pos_.count(id) != 0; }
    /// Throws Errc::UnknownId.
    std::size_t position(PointId id) const;
    std::span<const double> coords_of(PointId id) const { return coords(position(id)); }

private:
    std::size_t dim_;
    std::vector<PointId> ids_;
    std::vector<double> data_;
    std::unordered_map<PointId, std::size_t> pos_;
};

// Summation runs over dimensions in index order; every exact comparison in
// the library (and the brute-force oracles in tests) relies on this order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept;

/// The closed-ball predicate ‖a − b‖ ≤ r used by range search and all radius gates.
inline bool within_radius(double squared_dist, double r) noexcept { return squared_dist <= r * r; }

}  // namespace tnstream
