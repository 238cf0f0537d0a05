#include "tnstream/point_set.hpp"

#include <cmath>
#include <string>

#include "tnstream/error.hpp"

namespace tnstream {

PointSet::PointSet(std::size_t dim) : dim_(dim)
{
    if (dim == 0) {
        throw Error(Errc::DimensionMismatch, "point dimension must be at least 1");
    }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) {
        throw Error(Errc::EmptyPointSet, "no rows");
    }
    PointSet ps(rows.front().size());
    ps.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ps.add(static_cast<PointId>(i), rows[i]);
    }
    return ps;
}

void PointSet::add(PointId id, std::span<const double> coords)
{
    if (coords.size() != dim_) {
        throw Error(Errc::DimensionMismatch, "point " + std::to_string(id) + " has " +
                                                 std::to_string(coords.size()) + " coordinates, expected " +
                                                 std::to_string(dim_));
    }
    for (double c : coords) {
        if (!std::isfinite(c)) {
            throw Error(Errc::NonFiniteCoordinate, "point " + std::to_string(id));
        }
    }
    if (!pos_.emplace(id, ids_.size()).second) {
        throw Error(Errc::DuplicateId, "point id " + std::to_string(id));
    }
    ids_.push_back(id);
    data_.insert(data_.end(), coords.begin(), coords.end());
}

void PointSet::reserve(std::size_t n)
{
    ids_.reserve(n);
    data_.reserve(n * dim_);
    pos_.reserve(n);
}

std::size_t PointSet::position(PointId id) const
{
    auto it = pos_.find(id);
    if (it == pos_.end()) {
        throw Error(Errc::UnknownId, "point id " + std::to_string(id));
    }
    return it->second;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept
{
    return std::sqrt(squared_distance(a, b));
}

}  // namespace tnstream
