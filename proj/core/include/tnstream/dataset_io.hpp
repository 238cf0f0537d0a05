#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tnstream/point_set.hpp"

namespace tnstream {

/// Points with one ground-truth label per point (aligned with point order);
/// `labels` is empty for unlabeled data.
struct LabeledData {
    PointSet points{1};
    std::vector<long> labels;
};

/// Rows of comma-separated reals, optionally followed by an integer label.
/// A first row that does not parse as numbers is taken as a header. Ids
/// follow row order starting at 0. Row numbers in errors are 1-based file
/// lines. Throws Errc::Io, Errc::ParseError, Errc::ArityMismatch.
LabeledData load_csv(const std::filesystem::path& path, bool has_labels, bool normalize);
LabeledData read_csv(std::istream& in, bool has_labels, bool normalize);

/// Writes rows as CSV (labels appended when present) with full precision.
void write_csv(std::ostream& out, const LabeledData& data);

/// Per-feature min–max scaling to [0, 1]; a constant feature maps to 0.
void normalize_minmax(std::vector<std::vector<double>>& rows);
/// Same ids and order, coordinates min–max scaled per feature.
PointSet normalize_minmax(const PointSet& ps);

}  // namespace tnstream
