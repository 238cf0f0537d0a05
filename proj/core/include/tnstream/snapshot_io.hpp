#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tnstream/stream_engine.hpp"

namespace tnstream {

inline constexpr int snapshot_schema_version = 1;

/// One JSON object on a single line:
/// {"schema":1,"step":..,"points":[{"id","mc","macro"}],
///  "mcs":[{"id","center","r","count","macro"}],"macros":[{"id","mcs"}]}
/// A missing micro-/macro-cluster is written as 0.
std::string snapshot_to_json(const StreamSnapshot& snap);

/// Throws Errc::ParseError.
StreamSnapshot snapshot_from_json(std::string_view line);

void write_snapshots(std::ostream& out, const std::vector<StreamSnapshot>& snaps);
/// Blank lines are skipped. Throws Errc::ParseError.
std::vector<StreamSnapshot> read_snapshots(std::istream& in);

}  // namespace tnstream
