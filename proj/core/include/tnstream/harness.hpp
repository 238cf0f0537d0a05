#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnstream/dataset_io.hpp"
#include "tnstream/metrics.hpp"
#include "tnstream/stream_engine.hpp"

namespace tnstream {

/// Which points the scores are computed on.
enum class ScoreWindow {
    Final,       // the live window after the last arrival
    Cumulative,  // every point, labeled by its macro just before it left the window
};

struct ReplayOptions {
    ScoreWindow window = ScoreWindow::Final;
    /// Called for every snapshot as it is taken.
    std::function<void(const StreamSnapshot&)> on_snapshot;
    /// Keep snapshots in the result (turn off for long streams written to disk).
    bool keep_snapshots = true;
};

struct ReplayResult {
    std::vector<StreamSnapshot> snapshots;
    std::size_t snapshot_count = 0;
    std::vector<long> truth;      // scored points, ground truth
    std::vector<long> predicted;  // scored points, macro id or 0
    std::size_t n_mc = 0;         // at end of stream
    std::size_t n_macro = 0;
    double wall_ms = 0.0;

    /// Throws Errc::Empty when there is nothing to score (empty or unlabeled stream).
    Scores scores(OutlierMode mode = OutlierMode::AsCluster) const;
};

/// Feeds ps in order (id = arrival index = row), taking a snapshot after
/// every W arrivals and after the last one. `labels` is empty or aligned with ps.
/// Throws Errc::LengthMismatch; engine errors propagate.
ReplayResult replay_stream(const PointSet& ps, std::span<const long> labels, StreamEngine& engine,
                           const ReplayOptions& options = {});
ReplayResult replay_stream(const LabeledData& data, const StreamConfig& config, const ReplayOptions& options = {});

struct BenchmarkCase {
    std::string dataset;
    std::function<LabeledData()> load;
    StreamConfig config;
};

struct ScoreRow {
    std::string dataset;
    std::string backend;
    StreamConfig config;
    Scores scores;
    double wall_ms = 0.0;
    std::size_t n_mc = 0;
    std::size_t n_macro = 0;
    std::string error;  // empty on success

    bool ok() const noexcept { return error.empty(); }
};

/// One row per case; a failing case yields a row with `error` set and the
/// run continues.
std::vector<ScoreRow> run_benchmark(const std::vector<BenchmarkCase>& cases,
                                    OutlierMode mode = OutlierMode::AsCluster,
                                    ScoreWindow window = ScoreWindow::Final);

/// {"dataset","backend","purity","ari","nmi","wall_ms","n_mc","n_macro","params"[,"error"]}
std::string score_row_to_json(const ScoreRow& row);
void write_scorecard_jsonl(std::ostream& out, const std::vector<ScoreRow>& rows);
void write_scorecard_table(std::ostream& out, const std::vector<ScoreRow>& rows);

/// Every StreamConfig field (and LSH parameters when present) as a JSON object.
std::string config_to_json(const StreamConfig& config);

}  // namespace tnstream
