#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "errc.hpp"
#include "tnstream/dataset_io.hpp"
#include "tnstream/harness.hpp"
#include "tnstream/snapshot_io.hpp"
#include "tnstream/synthetic.hpp"

using namespace tnstream;

namespace {

StreamConfig blob_config(std::size_t window)
{
    StreamConfig c;
    c.window = window;
    c.min_pts = 3;
    c.n_micro = 3;
    c.r_max = 0.03;
    c.k = 4;
    c.tk = 5;
    c.mk = 3;
    return c;
}

LabeledData blobs(std::size_t n, std::uint64_t seed)
{
    auto d = generate_synthetic(BlobsSpec{2, n, 2, 0.3, 10.0}, seed);
    d.points = normalize_minmax(d.points);
    return d;
}

std::string serialize(const std::vector<StreamSnapshot>& snaps)
{
    std::ostringstream out;
    write_snapshots(out, snaps);
    return out.str();
}

}  // namespace

TEST(SnapshotIo, RoundTrip)
{
    const auto r = replay_stream(blobs(400, 1), blob_config(200));
    ASSERT_FALSE(r.snapshots.empty());
    const auto& last = r.snapshots.back();
    ASSERT_FALSE(last.mcs.empty());
    EXPECT_EQ(snapshot_from_json(snapshot_to_json(last)), last);

    std::stringstream io;
    write_snapshots(io, r.snapshots);
    io << "\n";
    EXPECT_EQ(read_snapshots(io), r.snapshots);
}

TEST(SnapshotIo, Format)
{
    StreamSnapshot s;
    s.step = 7;
    s.points = {{3, 1, 0}, {4, 0, 0}};
    s.mcs = {MicroCluster{1, {0.5, 0.25}, 0.1, 1, std::nullopt}};
    const std::string line = snapshot_to_json(s);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["schema"], snapshot_schema_version);
    EXPECT_EQ(j["step"], 7);
    EXPECT_EQ(j["points"][0]["mc"], 1);
    EXPECT_EQ(j["mcs"][0]["macro"], 0);
    EXPECT_EQ(j["mcs"][0]["r"], 0.1);
    EXPECT_TRUE(j["macros"].is_array());
}

TEST(SnapshotIo, ParseErrors)
{
    EXPECT_ERRC(snapshot_from_json("not json"), ParseError);
    EXPECT_ERRC(snapshot_from_json("{\"schema\":1}"), ParseError);
    EXPECT_ERRC(snapshot_from_json("{\"schema\":99,\"step\":0,\"points\":[],\"mcs\":[],\"macros\":[]}"), ParseError);
    std::istringstream in("{\"schema\":1,\"step\":0,\"points\":[],\"mcs\":[],\"macros\":[]}\n[1,2]\n");
    EXPECT_ERRC(read_snapshots(in), ParseError);
}

TEST(Replay, PeriodicSnapshots)
{
    const auto data = blobs(2000, 3);
    const auto r = replay_stream(data, blob_config(100));
    EXPECT_EQ(r.snapshot_count, 20u);
    ASSERT_EQ(r.snapshots.size(), 20u);
    EXPECT_EQ(r.snapshots.front().step, 99u);
    EXPECT_EQ(r.snapshots.back().step, 1999u);
    EXPECT_EQ(r.truth.size(), 100u);  // final window
    EXPECT_EQ(r.n_macro, r.snapshots.back().macros.size());
}

TEST(Replay, EmptyStream)
{
    const LabeledData empty{PointSet(2), {}};
    const auto r = replay_stream(empty, blob_config(100));
    EXPECT_EQ(r.snapshot_count, 0u);
    EXPECT_ERRC(r.scores(), Empty);
}

TEST(Replay, DeterministicOutput)
{
    const auto data = blobs(600, 5);
    const auto a = replay_stream(data, blob_config(150));
    const auto b = replay_stream(data, blob_config(150));
    EXPECT_EQ(serialize(a.snapshots), serialize(b.snapshots));
    EXPECT_EQ(a.predicted, b.predicted);
}

TEST(Replay, CallbackAndCumulative)
{
    const auto data = blobs(500, 6);
    std::size_t seen = 0;
    ReplayOptions opts;
    opts.window = ScoreWindow::Cumulative;
    opts.keep_snapshots = false;
    opts.on_snapshot = [&](const StreamSnapshot&) { ++seen; };
    const auto r = replay_stream(data, blob_config(100), opts);
    EXPECT_EQ(seen, 5u);
    EXPECT_TRUE(r.snapshots.empty());
    EXPECT_EQ(r.truth.size(), 500u);
    EXPECT_EQ(r.truth, data.labels);
    EXPECT_GE(r.scores().purity, 0.0);
}

TEST(Replay, LabelMismatch)
{
    StreamEngine e(blob_config(100));
    const auto ps = PointSet::from_rows({{0.0, 0.0}, {1.0, 1.0}});
    const std::vector<long> labels{1};
    EXPECT_ERRC(replay_stream(ps, labels, e), LengthMismatch);
}

TEST(Benchmark, RowsAndFailures)
{
    EXPECT_TRUE(run_benchmark({}).empty());

    std::vector<BenchmarkCase> cases;
    cases.push_back({"blobs", [] { return blobs(300, 2); }, blob_config(300)});
    cases.push_back({"broken", []() -> LabeledData { throw std::runtime_error("no such file"); }, blob_config(300)});
    auto lsh = blob_config(300);
    lsh.backend = IndexBackend::lsh(8, 4, 1);
    cases.push_back({"blobs", [] { return blobs(300, 2); }, lsh});
    const auto rows = run_benchmark(cases);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].ok());
    EXPECT_FALSE(rows[1].ok());
    EXPECT_TRUE(rows[2].ok());
    EXPECT_EQ(rows[2].backend, "lsh");
    EXPECT_GE(rows[0].scores.ari, 0.9);
    EXPECT_EQ(rows[0].n_macro, 2u);

    std::ostringstream jsonl;
    write_scorecard_jsonl(jsonl, rows);
    std::istringstream in(jsonl.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        for (const char* key : {"dataset", "backend", "purity", "ari", "nmi", "wall_ms", "n_mc", "n_macro", "params"}) {
            EXPECT_TRUE(j.contains(key)) << key;
        }
        EXPECT_EQ(j.contains("error"), n == 1);
        ++n;
    }
    EXPECT_EQ(n, 3u);
    EXPECT_EQ(nlohmann::json::parse(score_row_to_json(rows[2]))["params"]["num_tables"], 4);

    std::ostringstream table;
    write_scorecard_table(table, rows);
    EXPECT_NE(table.str().find("FAILED: no such file"), std::string::npos);
}
