#include "tnstream/snapshot_io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "tnstream/error.hpp"

namespace tnstream {

using nlohmann::json;

std::string snapshot_to_json(const StreamSnapshot& snap)
{
    json points = json::array();
    for (const auto& p : snap.points) {
        points.push_back({{"id", p.id}, {"mc", p.mc}, {"macro", p.macro}});
    }
    json mcs = json::array();
    for (const auto& mc : snap.mcs) {
        mcs.push_back({{"id", mc.id},
                       {"center", mc.center},
                       {"r", mc.radius},
                       {"count", mc.count},
                       {"macro", mc.macro.value_or(0)}});
    }
    json macros = json::array();
    for (const auto& m : snap.macros) {
        macros.push_back({{"id", m.id}, {"mcs", m.mcs}});
    }
    const json doc = {{"schema", snapshot_schema_version},
                      {"step", snap.step},
                      {"points", std::move(points)},
                      {"mcs", std::move(mcs)},
                      {"macros", std::move(macros)}};
    return doc.dump();
}

StreamSnapshot snapshot_from_json(std::string_view line)
{
    try {
        const json doc = json::parse(line);
        if (doc.at("schema").get<int>() != snapshot_schema_version) {
            throw Error(Errc::ParseError, "unsupported snapshot schema " + doc.at("schema").dump());
        }
        StreamSnapshot snap;
        snap.step = doc.at("step").get<std::uint64_t>();
        for (const auto& p : doc.at("points")) {
            snap.points.push_back({p.at("id").get<PointId>(), p.at("mc").get<McId>(), p.at("macro").get<MacroId>()});
        }
        for (const auto& m : doc.at("mcs")) {
            MicroCluster mc;
            mc.id = m.at("id").get<McId>();
            mc.center = m.at("center").get<std::vector<double>>();
            mc.radius = m.at("r").get<double>();
            mc.count = m.at("count").get<std::size_t>();
            if (const auto macro = m.at("macro").get<MacroId>(); macro != 0) {
                mc.macro = macro;
            }
            snap.mcs.push_back(std::move(mc));
        }
        for (const auto& m : doc.at("macros")) {
            snap.macros.push_back({m.at("id").get<MacroId>(), m.at("mcs").get<std::vector<McId>>()});
        }
        return snap;
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("snapshot: ") + e.what());
    }
}

void write_snapshots(std::ostream& out, const std::vector<StreamSnapshot>& snaps)
{
    for (const auto& s : snaps) {
        out << snapshot_to_json(s) << '\n';
    }
}

std::vector<StreamSnapshot> read_snapshots(std::istream& in)
{
    std::vector<StreamSnapshot> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            out.push_back(snapshot_from_json(line));
        }
    }
    return out;
}

}  // namespace tnstream
