#include "mlct/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mlct {

// ---------------------------------------------------------------------------
// Lineage tables

std::vector<LineageTableRow> read_lineage_table(std::istream& in) {
    std::vector<LineageTableRow> rows;
    std::unordered_map<int64_t, std::size_t> by_id;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        std::istringstream ls(line);
        LineageTableRow r;
        std::string extra;
        if (!(ls >> r.track_id >> r.begin >> r.end >> r.parent) || (ls >> extra))
            throw FormatError("line " + std::to_string(lineno) +
                              ": expected four whitespace-separated integers");
        if (r.track_id < 1 || r.begin < 0 || r.end < 0 || r.parent < 0)
            throw FormatError("line " + std::to_string(lineno) + ": negative or zero field");
        if (r.begin > r.end)
            throw FormatError("line " + std::to_string(lineno) + ": begin frame " +
                              std::to_string(r.begin) + " exceeds end frame " +
                              std::to_string(r.end));
        if (!by_id.emplace(r.track_id, rows.size()).second)
            throw ConsistencyError("line " + std::to_string(lineno) + ": duplicate track id " +
                                   std::to_string(r.track_id));
        rows.push_back(r);
    }
    for (const LineageTableRow& r : rows) {
        if (r.parent == 0)
            continue;
        auto it = by_id.find(r.parent);
        if (it == by_id.end())
            throw ConsistencyError("track " + std::to_string(r.track_id) +
                                   " references unknown parent " + std::to_string(r.parent));
        if (rows[it->second].end >= r.begin)
            throw ConsistencyError("track " + std::to_string(r.track_id) + " begins at frame " +
                                   std::to_string(r.begin) + " but parent " +
                                   std::to_string(r.parent) + " ends at frame " +
                                   std::to_string(rows[it->second].end));
    }
    return rows;
}

std::vector<LineageTableRow> tracks_to_rows(const std::vector<Track>& tracks) {
    std::vector<LineageTableRow> rows;
    rows.reserve(tracks.size());
    for (const Track& t : tracks)
        rows.push_back({t.id, t.begin_frame, t.end_frame, t.parent_track});
    return rows;
}

void write_lineage_table(const std::vector<LineageTableRow>& rows, std::ostream& out) {
    for (const LineageTableRow& r : rows)
        out << r.track_id << ' ' << r.begin << ' ' << r.end << ' ' << r.parent << '\n';
}

void write_lineage_table(const LineageGraph& graph, std::ostream& out) {
    const std::vector<Track> tracks = build_tracks(graph);
    std::unordered_set<int64_t> seen;
    std::vector<LineageTableRow> rows;
    rows.reserve(tracks.size());
    for (const Track& t : tracks) {
        const int32_t label = t.members.front().label;
        for (NodeKey m : t.members)
            if (m.label != label)
                throw ConsistencyError("track starting at " + t.members.front().str() +
                                       " changes label at " + m.str() +
                                       "; relabel_tracks first");
        if (!seen.insert(label).second)
            throw ConsistencyError("two tracks share label " + std::to_string(label) +
                                   "; relabel_tracks first");
        const int64_t parent_label =
            t.parent_track == 0 ? 0 : tracks[t.parent_track - 1].members.front().label;
        rows.push_back({label, t.begin_frame, t.end_frame, parent_label});
    }
    write_lineage_table(rows, out);
}

Dataset relabel_tracks(const SegmentationSequence& seq, const LineageGraph& graph) {
    const std::vector<Track> tracks = build_tracks(graph);
    if (tracks.size() > 65535)
        throw InputError("more than 65535 tracks cannot be written as 16-bit masks");

    std::unordered_map<uint64_t, int32_t> new_label;  // node -> track id
    for (const Track& t : tracks)
        for (NodeKey m : t.members)
            new_label.emplace(m.packed(), t.id);

    Dataset out;
    out.seq.frame_interval_minutes = seq.frame_interval_minutes;
    for (const LabelFrame& f : seq.frames) {
        if (f.detections().size() != graph.labels_at(f.index()).size())
            throw ConsistencyError("frame " + std::to_string(f.index()) +
                                   ": detections and graph nodes differ");
        std::vector<uint16_t> raster(static_cast<std::size_t>(f.width()) * f.height(), 0);
        for (const Detection& d : f.detections()) {
            auto it = new_label.find(d.key().packed());
            if (it == new_label.end())
                throw ConsistencyError("detection " + d.key().str() + " is not a graph node");
            for (const PixelRun& r : d.runs) {
                uint16_t* row = raster.data() + static_cast<std::size_t>(r.y) * f.width();
                std::fill(row + r.x_begin, row + r.x_end, static_cast<uint16_t>(it->second));
            }
        }
        out.seq.frames.push_back(
            LabelFrame::from_raster(f.index(), f.width(), f.height(), raster));
    }
    for (const Track& t : tracks) {
        for (std::size_t i = 0; i < t.members.size(); ++i) {
            out.graph.add_node({t.members[i].frame, t.id});
            if (i > 0)
                out.graph.add_edge({t.members[i - 1].frame, t.id}, {t.members[i].frame, t.id});
        }
        if (t.parent_track != 0) {
            const Track& p = tracks[t.parent_track - 1];
            out.graph.add_edge({p.members.back().frame, p.id}, {t.members.front().frame, t.id});
        }
    }
    out.graph.finalize();
    return out;
}

// ---------------------------------------------------------------------------
// 16-bit PGM

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c))
            continue;
        break;
    }
    if (c == EOF)
        throw FormatError("unexpected end of PGM header");
    do {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    } while (c != EOF && !std::isspace(c) && c != '#');
    if (c == '#')
        in.unget();
    return tok;
}

int64_t pgm_int(std::istream& in, const char* what) {
    std::string tok = pgm_token(in);
    try {
        std::size_t pos = 0;
        int64_t v = std::stoll(tok, &pos);
        if (pos != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("bad PGM ") + what + ": '" + tok + "'");
    }
}

} // namespace

LabelFrame read_label_frame(std::istream& in, int32_t frame_index) {
    if (pgm_token(in) != "P5")
        throw FormatError("not a binary PGM (magic is not P5)");
    int64_t w = pgm_int(in, "width");
    int64_t h = pgm_int(in, "height");
    int64_t maxval = pgm_int(in, "maxval");
    if (w < 1 || h < 1)
        throw FormatError("non-positive PGM dimensions");
    if (maxval != 65535)
        throw FormatError("label masks require maxval 65535, got " + std::to_string(maxval));
    // the token reader consumed the single whitespace after maxval; the
    // raster follows immediately

    std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<char> raw(n * 2);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError("truncated PGM raster: expected " + std::to_string(raw.size()) +
                          " bytes, got " + std::to_string(in.gcount()));

    std::vector<uint16_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        uint16_t hi = static_cast<uint8_t>(raw[2 * i]);
        uint16_t lo = static_cast<uint8_t>(raw[2 * i + 1]);
        labels[i] = static_cast<uint16_t>((hi << 8) | lo);
    }
    return LabelFrame::from_raster(frame_index, static_cast<int32_t>(w),
                                   static_cast<int32_t>(h), labels);
}

void write_label_frame(const LabelFrame& frame, std::ostream& out) {
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n65535\n";
    std::vector<uint16_t> labels = frame.rasterize();
    std::vector<char> raw(labels.size() * 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        raw[2 * i] = static_cast<char>(labels[i] >> 8);
        raw[2 * i + 1] = static_cast<char>(labels[i] & 0xff);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

// ---------------------------------------------------------------------------
// Graph assembly

LineageGraph assemble_graph(const std::vector<LineageTableRow>& rows,
                            const SegmentationSequence& seq) {
    LineageGraph g;
    const int64_t nframes = static_cast<int64_t>(seq.frames.size());
    for (const LineageTableRow& r : rows) {
        if (r.end >= nframes)
            throw ConsistencyError("track " + std::to_string(r.track_id) + " ends at frame " +
                                   std::to_string(r.end) + " but the sequence has " +
                                   std::to_string(nframes) + " frames");
        for (int64_t f = r.begin; f <= r.end; ++f) {
            if (!seq.frames[f].find(static_cast<int32_t>(r.track_id)))
                throw ConsistencyError("no region labeled " + std::to_string(r.track_id) +
                                       " in frame " + std::to_string(f));
            g.add_node({static_cast<int32_t>(f), static_cast<int32_t>(r.track_id)});
            if (f > r.begin)
                g.add_edge({static_cast<int32_t>(f - 1), static_cast<int32_t>(r.track_id)},
                           {static_cast<int32_t>(f), static_cast<int32_t>(r.track_id)});
        }
    }
    std::unordered_map<int64_t, const LineageTableRow*> by_id;
    for (const LineageTableRow& r : rows)
        by_id.emplace(r.track_id, &r);
    for (const LineageTableRow& r : rows) {
        if (r.parent == 0)
            continue;
        auto it = by_id.find(r.parent);
        if (it == by_id.end())
            throw ConsistencyError("track " + std::to_string(r.track_id) +
                                   " references unknown parent " + std::to_string(r.parent));
        const LineageTableRow& p = *it->second;
        g.add_edge({static_cast<int32_t>(p.end), static_cast<int32_t>(p.track_id)},
                   {static_cast<int32_t>(r.begin), static_cast<int32_t>(r.track_id)});
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// Dataset directories

std::string mask_filename(const DatasetLayout& layout, int32_t index) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), layout.mask_pattern.c_str(), index);
    return buf;
}

SegmentationSequence load_sequence(const std::filesystem::path& dir,
                                   const DatasetLayout& layout) {
    SegmentationSequence seq;
    for (int32_t i = 0;; ++i) {
        std::filesystem::path p = dir / mask_filename(layout, i);
        std::ifstream in(p, std::ios::binary);
        if (!in)
            break;
        seq.frames.push_back(read_label_frame(in, i));
    }
    if (seq.frames.empty())
        throw InputError("no mask frames found in " + dir.string() + " (pattern " +
                         layout.mask_pattern + ")");
    return seq;
}

Dataset load_dataset(const std::filesystem::path& dir, const DatasetLayout& layout) {
    Dataset d;
    d.seq = load_sequence(dir, layout);
    std::filesystem::path table = dir / layout.table_name;
    std::ifstream in(table);
    if (!in)
        throw InputError("missing lineage table " + table.string());
    d.graph = assemble_graph(read_lineage_table(in), d.seq);
    return d;
}

void save_dataset(const std::filesystem::path& dir, const SegmentationSequence& seq,
                  const LineageGraph& graph, const DatasetLayout& layout) {
    std::filesystem::create_directories(dir);
    for (const LabelFrame& f : seq.frames) {
        std::ostringstream os(std::ios::binary);
        write_label_frame(f, os);
        write_file_atomic(dir / mask_filename(layout, f.index()), os.str());
    }
    std::ostringstream ts;
    write_lineage_table(graph, ts);
    write_file_atomic(dir / layout.table_name, ts.str());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace mlct
