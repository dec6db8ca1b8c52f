#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mlct/lineage.hpp"

namespace mlct {

// One record of the lineage table: track id L, begin frame B, end frame E,
// parent track P (0 = none).
struct LineageTableRow {
    int64_t track_id = 0;
    int64_t begin = 0;
    int64_t end = 0;
    int64_t parent = 0;
    friend bool operator==(const LineageTableRow&, const LineageTableRow&) = default;
};

// Parses "L B E P" lines. Rows come back in file order; B <= E, duplicate ids
// and dangling or forward parent references are rejected.
std::vector<LineageTableRow> read_lineage_table(std::istream& in);

std::vector<LineageTableRow> tracks_to_rows(const std::vector<Track>& tracks);
void write_lineage_table(const std::vector<LineageTableRow>& rows, std::ostream& out);

// Emits one row per track using the members' mask label as the track id, the
// convention the mask files share. Requires canonical labeling: every track
// carries one constant label, unique across tracks (relabel_tracks produces
// this form).
void write_lineage_table(const LineageGraph& graph, std::ostream& out);

// 16-bit binary portable graymap: magic P5, maxval 65535, big-endian samples.
LabelFrame read_label_frame(std::istream& in, int32_t frame_index = 0);
void write_label_frame(const LabelFrame& frame, std::ostream& out);

// Realizes the lineage graph from a table + mask pair: consecutive-frame edges
// within each track, one mother-to-daughter edge per parent link.
LineageGraph assemble_graph(const std::vector<LineageTableRow>& rows,
                            const SegmentationSequence& seq);

// On-disk dataset layout. The archive layout is configurable rather than
// hardcoded; these defaults are what every tool in this project writes.
struct DatasetLayout {
    std::string table_name = "track.txt";
    std::string mask_pattern = "mask%04d.pgm";  // printf-style, sampled frame index
};

struct Dataset {
    SegmentationSequence seq;
    LineageGraph graph;
};

// Rewrites mask labels to track ids so the pair can be written in the table
// format. Region shapes are untouched; the returned graph is isomorphic to
// the input. Every detection must be a graph node and vice versa.
Dataset relabel_tracks(const SegmentationSequence& seq, const LineageGraph& graph);

std::string mask_filename(const DatasetLayout& layout, int32_t index);

Dataset load_dataset(const std::filesystem::path& dir, const DatasetLayout& layout = {});
SegmentationSequence load_sequence(const std::filesystem::path& dir,
                                   const DatasetLayout& layout = {});
void save_dataset(const std::filesystem::path& dir, const SegmentationSequence& seq,
                  const LineageGraph& graph, const DatasetLayout& layout = {});

// Writes to a temp file in the target directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace mlct
