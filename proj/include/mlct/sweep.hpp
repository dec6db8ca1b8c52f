#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlct/aogm.hpp"
#include "mlct/events.hpp"
#include "mlct/trackers.hpp"
#include "mlct/transform.hpp"

namespace mlct {

enum class Metric { TRA, LNK, DIV, CT };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

enum class CellStatus {
    Ok,
    Undefined,  // metric has no value on this condition (e.g. no divisions)
    Empty,      // no frames survived the transform
    Failed,     // tracker or evaluation raised
};

std::string status_name(CellStatus s);

struct MetricReport {
    Metric metric = Metric::TRA;
    CellStatus status = CellStatus::Ok;
    double value = 0.0;  // meaningful only when status == Ok
    std::string reason;  // set when status != Ok
    int k = 1;
    int64_t n_max = kUnlimitedCells;
    std::optional<AogmBreakdown> aogm;
    std::optional<EventCounts> events;
    AogmWeights weights;  // recorded per report for reproducibility
};

struct SweepSpec {
    std::vector<int> sf = {1, 2, 3, 5, 10, 15, 20, 30, 40};
    std::vector<int64_t> mc = {100, 400, 700, 1000, 1300, 1600};
    std::vector<Metric> metrics = {Metric::TRA, Metric::LNK, Metric::DIV, Metric::CT};
    std::vector<double> thresholds = {0.8, 0.9};
    int frame_offset = 0;
    TruncationRule truncation = TruncationRule::Prefix;
};

struct Provenance {
    std::string tool_version;
    std::string subcommand;
    std::string tracker;
    std::string dataset_id;
    AogmWeights weights;
    TrackerConfig config;
    int frame_offset = 0;
    int jobs = 1;
};

// Complete matrix of per-condition reports, row-major over (k, n_max).
struct SweepGrid {
    SweepSpec spec;
    Provenance prov;
    std::vector<std::vector<MetricReport>> cells;  // index = ki * |mc| + mi

    const std::vector<MetricReport>& cell(std::size_t ki, std::size_t mi) const {
        return cells[ki * spec.mc.size() + mi];
    }
    const MetricReport* find(std::size_t ki, std::size_t mi, Metric m) const;
};

// Direct evaluation of a prediction against ground truth over the same masks.
std::vector<MetricReport> evaluate_graphs(const LineageGraph& gt, const LineageGraph& pred,
                                          const NodeMatching& matching,
                                          const std::vector<Metric>& metrics,
                                          const AogmWeights& weights);

// Experiment-aware metric: transform the sequence and ground truth by the
// spec, run the tracker on the transformed sequence, evaluate against the
// induced ground truth. Empty conditions and undefined metrics come back as
// marked reports, not exceptions.
std::vector<MetricReport> eatm_all(const TrackerFn& tracker, const SegmentationSequence& seq,
                                   const LineageGraph& gt, const ExperimentSpec& espec,
                                   const std::vector<Metric>& metrics,
                                   const AogmWeights& weights, const TrackerConfig& config);

MetricReport eatm(const TrackerFn& tracker, const SegmentationSequence& seq,
                  const LineageGraph& gt, const ExperimentSpec& espec, Metric metric,
                  const AogmWeights& weights, const TrackerConfig& config);

// Robustness: the fraction of (k, n_max) conditions whose report meets the
// threshold. Cells that are undefined, empty or failed count as not
// surpassing. Throws IncompleteGridError when a cell lacks the metric.
double rm(const SweepGrid& grid, Metric metric, double threshold);

// Evaluates every grid cell independently; cells are keyed by condition, so
// the aggregate is deterministic no matter how many jobs run them.
SweepGrid run_sweep(const SegmentationSequence& seq, const LineageGraph& gt,
                    const SweepSpec& spec, const Provenance& prov, int jobs = 1);

std::string grid_to_csv(const SweepGrid& grid);
// Threshold classification per cell, the data behind the contour overlays.
std::string grid_contours_csv(const SweepGrid& grid);
std::string grid_to_json(const SweepGrid& grid);
SweepGrid grid_from_json(const std::string& text);
std::string reports_to_json(const std::vector<MetricReport>& reports, const Provenance& prov);

} // namespace mlct
