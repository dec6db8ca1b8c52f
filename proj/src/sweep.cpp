#include "mlct/sweep.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "mlct/matching.hpp"

namespace mlct {

using nlohmann::json;

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::TRA: return "TRA";
        case Metric::LNK: return "LNK";
        case Metric::DIV: return "DIV";
        case Metric::CT: return "CT";
    }
    return "?";
}

Metric metric_from_name(const std::string& name) {
    if (name == "TRA" || name == "tra") return Metric::TRA;
    if (name == "LNK" || name == "lnk") return Metric::LNK;
    if (name == "DIV" || name == "div") return Metric::DIV;
    if (name == "CT" || name == "ct") return Metric::CT;
    throw InputError("unknown metric '" + name + "'");
}

std::string status_name(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::Undefined: return "undefined";
        case CellStatus::Empty: return "empty";
        case CellStatus::Failed: return "failed";
    }
    return "?";
}

const MetricReport* SweepGrid::find(std::size_t ki, std::size_t mi, Metric m) const {
    for (const MetricReport& r : cell(ki, mi))
        if (r.metric == m)
            return &r;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<MetricReport> evaluate_graphs(const LineageGraph& gt, const LineageGraph& pred,
                                          const NodeMatching& matching,
                                          const std::vector<Metric>& metrics,
                                          const AogmWeights& weights) {
    std::optional<AogmBreakdown> breakdown;
    std::vector<MetricReport> out;
    for (Metric m : metrics) {
        MetricReport r;
        r.metric = m;
        r.weights = weights;
        try {
            switch (m) {
                case Metric::TRA:
                case Metric::LNK: {
                    if (!breakdown)
                        breakdown = aogm(gt, pred, matching, weights);
                    r.aogm = breakdown;
                    r.value = m == Metric::TRA ? tra_from(*breakdown) : lnk_from(*breakdown);
                    break;
                }
                case Metric::DIV: {
                    EventCounts c = div_f1(gt, pred, matching);
                    r.events = c;
                    if (auto f1 = c.f1())
                        r.value = *f1;
                    else
                        throw UndefinedMetricError("no division events in this condition");
                    break;
                }
                case Metric::CT: {
                    EventCounts c = ct_f1(gt, pred, matching);
                    r.events = c;
                    if (auto f1 = c.f1())
                        r.value = *f1;
                    else
                        throw UndefinedMetricError("no tracks in this condition");
                    break;
                }
            }
        } catch (const UndefinedMetricError& e) {
            r.status = CellStatus::Undefined;
            r.value = 0.0;
            r.reason = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MetricReport> eatm_all(const TrackerFn& tracker, const SegmentationSequence& seq,
                                   const LineageGraph& gt, const ExperimentSpec& espec,
                                   const std::vector<Metric>& metrics,
                                   const AogmWeights& weights, const TrackerConfig& config) {
    auto mark_all = [&](CellStatus status, const std::string& reason) {
        std::vector<MetricReport> out;
        for (Metric m : metrics) {
            MetricReport r;
            r.metric = m;
            r.status = status;
            r.reason = reason;
            r.k = espec.k;
            r.n_max = espec.n_max;
            out.push_back(std::move(r));
        }
        return out;
    };

    TransformResult tr;
    try {
        tr = subsample(seq, gt, espec);
    } catch (const EmptyConditionError& e) {
        return mark_all(CellStatus::Empty, e.what());
    } catch (const std::exception& e) {
        return mark_all(CellStatus::Failed, e.what());
    }

    std::vector<MetricReport> out;
    try {
        TrackerConfig cfg = config;
        if (cfg.scale_gate_with_k)
            cfg.distance_gate *= espec.k;
        const LineageGraph pred = tracker(tr.seq, &tr.graph, cfg);
        // Trackers predict over the transformed masks themselves, so the
        // matching is the label-identity fast path.
        const NodeMatching matching = identity_matching(tr.seq);
        out = evaluate_graphs(tr.graph, pred, matching, metrics, weights);
    } catch (const std::exception& e) {
        return mark_all(CellStatus::Failed, e.what());
    }
    for (MetricReport& r : out) {
        r.k = espec.k;
        r.n_max = espec.n_max;
    }
    return out;
}

MetricReport eatm(const TrackerFn& tracker, const SegmentationSequence& seq,
                  const LineageGraph& gt, const ExperimentSpec& espec, Metric metric,
                  const AogmWeights& weights, const TrackerConfig& config) {
    return eatm_all(tracker, seq, gt, espec, {metric}, weights, config).front();
}

double rm(const SweepGrid& grid, Metric metric, double threshold) {
    const std::size_t total = grid.spec.sf.size() * grid.spec.mc.size();
    if (grid.cells.size() != total)
        throw IncompleteGridError("grid has " + std::to_string(grid.cells.size()) +
                                  " cells, expected " + std::to_string(total));
    int64_t hits = 0;
    for (std::size_t ki = 0; ki < grid.spec.sf.size(); ++ki)
        for (std::size_t mi = 0; mi < grid.spec.mc.size(); ++mi) {
            const MetricReport* r = grid.find(ki, mi, metric);
            if (!r)
                throw IncompleteGridError("cell (k=" + std::to_string(grid.spec.sf[ki]) +
                                          ", n_max=" + std::to_string(grid.spec.mc[mi]) +
                                          ") lacks metric " + metric_name(metric));
            if (r->status == CellStatus::Ok && r->value >= threshold)
                ++hits;
        }
    return static_cast<double>(hits) / static_cast<double>(total);
}

SweepGrid run_sweep(const SegmentationSequence& seq, const LineageGraph& gt,
                    const SweepSpec& spec, const Provenance& prov, int jobs) {
    if (spec.sf.empty() || spec.mc.empty())
        throw InputError("sweep needs at least one subsampling factor and one cell limit");
    for (int k : spec.sf)
        if (k < 1)
            throw InputError("subsampling factors must be >= 1");
    for (int64_t m : spec.mc)
        if (m < 1)
            throw InputError("cell count limits must be >= 1");
    if (jobs < 1)
        throw InputError("jobs must be >= 1");

    const TrackerFn tracker = find_tracker(prov.tracker);
    SweepGrid grid;
    grid.spec = spec;
    grid.prov = prov;
    grid.prov.jobs = jobs;
    const int64_t total = static_cast<int64_t>(spec.sf.size()) *
                          static_cast<int64_t>(spec.mc.size());
    grid.cells.resize(total);

#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (int64_t idx = 0; idx < total; ++idx) {
        const std::size_t ki = static_cast<std::size_t>(idx) / spec.mc.size();
        const std::size_t mi = static_cast<std::size_t>(idx) % spec.mc.size();
        ExperimentSpec espec;
        espec.k = spec.sf[ki];
        espec.n_max = spec.mc[mi];
        espec.frame_offset = spec.frame_offset;
        espec.truncation = spec.truncation;
        grid.cells[idx] =
            eatm_all(tracker, seq, gt, espec, spec.metrics, prov.weights, prov.config);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Exports

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string format_n_max(int64_t n) {
    return n == kUnlimitedCells ? "inf" : std::to_string(n);
}

int64_t parse_n_max(const json& j) {
    if (j.is_string())
        return kUnlimitedCells;
    return j.get<int64_t>();
}

json weights_to_json(const AogmWeights& w) {
    return {{"ns", w.ns}, {"fn", w.fn}, {"fp", w.fp},
            {"ea", w.ea}, {"ed", w.ed}, {"ec", w.ec}};
}

AogmWeights weights_from_json(const json& j) {
    AogmWeights w;
    w.ns = j.at("ns");
    w.fn = j.at("fn");
    w.fp = j.at("fp");
    w.ea = j.at("ea");
    w.ed = j.at("ed");
    w.ec = j.at("ec");
    return w;
}

json report_to_json_obj(const MetricReport& r) {
    json j;
    j["metric"] = metric_name(r.metric);
    j["status"] = status_name(r.status);
    if (r.status == CellStatus::Ok)
        j["value"] = r.value;
    else
        j["reason"] = r.reason;
    j["k"] = r.k;
    if (r.n_max == kUnlimitedCells)
        j["n_max"] = "inf";
    else
        j["n_max"] = r.n_max;
    if (r.aogm) {
        j["aogm"] = {{"ns", r.aogm->ns},       {"fn", r.aogm->fn},
                     {"fp", r.aogm->fp},       {"ea", r.aogm->ea},
                     {"ed", r.aogm->ed},       {"ec", r.aogm->ec},
                     {"total", r.aogm->total}, {"aogm0", r.aogm->aogm0},
                     {"aogma", r.aogm->aogma}, {"aogma0", r.aogm->aogma0}};
        j["weights"] = weights_to_json(r.weights);
    }
    if (r.events) {
        json e = {{"tp", r.events->tp}, {"fp", r.events->fp}, {"fn", r.events->fn}};
        if (auto p = r.events->precision())
            e["precision"] = *p;
        if (auto rc = r.events->recall())
            e["recall"] = *rc;
        if (auto f1 = r.events->f1())
            e["f1"] = *f1;
        j["events"] = e;
    }
    return j;
}

MetricReport report_from_json(const json& j) {
    MetricReport r;
    r.metric = metric_from_name(j.at("metric"));
    const std::string st = j.at("status");
    if (st == "ok")
        r.status = CellStatus::Ok;
    else if (st == "undefined")
        r.status = CellStatus::Undefined;
    else if (st == "empty")
        r.status = CellStatus::Empty;
    else
        r.status = CellStatus::Failed;
    if (r.status == CellStatus::Ok)
        r.value = j.at("value");
    else if (j.contains("reason"))
        r.reason = j.at("reason");
    r.k = j.at("k");
    r.n_max = parse_n_max(j.at("n_max"));
    if (j.contains("aogm")) {
        AogmBreakdown b;
        const json& a = j.at("aogm");
        b.ns = a.at("ns");
        b.fn = a.at("fn");
        b.fp = a.at("fp");
        b.ea = a.at("ea");
        b.ed = a.at("ed");
        b.ec = a.at("ec");
        b.total = a.at("total");
        b.aogm0 = a.at("aogm0");
        b.aogma = a.at("aogma");
        b.aogma0 = a.at("aogma0");
        r.aogm = b;
    }
    if (j.contains("events")) {
        EventCounts c;
        const json& e = j.at("events");
        c.tp = e.at("tp");
        c.fp = e.at("fp");
        c.fn = e.at("fn");
        r.events = c;
    }
    if (j.contains("weights"))
        r.weights = weights_from_json(j.at("weights"));
    return r;
}

json prov_to_json(const Provenance& p) {
    json j;
    j["tool_version"] = p.tool_version;
    j["subcommand"] = p.subcommand;
    j["tracker"] = p.tracker;
    j["dataset_id"] = p.dataset_id;
    j["weights"] = weights_to_json(p.weights);
    j["config"] = {{"method", p.config.method},
                   {"distance_gate", p.config.distance_gate},
                   {"scale_gate_with_k", p.config.scale_gate_with_k},
                   {"birth_cost", p.config.birth_cost},
                   {"death_cost", p.config.death_cost},
                   {"division_allowance", p.config.division_allowance},
                   {"overlap_cost", p.config.overlap_cost == OverlapCost::IoU ? "iou" : "iot"}};
    j["frame_offset"] = p.frame_offset;
    j["jobs"] = p.jobs;
    return j;
}

Provenance prov_from_json(const json& j) {
    Provenance p;
    p.tool_version = j.value("tool_version", "");
    p.subcommand = j.value("subcommand", "");
    p.tracker = j.value("tracker", "");
    p.dataset_id = j.value("dataset_id", "");
    if (j.contains("weights"))
        p.weights = weights_from_json(j.at("weights"));
    if (j.contains("config")) {
        const json& c = j.at("config");
        p.config.method = c.value("method", "distance");
        p.config.distance_gate = c.value("distance_gate", 60.0);
        p.config.scale_gate_with_k = c.value("scale_gate_with_k", true);
        p.config.birth_cost = c.value("birth_cost", 0.9);
        p.config.death_cost = c.value("death_cost", 0.9);
        p.config.division_allowance = c.value("division_allowance", 2);
        p.config.overlap_cost = c.value("overlap_cost", "iou") == std::string("iot")
            ? OverlapCost::IntersectionOverTarget
            : OverlapCost::IoU;
    }
    p.frame_offset = j.value("frame_offset", 0);
    p.jobs = j.value("jobs", 1);
    return p;
}

} // namespace

std::string grid_to_csv(const SweepGrid& grid) {
    std::string out = "k,n_max,metric,value,status\n";
    for (std::size_t ki = 0; ki < grid.spec.sf.size(); ++ki)
        for (std::size_t mi = 0; mi < grid.spec.mc.size(); ++mi)
            for (const MetricReport& r : grid.cell(ki, mi)) {
                out += std::to_string(grid.spec.sf[ki]);
                out += ',';
                out += format_n_max(grid.spec.mc[mi]);
                out += ',';
                out += metric_name(r.metric);
                out += ',';
                if (r.status == CellStatus::Ok)
                    out += format_value(r.value);
                out += ',';
                out += status_name(r.status);
                out += '\n';
            }
    return out;
}

std::string grid_contours_csv(const SweepGrid& grid) {
    std::string out = "theta,k,n_max,metric,pass\n";
    for (double theta : grid.spec.thresholds)
        for (std::size_t ki = 0; ki < grid.spec.sf.size(); ++ki)
            for (std::size_t mi = 0; mi < grid.spec.mc.size(); ++mi)
                for (const MetricReport& r : grid.cell(ki, mi)) {
                    const bool pass = r.status == CellStatus::Ok && r.value >= theta;
                    out += format_value(theta);
                    out += ',';
                    out += std::to_string(grid.spec.sf[ki]);
                    out += ',';
                    out += format_n_max(grid.spec.mc[mi]);
                    out += ',';
                    out += metric_name(r.metric);
                    out += ',';
                    out += pass ? '1' : '0';
                    out += '\n';
                }
    return out;
}

std::string grid_to_json(const SweepGrid& grid) {
    json j;
    j["provenance"] = prov_to_json(grid.prov);
    j["sf"] = grid.spec.sf;
    json mc = json::array();
    for (int64_t m : grid.spec.mc) {
        if (m == kUnlimitedCells)
            mc.push_back("inf");
        else
            mc.push_back(m);
    }
    j["mc"] = mc;
    json metrics = json::array();
    for (Metric m : grid.spec.metrics)
        metrics.push_back(metric_name(m));
    j["metrics"] = metrics;
    j["thresholds"] = grid.spec.thresholds;
    json cells = json::array();
    for (const auto& cell : grid.cells) {
        json reports = json::array();
        for (const MetricReport& r : cell)
            reports.push_back(report_to_json_obj(r));
        cells.push_back(reports);
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

SweepGrid grid_from_json(const std::string& text) {
    const json j = json::parse(text);
    SweepGrid grid;
    grid.prov = prov_from_json(j.at("provenance"));
    grid.spec.sf = j.at("sf").get<std::vector<int>>();
    grid.spec.mc.clear();
    for (const json& m : j.at("mc"))
        grid.spec.mc.push_back(parse_n_max(m));
    grid.spec.metrics.clear();
    for (const json& m : j.at("metrics"))
        grid.spec.metrics.push_back(metric_from_name(m));
    grid.spec.thresholds = j.at("thresholds").get<std::vector<double>>();
    for (const json& cell : j.at("cells")) {
        std::vector<MetricReport> reports;
        for (const json& r : cell)
            reports.push_back(report_from_json(r));
        grid.cells.push_back(std::move(reports));
    }
    return grid;
}

std::string reports_to_json(const std::vector<MetricReport>& reports, const Provenance& prov) {
    json j;
    j["provenance"] = prov_to_json(prov);
    json arr = json::array();
    for (const MetricReport& r : reports)
        arr.push_back(report_to_json_obj(r));
    j["reports"] = arr;
    return j.dump(2) + "\n";
}

} // namespace mlct
