// mlct — generate, transform, track and score microbial cell lineage data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlct/io.hpp"
#include "mlct/sweep.hpp"
#include "mlct/synthgen.hpp"
#include "mlct/trackers.hpp"
#include "mlct/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlct;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonState {
    int exit_code = 0;
};

std::string resolve_input(const std::string& flag_value) {
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv("TOIAM_DATA_DIR"))
        return env;
    throw InputError("no dataset given: pass --input or set TOIAM_DATA_DIR");
}

AogmWeights load_weights(const std::string& path) {
    if (path.empty())
        return {};
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read weights file " + path);
    json j = json::parse(in);
    AogmWeights w;
    w.ns = j.value("ns", w.ns);
    w.fn = j.value("fn", w.fn);
    w.fp = j.value("fp", w.fp);
    w.ea = j.value("ea", w.ea);
    w.ed = j.value("ed", w.ed);
    w.ec = j.value("ec", w.ec);
    return w;
}

json weights_json(const AogmWeights& w) {
    return {{"ns", w.ns}, {"fn", w.fn}, {"fp", w.fp},
            {"ea", w.ea}, {"ed", w.ed}, {"ec", w.ec}};
}

json config_json(const TrackerConfig& c) {
    return {{"method", c.method},
            {"distance_gate", c.distance_gate},
            {"scale_gate_with_k", c.scale_gate_with_k},
            {"birth_cost", c.birth_cost},
            {"death_cost", c.death_cost},
            {"division_allowance", c.division_allowance},
            {"overlap_cost", c.overlap_cost == OverlapCost::IoU ? "iou" : "iot"}};
}

json base_provenance(const std::string& subcommand) {
    json j;
    j["tool"] = "mlct";
    j["tool_version"] = kVersion;
    j["subcommand"] = subcommand;
    return j;
}

void write_json_atomic(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<Metric> parse_metrics(const std::vector<std::string>& names) {
    if (names.empty())
        return {Metric::TRA, Metric::LNK, Metric::DIV, Metric::CT};
    std::vector<Metric> out;
    for (const std::string& n : names)
        out.push_back(metric_from_name(n));
    return out;
}

std::vector<int64_t> parse_mc(const std::vector<std::string>& tokens) {
    std::vector<int64_t> out;
    for (const std::string& t : tokens) {
        if (t == "inf" || t == "INF")
            out.push_back(kUnlimitedCells);
        else
            out.push_back(std::stoll(t));
    }
    return out;
}

TruncationRule parse_rule(const std::string& name) {
    if (name == "prefix")
        return TruncationRule::Prefix;
    if (name == "last-compliant")
        return TruncationRule::LastCompliant;
    throw InputError("unknown truncation rule '" + name + "'");
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
    ColonyParams params;
    std::string out;
};

void run_gen(const GenOpts& o) {
    Colony c = generate(o.params);
    if (c.truncated)
        std::cerr << "warning: " << c.warning << "\n";
    save_dataset(o.out, c.seq, c.graph);

    json sidecar = base_provenance("gen");
    sidecar["params"] = {{"seed", o.params.seed},
                         {"width", o.params.width},
                         {"height", o.params.height},
                         {"initial_cells", o.params.initial_cells},
                         {"division_time_mean", o.params.division_time_mean},
                         {"division_time_jitter", o.params.division_time_jitter},
                         {"rod_length", o.params.rod_length},
                         {"rod_width", o.params.rod_width},
                         {"snap_angle_deg", o.params.snap_angle_deg},
                         {"growth_rate", o.params.growth_rate},
                         {"frames", o.params.frames}};
    sidecar["truncated"] = c.truncated;
    if (c.truncated)
        sidecar["warning"] = c.warning;
    GraphStats s = graph_stats(c.graph);
    sidecar["stats"] = {{"instances", s.instances},
                        {"tracks", s.tracks},
                        {"divisions", s.divisions}};
    write_json_atomic(fs::path(o.out) / "gen.json", sidecar);
    std::cout << "wrote " << c.seq.frames.size() << " frames, " << s.instances
              << " instances, " << s.divisions << " divisions to " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// transform

struct TransformOpts {
    std::string input;
    std::string out;
    int k = 1;
    std::string n_max = "inf";
    int offset = 0;
    std::string rule = "prefix";
};

void run_transform(const TransformOpts& o) {
    Dataset d = load_dataset(resolve_input(o.input));
    ExperimentSpec spec;
    spec.k = o.k;
    spec.n_max = parse_mc({o.n_max})[0];
    spec.frame_offset = o.offset;
    spec.truncation = parse_rule(o.rule);

    TransformResult tr = subsample(d.seq, d.graph, spec);
    save_dataset(o.out, tr.seq, tr.graph);

    json sidecar = base_provenance("transform");
    sidecar["spec"] = {{"k", spec.k},
                       {"n_max", o.n_max},
                       {"frame_offset", spec.frame_offset},
                       {"truncation", o.rule}};
    sidecar["frame_map"] = tr.frame_map;
    sidecar["input"] = resolve_input(o.input);
    write_json_atomic(fs::path(o.out) / "transform.json", sidecar);
    std::cout << "retained " << tr.frame_map.size() << " of " << d.seq.frames.size()
              << " frames into " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// track

struct TrackOpts {
    std::string input;
    std::string out;
    TrackerConfig config;
};

void run_track(const TrackOpts& o) {
    Dataset d = load_dataset(resolve_input(o.input));
    TrackerFn tracker = find_tracker(o.config.method);
    LineageGraph pred = tracker(d.seq, &d.graph, o.config);

    // predictions get canonical track-id labels so the pair is writable
    Dataset relabeled = relabel_tracks(d.seq, pred);
    save_dataset(o.out, relabeled.seq, relabeled.graph);

    json sidecar = base_provenance("track");
    sidecar["config"] = config_json(o.config);
    sidecar["input"] = resolve_input(o.input);
    GraphStats s = graph_stats(pred);
    sidecar["stats"] = {{"instances", s.instances},
                        {"tracks", s.tracks},
                        {"divisions", s.divisions}};
    write_json_atomic(fs::path(o.out) / "track.json", sidecar);
    std::cout << "tracked " << s.instances << " detections into " << s.tracks
              << " tracks (" << s.divisions << " divisions) at " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
    std::string gt;
    std::string pred;
    std::string weights_file;
    std::vector<std::string> metric_names;
    std::string out;
};

void run_evaluate(const EvaluateOpts& o) {
    Dataset gt = load_dataset(o.gt);
    Dataset pred = load_dataset(o.pred);
    const AogmWeights weights = load_weights(o.weights_file);
    const std::vector<Metric> metrics = parse_metrics(o.metric_names);

    NodeMatching matching = match_frames(gt.seq, pred.seq);
    std::vector<MetricReport> reports =
        evaluate_graphs(gt.graph, pred.graph, matching, metrics, weights);

    Provenance prov;
    prov.tool_version = kVersion;
    prov.subcommand = "evaluate";
    prov.dataset_id = o.gt;
    prov.weights = weights;
    for (const MetricReport& r : reports) {
        std::cout << metric_name(r.metric) << ": ";
        if (r.status == CellStatus::Ok)
            std::cout << r.value;
        else
            std::cout << status_name(r.status) << " (" << r.reason << ")";
        std::cout << "\n";
    }
    if (!o.out.empty())
        write_file_atomic(o.out, reports_to_json(reports, prov));
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
    std::string input;
    std::string tracker = "distance";
    std::vector<int> sf;
    std::vector<std::string> mc;
    std::vector<std::string> metric_names;
    std::vector<double> thresholds;
    std::string weights_file;
    std::string out;
    int offset = 0;
    std::string rule = "prefix";
    int jobs = 1;
    TrackerConfig config;
};

void run_sweep_cmd(const SweepOpts& o) {
    Dataset d = load_dataset(resolve_input(o.input));
    SweepSpec spec;
    if (!o.sf.empty())
        spec.sf = o.sf;
    if (!o.mc.empty())
        spec.mc = parse_mc(o.mc);
    spec.metrics = parse_metrics(o.metric_names);
    if (!o.thresholds.empty())
        spec.thresholds = o.thresholds;
    spec.frame_offset = o.offset;
    spec.truncation = parse_rule(o.rule);

    Provenance prov;
    prov.tool_version = kVersion;
    prov.subcommand = "sweep";
    prov.tracker = o.tracker;
    prov.dataset_id = resolve_input(o.input);
    prov.weights = load_weights(o.weights_file);
    prov.config = o.config;
    prov.config.method = o.tracker;
    prov.frame_offset = o.offset;

    SweepGrid grid = run_sweep(d.seq, d.graph, spec, prov, o.jobs);

    fs::create_directories(o.out);
    write_file_atomic(fs::path(o.out) / "sweep.csv", grid_to_csv(grid));
    write_file_atomic(fs::path(o.out) / "contours.csv", grid_contours_csv(grid));
    write_file_atomic(fs::path(o.out) / "sweep.json", grid_to_json(grid));

    std::cout << "swept " << spec.sf.size() << "x" << spec.mc.size() << " conditions with '"
              << o.tracker << "'\n";
    for (Metric m : spec.metrics)
        for (double theta : spec.thresholds)
            std::cout << "RM@" << theta << " " << metric_name(m) << " = "
                      << rm(grid, m, theta) << "\n";
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
    std::string input;
    std::vector<int> sf;
    double smoothing = 0.1;
    std::string out;
};

void run_stats(const StatsOpts& o) {
    Dataset d = load_dataset(resolve_input(o.input));
    GraphStats s = graph_stats(d.graph);
    std::cout << "frames:         " << d.seq.frames.size() << "\n"
              << "instances:      " << s.instances << "\n"
              << "tracks:         " << s.tracks << "\n"
              << "divisions:      " << s.divisions << "\n"
              << "disappearances: " << s.disappearances << "\n";

    json j = base_provenance("stats");
    j["frames"] = d.seq.frames.size();
    j["instances"] = s.instances;
    j["tracks"] = s.tracks;
    j["divisions"] = s.divisions;
    j["disappearances"] = s.disappearances;
    j["cells_per_frame"] = s.cells_per_frame;

    if (!o.sf.empty()) {
        auto stats = interval_stats(d.seq, d.graph, o.sf, o.smoothing);
        std::string csv =
            "k,transition,divisions,disappearances,mean_displacement,"
            "divisions_smoothed,disappearances_smoothed,mean_displacement_smoothed\n";
        json arr = json::array();
        for (const IntervalStats& st : stats) {
            std::cout << "k=" << st.k << ": division fraction "
                      << st.division_fraction << " (" << st.division_links << "/"
                      << st.total_links << " links)\n";
            json e;
            e["k"] = st.k;
            e["division_fraction"] = st.division_fraction;
            e["total_links"] = st.total_links;
            e["division_links"] = st.division_links;
            e["smoothing"] = st.smoothing;
            arr.push_back(e);
            char buf[256];
            for (std::size_t i = 0; i < st.divisions.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%d,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                              st.k, i, st.divisions[i], st.disappearances[i],
                              st.mean_displacement[i], st.divisions_smoothed[i],
                              st.disappearances_smoothed[i],
                              st.mean_displacement_smoothed[i]);
                csv += buf;
            }
        }
        j["interval_stats"] = arr;
        if (!o.out.empty()) {
            fs::create_directories(o.out);
            write_file_atomic(fs::path(o.out) / "interval_stats.csv", csv);
        }
    }
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_json_atomic(fs::path(o.out) / "stats.json", j);
    }
}

// ---------------------------------------------------------------------------
// report

struct ReportOpts {
    std::vector<std::string> sweeps;
    std::vector<double> thresholds;
    std::string out;
};

void run_report(const ReportOpts& o) {
    std::string csv = "tracker,metric,theta,rm\n";
    for (const std::string& path : o.sweeps) {
        std::ifstream in(path);
        if (!in)
            throw InputError("cannot read sweep file " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        SweepGrid grid = grid_from_json(buf.str());
        const std::vector<double> thetas =
            o.thresholds.empty() ? grid.spec.thresholds : o.thresholds;
        std::cout << grid.prov.tracker << ":\n";
        for (Metric m : grid.spec.metrics) {
            for (double theta : thetas) {
                const double v = rm(grid, m, theta);
                std::cout << "  RM@" << theta << " " << metric_name(m) << " = " << v << "\n";
                char buf2[128];
                std::snprintf(buf2, sizeof(buf2), "%s,%s,%.9g,%.9g\n",
                              grid.prov.tracker.c_str(), metric_name(m).c_str(), theta, v);
                csv += buf2;
            }
        }
    }
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_file_atomic(fs::path(o.out) / "rm.csv", csv);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"microbial live-cell tracking evaluation toolkit"};
    app.set_version_flag("--version", kVersion);
    // flags override config-file values, which override built-in defaults
    app.set_config("--config", "", "read options from a TOML config file");
    app.require_subcommand(1);

    GenOpts gen;
    auto* cgen = app.add_subcommand("gen", "generate a synthetic rod-cell colony dataset");
    cgen->add_option("--seed", gen.params.seed, "random seed")->capture_default_str();
    cgen->add_option("--frames", gen.params.frames, "number of frames")->capture_default_str();
    cgen->add_option("--width", gen.params.width, "chamber width, px")->capture_default_str();
    cgen->add_option("--height", gen.params.height, "chamber height, px")->capture_default_str();
    cgen->add_option("--initial-cells", gen.params.initial_cells, "cells at frame 0")
        ->capture_default_str();
    cgen->add_option("--division-time", gen.params.division_time_mean,
                     "mean division interval, frames")
        ->capture_default_str();
    cgen->add_option("--division-jitter", gen.params.division_time_jitter,
                     "uniform division time jitter, frames")
        ->capture_default_str();
    cgen->add_option("--rod-length", gen.params.rod_length, "initial rod length, px")
        ->capture_default_str();
    cgen->add_option("--rod-width", gen.params.rod_width, "rod width, px")
        ->capture_default_str();
    cgen->add_option("--snap-angle", gen.params.snap_angle_deg,
                     "post-division snap rotation, degrees")
        ->capture_default_str();
    cgen->add_option("--growth-rate", gen.params.growth_rate, "length growth per frame, px")
        ->capture_default_str();
    cgen->add_option("-o,--out", gen.out, "output dataset directory")->required();

    TransformOpts tf;
    auto* ctf = app.add_subcommand("transform",
                                   "subsample and truncate a dataset into a new directory");
    ctf->add_option("-i,--input", tf.input, "dataset directory (default: $TOIAM_DATA_DIR)");
    ctf->add_option("-k,--k", tf.k, "subsampling factor")->capture_default_str();
    ctf->add_option("--n-max", tf.n_max, "cell count limit or 'inf'")->capture_default_str();
    ctf->add_option("--offset", tf.offset, "frame offset in [0,k)")->capture_default_str();
    ctf->add_option("--rule", tf.rule, "truncation rule: prefix|last-compliant")
        ->capture_default_str();
    ctf->add_option("-o,--out", tf.out, "output dataset directory")->required();

    TrackOpts tk;
    auto* ctk = app.add_subcommand("track", "run a tracker and write its prediction dataset");
    ctk->add_option("-i,--input", tk.input, "dataset directory (default: $TOIAM_DATA_DIR)");
    ctk->add_option("--tracker", tk.config.method, "distance|lap|oracle|empty")
        ->capture_default_str();
    ctk->add_option("--gate", tk.config.distance_gate, "distance gate, px")
        ->capture_default_str();
    ctk->add_option("--birth-cost", tk.config.birth_cost, "LAP birth cost")
        ->capture_default_str();
    ctk->add_option("--death-cost", tk.config.death_cost, "LAP death cost")
        ->capture_default_str();
    ctk->add_option("--allowance", tk.config.division_allowance, "max children per source")
        ->capture_default_str();
    std::string overlap = "iou";
    ctk->add_option("--overlap-cost", overlap, "iou|iot")->capture_default_str();
    ctk->add_option("-o,--out", tk.out, "prediction output directory")->required();

    EvaluateOpts ev;
    auto* cev = app.add_subcommand("evaluate", "score a prediction against ground truth");
    cev->add_option("--gt", ev.gt, "ground truth dataset directory")->required();
    cev->add_option("--pred", ev.pred, "prediction dataset directory")->required();
    cev->add_option("--weights", ev.weights_file, "AOGM weights JSON file");
    cev->add_option("--metrics", ev.metric_names, "subset of TRA,LNK,DIV,CT")->delimiter(',');
    cev->add_option("-o,--out", ev.out, "report JSON path");

    SweepOpts sw;
    auto* csw = app.add_subcommand("sweep", "evaluate a tracker across (k, n_max) conditions");
    csw->add_option("-i,--input", sw.input, "dataset directory (default: $TOIAM_DATA_DIR)");
    csw->add_option("--tracker", sw.tracker, "distance|lap|oracle|empty")
        ->capture_default_str();
    csw->add_option("--sf", sw.sf, "subsampling factors")->delimiter(',');
    csw->add_option("--mc", sw.mc, "cell count limits (numbers or 'inf')")->delimiter(',');
    csw->add_option("--metrics", sw.metric_names, "subset of TRA,LNK,DIV,CT")->delimiter(',');
    csw->add_option("--thresholds", sw.thresholds, "RM thresholds")->delimiter(',');
    csw->add_option("--weights", sw.weights_file, "AOGM weights JSON file");
    csw->add_option("--offset", sw.offset, "frame offset")->capture_default_str();
    csw->add_option("--rule", sw.rule, "truncation rule: prefix|last-compliant")
        ->capture_default_str();
    csw->add_option("-j,--jobs", sw.jobs, "parallel grid cells")->capture_default_str();
    csw->add_option("--gate", sw.config.distance_gate, "distance gate, px")
        ->capture_default_str();
    csw->add_option("--birth-cost", sw.config.birth_cost, "LAP birth cost")
        ->capture_default_str();
    csw->add_option("--death-cost", sw.config.death_cost, "LAP death cost")
        ->capture_default_str();
    csw->add_option("--allowance", sw.config.division_allowance, "max children per source")
        ->capture_default_str();
    csw->add_option("-o,--out", sw.out, "output directory")->required();

    StatsOpts st;
    auto* cst = app.add_subcommand("stats", "dataset statistics and subsampling series");
    cst->add_option("-i,--input", st.input, "dataset directory (default: $TOIAM_DATA_DIR)");
    cst->add_option("--sf", st.sf, "subsampling factors for interval stats")->delimiter(',');
    cst->add_option("--smoothing", st.smoothing, "EMA smoothing constant")
        ->capture_default_str();
    cst->add_option("-o,--out", st.out, "output directory");

    ReportOpts rp;
    auto* crp = app.add_subcommand("report", "summarize sweep JSONs into RM tables");
    crp->add_option("--sweep", rp.sweeps, "sweep.json files")->required();
    crp->add_option("--thresholds", rp.thresholds, "RM thresholds override")->delimiter(',');
    crp->add_option("-o,--out", rp.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage to stderr
        return 1;
    }

    try {
        if (*cgen)
            run_gen(gen);
        else if (*ctf)
            run_transform(tf);
        else if (*ctk) {
            tk.config.overlap_cost =
                overlap == "iot" ? OverlapCost::IntersectionOverTarget : OverlapCost::IoU;
            run_track(tk);
        } else if (*cev)
            run_evaluate(ev);
        else if (*csw)
            run_sweep_cmd(sw);
        else if (*cst)
            run_stats(st);
        else if (*crp)
            run_report(rp);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EmptyConditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IncompleteGridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
