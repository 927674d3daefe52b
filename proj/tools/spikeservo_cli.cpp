// Experiment driver: babbling, cerebellar training, the reaching and
// contour tasks, metric recomputation and plots. Every run is fully
// determined by (config, seed) and writes CSV + JSON artifacts.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spikeservo/experiments.hpp"
#include "spikeservo/svg.hpp"

using namespace spikeservo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& name)
{
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) {
        throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return f;
}

void write_json(const fs::path& dir, const std::string& name, const json& j)
{
    auto f = open_out(dir, name);
    f << j.dump(2) << '\n';
}

// least-squares slope of y over index 0..n-1
double linear_slope(const std::vector<double>& y)
{
    const double n = static_cast<double>(y.size());
    if (y.size() < 2) return 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sx += i;
        sy += y[i];
        sxx += double(i) * i;
        sxy += i * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::vector<double>> read_csv(const fs::path& file,
                                          std::vector<std::string>* header)
{
    std::ifstream f(file);
    if (!f) {
        throw std::runtime_error("cannot read " + file.string());
    }
    std::string line;
    std::getline(f, line);
    if (header) {
        header->clear();
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) header->push_back(col);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            row.push_back(std::stod(tok));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int column(const std::vector<std::string>& header, const std::string& name)
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("missing CSV column " + name);
}

std::vector<Vec2> path_from_records(const fs::path& file)
{
    std::vector<std::string> header;
    auto rows = read_csv(file, &header);
    const int cx = column(header, "xs_x"), cy = column(header, "xs_y");
    std::vector<Vec2> pts;
    pts.reserve(rows.size());
    for (const auto& r : rows) {
        pts.push_back({r[cx], r[cy]});
    }
    return pts;
}

void write_epred_csv(const fs::path& dir, const std::string& name,
                     const std::vector<ControlCycleRecord>& recs)
{
    auto f = open_out(dir, name);
    f << "cycle,epred_x,epred_y,epred_mean\n";
    f << std::setprecision(17);
    long i = 0;
    for (const auto& r : recs) {
        f << i++ << ',' << r.e_pred[0] << ',' << r.e_pred[1] << ','
          << 0.5 * (std::abs(r.e_pred[0]) + std::abs(r.e_pred[1])) << '\n';
    }
}

// ------------------------------------------------------------------ plots

void plot_epred(const fs::path& dir, const fs::path& csv)
{
    std::vector<std::string> header;
    auto rows = read_csv(csv, &header);
    const int cm = column(header, "epred_mean");
    std::vector<double> ys;
    ys.reserve(rows.size());
    for (const auto& r : rows) ys.push_back(r[cm]);
    SvgPlot p;
    p.set_title("prediction error");
    p.set_labels("cycle", "mean |e_pred| (m/s)");
    p.add_polyline(series_points(ys), "#c22", 1.0);
    auto f = open_out(dir, "epred.svg");
    p.write(f);
}

void plot_trajectory(const fs::path& dir,
                     const std::vector<std::vector<Vec2>>& paths,
                     const std::vector<std::string>& colors,
                     const std::vector<Vec2>& reference,
                     const std::string& title)
{
    SvgPlot p;
    p.set_title(title);
    p.set_labels("x (m)", "y (m)");
    if (!reference.empty()) {
        p.add_polyline(reference, "#888", 1.0, true);
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
        p.add_polyline(paths[i], colors[i % colors.size()], 1.5);
    }
    auto f = open_out(dir, "trajectory.svg");
    p.write(f);
}

void plot_dcn_raster(const fs::path& dir, const fs::path& spikes_csv)
{
    std::ifstream f(spikes_csv);
    if (!f) {
        throw std::runtime_error("cannot read " + spikes_csv.string());
    }
    std::string line;
    std::getline(f, line);  // header
    std::vector<std::string> pops;
    std::vector<Vec2> pts;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string pop, ntok, ttok;
        std::getline(ss, pop, ',');
        std::getline(ss, ntok, ',');
        std::getline(ss, ttok, ',');
        if (pop.rfind("dcn", 0) != 0) continue;
        std::size_t row = 0;
        for (; row < pops.size(); ++row) {
            if (pops[row] == pop) break;
        }
        if (row == pops.size()) pops.push_back(pop);
        pts.push_back({std::stod(ttok),
                       row * 5.0 + std::stod(ntok)});
    }
    SvgPlot p;
    p.set_title("DCN raster (one prediction window)");
    p.set_labels("t (ms)", "neuron (grouped by assembly)");
    p.add_points(pts, "#136", 2.0);
    auto fo = open_out(dir, "dcn_raster.svg");
    p.write(fo);
}

// ------------------------------------------------------------------ tasks

struct Cli {
    std::string config_path;
    std::string out_dir = "out";
    unsigned seed = 1;
    long iterations = 0;
    std::string cb = "on";
};

struct Stack {
    HarnessConfig h;
    ExperimentSpec spec;
};

Stack build(const Cli& cli, const std::string& task)
{
    Stack s;
    s.h = load_config(cli.config_path);
    s.spec.task = task;
    s.spec.seed = cli.seed;
    s.spec.iterations = cli.iterations;
    s.spec.cb_on = cli.cb == "on";
    s.spec.out_dir = cli.out_dir;
    if (!cli.config_path.empty()) {
        std::ifstream f(cli.config_path);
        auto toml = parse_toml_lite(f);
        if (auto it = toml.find("task"); it != toml.end()) {
            for (const auto& [key, val] : it->second) {
                if (key == "seed" && cli.seed == 1) {
                    s.spec.seed = static_cast<unsigned>(std::stoul(val));
                } else if (key == "iterations" && cli.iterations == 0) {
                    s.spec.iterations = std::stol(val);
                } else if (key == "cb" && cli.cb == "on") {
                    s.spec.cb_on = val == "on" || val == "true";
                } else if (key == "contour_radius") {
                    s.spec.contour_radius = std::stod(val);
                } else if (key == "contour_points") {
                    s.spec.contour_points = std::stoi(val);
                }
            }
        }
    }
    s.spec.validate();
    return s;
}

json spec_json(const Stack& s)
{
    return json{{"task", s.spec.task},
                {"seed", s.spec.seed},
                {"iterations", s.spec.iterations},
                {"cb", s.spec.cb_on ? "on" : "off"},
                {"delay_cycles", s.h.delay_cycles},
                {"k_c", s.h.control.k_c},
                {"v_ref", s.h.control.v_ref}};
}

json reach_json(const ReachMetrics& m)
{
    return json{{"max_deviation_m", m.max_deviation},
                {"reach_time_s", m.reach_time_s},
                {"reached", m.reached}};
}

int cmd_babble(const Cli& cli)
{
    Stack s = build(cli, "babble");
    const long iters = s.spec.iterations > 0 ? s.spec.iterations : 3000;
    DMNetwork dm(s.h.dm, s.spec.seed);
    std::vector<ArmState> traj;
    auto rows = babble(dm, s.h.arm, iters, s.spec.seed, &traj);

    const fs::path dir = s.spec.out_dir;
    {
        auto f = open_out(dir, "dataset.csv");
        write_babble_csv(f, rows);
    }
    {
        auto f = open_out(dir, "trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    {
        auto f = open_out(dir, "dm_weights.csv");
        dm.export_weights(f);
    }

    double max_residual = 0.0;
    for (const auto& r : rows) {
        const Vec2 jx =
            apply_jacobian(jacobian(s.h.arm, r.theta), r.thetadot);
        max_residual = std::max(max_residual, norm(jx - r.xdot));
    }
    json summary{{"spec", spec_json(s)},
                 {"rows", rows.size()},
                 {"train_count", dm.train_count()},
                 {"max_jacobian_residual", max_residual}};
    write_json(dir, "summary.json", summary);

    std::vector<Vec2> path;
    for (const auto& st : traj) path.push_back(st.x);
    plot_trajectory(dir, {path}, {"#136"}, {}, "motor babbling");
    std::cout << "babble: " << rows.size() << " samples -> " << dir.string()
              << '\n';
    return 0;
}

int cmd_train_cb(const Cli& cli)
{
    Stack s = build(cli, "train-cb");
    if (!s.spec.cb_on) {
        throw std::runtime_error("train-cb requires --cb on");
    }
    const long reps = s.spec.iterations > 0 ? s.spec.iterations : 30;
    DMNetwork dm(s.h.dm, s.spec.seed);
    babble(dm, s.h.arm, 3000, s.spec.seed);
    CBNetwork cb(s.h.cb, s.spec.seed);
    auto tr = train_cb(s.h, dm, cb, reps, s.spec.seed);

    std::vector<ControlCycleRecord> all;
    for (const auto& rep : tr.reps) {
        all.insert(all.end(), rep.begin(), rep.end());
    }
    const fs::path dir = s.spec.out_dir;
    {
        auto f = open_out(dir, "records.csv");
        write_records_csv(f, all);
    }
    write_epred_csv(dir, "epred.csv", all);
    {
        auto f = open_out(dir, "cb_weights.csv");
        cb.export_weights(f);
    }
    {
        // one frozen prediction window for the raster
        const Vec2 th = center_angles(s.h.arm);
        SpikeRecord rec;
        cb.predict({th[0], th[1]}, {0.05, 0.05}, {0.01, 0.01}, &rec);
        auto f = open_out(dir, "spikes.csv");
        rec.write_csv(f);
    }

    const std::size_t n = tr.epred_mean.size();
    const std::size_t tenth = std::max<std::size_t>(1, n / 10);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < tenth; ++i) {
        head += tr.epred_mean[i];
        tail += tr.epred_mean[n - 1 - i];
    }
    head /= tenth;
    tail /= tenth;
    std::vector<double> e0, e1;
    for (const auto& r : all) {
        e0.push_back(std::abs(r.e_pred[0]));
        e1.push_back(std::abs(r.e_pred[1]));
    }
    json summary{{"spec", spec_json(s)},
                 {"repetitions", reps},
                 {"training_cycles", n},
                 {"target", {tr.target[0], tr.target[1]}},
                 {"epred_head_mean", head},
                 {"epred_tail_mean", tail},
                 {"epred_tail_over_head", tail / head},
                 {"epred_slope_dof1", linear_slope(e0)},
                 {"epred_slope_dof2", linear_slope(e1)}};
    write_json(dir, "summary.json", summary);

    plot_epred(dir, dir / "epred.csv");
    plot_dcn_raster(dir, dir / "spikes.csv");
    const Vec2 start = forward_kinematics(s.h.arm, center_angles(s.h.arm));
    std::vector<Vec2> last;
    for (const auto& r : tr.reps.back()) last.push_back(r.x_s);
    plot_trajectory(dir, {last}, {"#136"}, {start, tr.target},
                    "last training repetition");
    std::cout << "train-cb: " << n << " cycles, |e_pred| " << head << " -> "
              << tail << " -> " << dir.string() << '\n';
    return 0;
}

int cmd_reach_random(const Cli& cli)
{
    Stack s = build(cli, "random-reach");
    DMNetwork dm(s.h.dm, s.spec.seed);
    babble(dm, s.h.arm, 3000, s.spec.seed);
    const fs::path dir = s.spec.out_dir;

    if (!s.spec.cb_on) {
        // baseline-only evaluation, same sampler and seeds as the paired run
        WorkspaceSampler sampler(s.h.arm, s.spec.seed);
        json rows = json::array();
        for (int i = 0; i < 20; ++i) {
            auto [start, target] = sampler.sample_pair();
            Vec2 start_th;
            inverse_kinematics(s.h.arm, start, start_th);
            NullPredictor off;
            auto m = eval_reach(s.h, dm, off, 0.0, start_th, target,
                                s.spec.seed + 7919u * (i + 1), nullptr);
            rows.push_back(reach_json(m));
        }
        write_json(dir, "summary.json",
                   json{{"spec", spec_json(s)}, {"reaches", rows}});
        std::cout << "reach-random (cb off) -> " << dir.string() << '\n';
        return 0;
    }

    CBNetwork cb(s.h.cb, s.spec.seed);
    auto res = run_random_reach(s.h, dm, cb, s.spec);

    {
        auto f = open_out(dir, "pairs.csv");
        f << "pair,start_x,start_y,target_x,target_y,off_dev,off_time,"
             "off_reached,on_dev,on_time,on_reached\n";
        f << std::setprecision(17);
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            const auto& p = res.pairs[i];
            f << i << ',' << p.start[0] << ',' << p.start[1] << ','
              << p.target[0] << ',' << p.target[1] << ','
              << p.off.max_deviation << ',' << p.off.reach_time_s << ','
              << p.off.reached << ',' << p.on.max_deviation << ','
              << p.on.reach_time_s << ',' << p.on.reached << '\n';
        }
    }
    {
        auto f = open_out(dir, "epred.csv");
        f << "cycle,epred_mean\n" << std::setprecision(17);
        for (std::size_t i = 0; i < res.train_epred.size(); ++i) {
            f << i << ',' << res.train_epred[i] << '\n';
        }
    }
    fs::create_directories(dir / "records");
    for (std::size_t i = 0; i < res.pairs.size(); ++i) {
        auto fo = open_out(dir / "records",
                           "pair" + std::to_string(i) + "_off.csv");
        write_records_csv(fo, res.pairs[i].recs_off);
        auto fn = open_out(dir / "records",
                           "pair" + std::to_string(i) + "_on.csv");
        write_records_csv(fn, res.pairs[i].recs_on);
    }
    {
        auto f = open_out(dir, "cb_weights.csv");
        cb.export_weights(f);
    }

    json pairs = json::array();
    for (const auto& p : res.pairs) {
        pairs.push_back(json{{"start", {p.start[0], p.start[1]}},
                             {"target", {p.target[0], p.target[1]}},
                             {"off", reach_json(p.off)},
                             {"on", reach_json(p.on)}});
    }
    json summary{{"spec", spec_json(s)},
                 {"training_cycles", res.training_cycles},
                 {"mean_deviation_reduction", res.mean_dev_reduction},
                 {"mean_time_reduction", res.mean_time_reduction},
                 {"time_ratio_off_over_on", res.time_ratio},
                 {"pairs", pairs}};
    write_json(dir, "summary.json", summary);

    const auto& p0 = res.pairs.front();
    std::vector<Vec2> off_path, on_path;
    for (const auto& r : p0.recs_off) off_path.push_back(r.x_s);
    for (const auto& r : p0.recs_on) on_path.push_back(r.x_s);
    plot_trajectory(dir, {off_path, on_path}, {"#c22", "#136"},
                    {p0.start, p0.target},
                    "pair 0: cb off (red) vs on (blue)");
    std::cout << "reach-random: dev -" << 100.0 * res.mean_dev_reduction
              << "% time -" << 100.0 * res.mean_time_reduction << "% -> "
              << dir.string() << '\n';
    return 0;
}

int cmd_reach_radial(const Cli& cli)
{
    Stack s = build(cli, "radial-reach");
    DMNetwork dm(s.h.dm, s.spec.seed);
    babble(dm, s.h.arm, 3000, s.spec.seed);
    auto res = run_radial_reach(s.h, dm, s.spec);

    const fs::path dir = s.spec.out_dir;
    {
        auto f = open_out(dir, "radial.csv");
        f << "angle_deg,target_x,target_y,dev_rep0,dev_rep4,dev_rep8,"
             "time_rep0,time_rep4,time_rep8,dev_reduction,monotone\n";
        f << std::setprecision(17);
        for (const auto& t : res.targets) {
            f << t.angle_deg << ',' << t.target[0] << ',' << t.target[1]
              << ',' << t.rep0.max_deviation << ',' << t.rep4.max_deviation
              << ',' << t.rep8.max_deviation << ',' << t.rep0.reach_time_s
              << ',' << t.rep4.reach_time_s << ',' << t.rep8.reach_time_s
              << ',' << t.dev_reduction << ',' << t.monotone << '\n';
        }
    }
    json targets = json::array();
    for (const auto& t : res.targets) {
        targets.push_back(json{{"angle_deg", t.angle_deg},
                               {"target", {t.target[0], t.target[1]}},
                               {"rep0", reach_json(t.rep0)},
                               {"rep4", reach_json(t.rep4)},
                               {"rep8", reach_json(t.rep8)},
                               {"dev_reduction", t.dev_reduction},
                               {"monotone", t.monotone}});
    }
    json summary{{"spec", spec_json(s)},
                 {"mean_deviation_reduction", res.mean_dev_reduction},
                 {"monotone_targets", res.monotone_count},
                 {"targets", targets}};
    write_json(dir, "summary.json", summary);
    std::cout << "reach-radial: mean dev -"
              << 100.0 * res.mean_dev_reduction << "%, monotone "
              << res.monotone_count << "/8 -> " << dir.string() << '\n';
    return 0;
}

int cmd_contour(const Cli& cli)
{
    Stack s = build(cli, "contour");
    DMNetwork dm(s.h.dm, s.spec.seed);
    babble(dm, s.h.arm, 3000, s.spec.seed);
    CBNetwork cb(s.h.cb, s.spec.seed);
    auto res = run_contour(s.h, dm, cb, s.spec);

    const fs::path dir = s.spec.out_dir;
    {
        auto f = open_out(dir, "contour.csv");
        f << "idx,x,y\n" << std::setprecision(17);
        for (std::size_t i = 0; i < res.contour.size(); ++i) {
            f << i << ',' << res.contour[i][0] << ',' << res.contour[i][1]
              << '\n';
        }
    }
    auto dump_run = [&](const ContourRunResult& run,
                        const std::string& tag) {
        auto f = open_out(dir, "records_" + tag + ".csv");
        write_records_csv(f, run.records);
        auto e = open_out(dir, "error_" + tag + ".csv");
        e << "cycle,error,filtered_error\n" << std::setprecision(17);
        for (std::size_t i = 0; i < run.metrics.error.size(); ++i) {
            e << i << ',' << run.metrics.error[i] << ','
              << run.metrics.filtered_error[i] << '\n';
        }
    };
    dump_run(res.off, "off");
    if (s.spec.cb_on) dump_run(res.on, "on");

    auto contour_json = [](const ContourMetrics& m) {
        return json{{"max_error_m", m.max_error},
                    {"max_filtered_error_m", m.max_filtered_error},
                    {"completion_time_s", m.completion_time_s},
                    {"skipped_points", m.skipped_points}};
    };
    json summary{{"spec", spec_json(s)},
                 {"contour_radius_m", s.spec.contour_radius},
                 {"contour_points", s.spec.contour_points},
                 {"off", contour_json(res.off.metrics)}};
    if (s.spec.cb_on) {
        summary["on"] = contour_json(res.on.metrics);
        summary["error_ratio_on_over_off"] =
            res.on.metrics.max_filtered_error /
            res.off.metrics.max_filtered_error;
        summary["time_reduction"] =
            (res.off.metrics.completion_time_s -
             res.on.metrics.completion_time_s) /
            res.off.metrics.completion_time_s;
    }
    write_json(dir, "summary.json", summary);

    std::vector<Vec2> closed = res.contour;
    closed.push_back(res.contour.front());
    std::vector<std::vector<Vec2>> paths;
    std::vector<Vec2> off_path;
    for (const auto& r : res.off.records) off_path.push_back(r.x_s);
    paths.push_back(std::move(off_path));
    if (s.spec.cb_on) {
        std::vector<Vec2> on_path;
        for (const auto& r : res.on.records) on_path.push_back(r.x_s);
        paths.push_back(std::move(on_path));
    }
    plot_trajectory(dir, paths, {"#c22", "#136"}, closed,
                    "contour: cb off (red) vs on (blue)");
    std::cout << "contour: off max " << res.off.metrics.max_error;
    if (s.spec.cb_on) {
        std::cout << " on max " << res.on.metrics.max_error;
    }
    std::cout << " -> " << dir.string() << '\n';
    return 0;
}

int cmd_metrics(const Cli& cli)
{
    const fs::path dir = cli.out_dir;
    std::ifstream sf(dir / "summary.json");
    if (!sf) {
        throw std::runtime_error("no summary.json in " + dir.string());
    }
    json summary = json::parse(sf);
    const std::string task = summary.at("spec").at("task");
    const double cycle_ms = 80.0;
    json out{{"task", task}};

    if (task == "train-cb") {
        std::vector<std::string> header;
        auto rows = read_csv(dir / "epred.csv", &header);
        const int cm = column(header, "epred_mean");
        const std::size_t tenth = std::max<std::size_t>(1, rows.size() / 10);
        double head = 0.0, tail = 0.0;
        for (std::size_t i = 0; i < tenth; ++i) {
            head += rows[i][cm];
            tail += rows[rows.size() - 1 - i][cm];
        }
        out["epred_head_mean"] = head / tenth;
        out["epred_tail_mean"] = tail / tenth;
    } else if (task == "contour") {
        std::vector<std::string> header;
        auto contour_rows = read_csv(dir / "contour.csv", &header);
        std::vector<Vec2> contour;
        for (const auto& r : contour_rows) contour.push_back({r[1], r[2]});
        contour.push_back(contour.front());
        for (const std::string tag : {"off", "on"}) {
            const fs::path rec = dir / ("records_" + tag + ".csv");
            if (!fs::exists(rec)) continue;
            std::vector<std::string> rh;
            auto rows = read_csv(rec, &rh);
            const int cx = column(rh, "xs_x"), cy = column(rh, "xs_y");
            ContourMetrics m;
            double y = 0.0;
            for (const auto& r : rows) {
                const double e =
                    point_polyline_distance({r[cx], r[cy]}, contour);
                y += 0.1 * (e - y);
                m.max_error = std::max(m.max_error, e);
                m.max_filtered_error = std::max(m.max_filtered_error, y);
            }
            out[tag] = json{{"max_error_m", m.max_error},
                            {"max_filtered_error_m", m.max_filtered_error},
                            {"completion_time_s",
                             rows.size() * cycle_ms * 1e-3}};
        }
    } else if (task == "random-reach") {
        json reaches = json::array();
        for (const auto& p : summary.at("pairs")) {
            const Vec2 start{p.at("start")[0], p.at("start")[1]};
            const Vec2 target{p.at("target")[0], p.at("target")[1]};
            json pair;
            for (const std::string tag : {"off", "on"}) {
                const fs::path rec =
                    dir / "records" /
                    ("pair" + std::to_string(reaches.size()) + "_" + tag +
                     ".csv");
                auto path = path_from_records(rec);
                double dev = 0.0;
                for (const auto& pt : path) {
                    dev = std::max(dev,
                                   point_segment_distance(pt, start, target));
                }
                pair[tag] = json{{"max_deviation_m", dev},
                                 {"reach_time_s",
                                  path.size() * cycle_ms * 1e-3}};
            }
            reaches.push_back(pair);
        }
        out["pairs"] = reaches;
    } else {
        throw std::runtime_error("metrics: unsupported task " + task);
    }
    std::cout << out.dump(2) << '\n';
    write_json(dir, "metrics.json", out);
    return 0;
}

int cmd_plot(const Cli& cli)
{
    const fs::path dir = cli.out_dir;
    bool any = false;
    if (fs::exists(dir / "epred.csv")) {
        plot_epred(dir, dir / "epred.csv");
        any = true;
    }
    if (fs::exists(dir / "spikes.csv")) {
        plot_dcn_raster(dir, dir / "spikes.csv");
        any = true;
    }
    if (fs::exists(dir / "records_off.csv")) {
        std::vector<std::vector<Vec2>> paths;
        paths.push_back(path_from_records(dir / "records_off.csv"));
        if (fs::exists(dir / "records_on.csv")) {
            paths.push_back(path_from_records(dir / "records_on.csv"));
        }
        std::vector<Vec2> ref;
        if (fs::exists(dir / "contour.csv")) {
            std::vector<std::string> header;
            for (const auto& r : read_csv(dir / "contour.csv", &header)) {
                ref.push_back({r[1], r[2]});
            }
            if (!ref.empty()) ref.push_back(ref.front());
        }
        plot_trajectory(dir, paths, {"#c22", "#136"}, ref,
                        "cb off (red) vs on (blue)");
        any = true;
    } else if (fs::exists(dir / "records.csv")) {
        plot_trajectory(dir, {path_from_records(dir / "records.csv")},
                        {"#136"}, {}, "trajectory");
        any = true;
    }
    if (!any) {
        throw std::runtime_error("no plottable CSVs in " + dir.string());
    }
    std::cout << "plots -> " << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spiking visual-servoing simulator"};
    app.require_subcommand(1);
    Cli cli;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cli.seed, "experiment seed");
        sub->add_option("--config", cli.config_path, "TOML config path");
        sub->add_option("--out", cli.out_dir, "output directory");
        sub->add_option("--cb", cli.cb, "cerebellum on|off")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--iterations", cli.iterations,
                        "task iteration count (0 = default)");
        return sub;
    };

    auto* babble_cmd =
        add_common(app.add_subcommand("babble", "motor babbling"));
    auto* train_cmd = add_common(
        app.add_subcommand("train-cb", "repeated single-target training"));
    auto* random_cmd = add_common(app.add_subcommand(
        "reach-random", "random reaches, paired cb on/off evaluation"));
    auto* radial_cmd = add_common(
        app.add_subcommand("reach-radial", "eight-target radial reaching"));
    auto* contour_cmd = add_common(
        app.add_subcommand("contour", "figure-eight contour following"));
    auto* metrics_cmd = add_common(app.add_subcommand(
        "metrics", "recompute metrics from a run directory"));
    auto* plot_cmd = add_common(
        app.add_subcommand("plot", "regenerate plots from a run directory"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (babble_cmd->parsed()) return cmd_babble(cli);
        if (train_cmd->parsed()) return cmd_train_cb(cli);
        if (random_cmd->parsed()) return cmd_reach_random(cli);
        if (radial_cmd->parsed()) return cmd_reach_radial(cli);
        if (contour_cmd->parsed()) return cmd_contour(cli);
        if (metrics_cmd->parsed()) return cmd_metrics(cli);
        if (plot_cmd->parsed()) return cmd_plot(cli);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
