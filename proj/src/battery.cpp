#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "evopref/runner.hpp"
#include "evopref/serialization.hpp"

namespace evopref {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string metrics_csv(const RunRecord& record) {
    std::string csv =
        "generation,hypervolume,covered_modes,coverage_fraction,sigma,"
        "evaluations_used\n";
    for (const auto& row : record.rows) {
        csv += std::to_string(row.generation);
        csv += ",";
        csv += fmt(row.hypervolume);
        csv += ",";
        csv += std::to_string(row.covered_modes);
        csv += ",";
        csv += fmt(row.coverage_fraction);
        csv += ",";
        csv += fmt(row.sigma);
        csv += ",";
        csv += std::to_string(row.evaluations_used);
        csv += "\n";
    }
    return csv;
}

std::string run_output_dir(const ExperimentConfig& config,
                           const std::string& label, int seed) {
    return config.output_dir + "/" + label + "/seed_" + std::to_string(seed);
}

void write_run_outputs(const ExperimentConfig& config,
                       const PreferenceLandscape& landscape,
                       const RunRecord& record, const std::string& label) {
    const fs::path dir = run_output_dir(config, label, record.seed);
    fs::create_directories(dir);
    write_file(dir / "config.txt", config.canonical_text());
    write_file(dir / "metrics.csv", metrics_csv(record));

    std::string jsonl;
    for (const auto& row : record.rows)
        jsonl += generation_row_to_json(row).dump() + "\n";
    write_file(dir / "generations.jsonl", jsonl);

    write_file(dir / "archive.json",
               archive_entries_to_json(record.final_set, true).dump(1));
    write_file(dir / "summary.json", run_record_to_json(record, false).dump(1));
    write_file(dir / "landscape.json", landscape_to_json(landscape).dump(1));
}

std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> configs;
    ExperimentConfig full = base;
    full.algorithm = "evopref";
    full.label = "evopref_full";
    configs.push_back(full);

    ExperimentConfig no_archive = full;
    no_archive.no_archive = true;
    no_archive.label = "evopref_noarchive";
    configs.push_back(no_archive);

    ExperimentConfig no_crossover = full;
    no_crossover.no_crossover = true;
    no_crossover.label = "evopref_nocrossover";
    configs.push_back(no_crossover);

    ExperimentConfig no_crowding = full;
    no_crowding.no_crowding = true;
    no_crowding.label = "evopref_nocrowding";
    configs.push_back(no_crowding);
    return configs;
}

BatteryReport run_battery(const std::vector<ExperimentConfig>& configs,
                          const BatteryOptions& options) {
    if (configs.empty())
        throw std::invalid_argument("battery needs at least one config");
    for (const auto& c : configs)
        c.validate();
    for (const auto& c : configs) {
        if (c.landscape.seed != configs[0].landscape.seed)
            throw std::invalid_argument(
                "battery configs must share the landscape seed so comparisons "
                "are paired on identical problem instances");
        if (c.seeds != configs[0].seeds)
            throw std::invalid_argument(
                "battery configs must share the seed list for paired tests");
    }

    BatteryReport report;
    report.labels.reserve(configs.size());
    {
        std::set<std::string> seen;
        for (const auto& c : configs) {
            const std::string label = config_label(c);
            if (!seen.insert(label).second)
                throw std::invalid_argument("duplicate battery label '" + label +
                                            "'; set distinct `label` values");
            report.labels.push_back(label);
        }
    }

    const std::vector<int>& seeds = configs[0].seeds;
    const std::size_t jobs = configs.size() * seeds.size();
    std::vector<RunSummary> summaries(jobs);
    std::vector<std::vector<GenerationRow>> all_rows(jobs);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs || failed.load())
                break;
            const std::size_t ci = i / seeds.size();
            const int seed = seeds[i % seeds.size()];
            try {
                const ExperimentConfig& config = configs[ci];
                const PreferenceLandscape landscape =
                    PreferenceLandscape::build(config.landscape);
                RunRecord record = run_algorithm(config, landscape, seed);
                if (options.write_outputs)
                    write_run_outputs(config, landscape, record,
                                      report.labels[ci]);
                RunSummary s;
                s.label = report.labels[ci];
                s.seed = seed;
                s.final_covered = record.final_covered;
                s.final_coverage_fraction = record.final_coverage_fraction;
                s.final_collapsed = record.final_collapsed;
                s.final_hypervolume = record.final_hypervolume;
                s.best_weighted =
                    record.rows.empty() ? 0.0 : record.last_row().best_weighted;
                s.evaluations_used = record.evaluations_used;
                summaries[i] = s;
                all_rows[i] = record.rows;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure_message.empty())
                    failure_message = e.what();
            }
        }
    };

    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failed.load())
        throw std::runtime_error("battery run failed: " + failure_message);

    report.runs.resize(configs.size());
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
        for (std::size_t si = 0; si < seeds.size(); ++si)
            report.runs[ci].push_back(summaries[ci * seeds.size() + si]);

    // Medians / IQR / collapse rate per label.
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        std::vector<double> cov, hv;
        int collapsed = 0;
        for (const auto& s : report.runs[ci]) {
            cov.push_back(s.final_covered);
            hv.push_back(s.final_hypervolume);
            collapsed += s.final_collapsed ? 1 : 0;
        }
        report.coverage_stats.push_back(median_iqr(cov));
        report.hypervolume_stats.push_back(median_iqr(hv));
        report.collapse_rates.push_back(static_cast<double>(collapsed) /
                                        report.runs[ci].size());
    }

    // Statistics: Friedman across >= 3 algorithms, pairwise Wilcoxon vs the
    // reference with Holm adjustment over the comparison family.
    report.reference = options.reference;
    if (std::find(report.labels.begin(), report.labels.end(), report.reference) ==
        report.labels.end())
        report.reference = report.labels.front();
    const std::size_t ref_index = static_cast<std::size_t>(
        std::find(report.labels.begin(), report.labels.end(), report.reference) -
        report.labels.begin());

    report.has_tests = configs.size() >= 2 && seeds.size() >= 5;
    if (report.has_tests) {
        if (configs.size() >= 3) {
            std::vector<std::vector<double>> matrix(seeds.size());
            for (std::size_t si = 0; si < seeds.size(); ++si)
                for (std::size_t ci = 0; ci < configs.size(); ++ci)
                    matrix[si].push_back(
                        report.runs[ci][si].final_covered);
            report.friedman = friedman_test(matrix);
        }
        std::vector<double> raw_p;
        for (std::size_t ci = 0; ci < configs.size(); ++ci) {
            if (ci == ref_index)
                continue;
            PairedSamples samples;
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                samples.a.push_back(report.runs[ref_index][si].final_covered);
                samples.b.push_back(report.runs[ci][si].final_covered);
            }
            PairwiseComparison cmp;
            cmp.baseline = report.labels[ci];
            const WilcoxonResult w = wilcoxon_signed_rank(samples);
            cmp.p_value = w.p_value;
            cmp.n_zero = w.n_zero;
            const EffectSize e = vargha_delaney_a12(samples.a, samples.b);
            cmp.a12 = e.a12;
            cmp.magnitude = to_string(e.magnitude);
            report.pairwise.push_back(cmp);
            raw_p.push_back(w.p_value);
        }
        const std::vector<double> adjusted = holm_correction(raw_p);
        for (std::size_t i = 0; i < report.pairwise.size(); ++i)
            report.pairwise[i].p_adjusted = adjusted[i];
    }

    // Text report.
    std::string text = "battery: " + std::to_string(configs.size()) +
                       " config(s) x " + std::to_string(seeds.size()) +
                       " seed(s), metric: covered modes (of " +
                       std::to_string(configs[0].landscape.modes) + ")\n\n";
    text += "label                     median   IQR             HV median  "
            "collapse\n";
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-25s %6.1f   [%5.1f, %5.1f]   %8.4f   %5.1f%%\n",
                      report.labels[ci].c_str(), report.coverage_stats[ci].median,
                      report.coverage_stats[ci].q1, report.coverage_stats[ci].q3,
                      report.hypervolume_stats[ci].median,
                      100.0 * report.collapse_rates[ci]);
        text += line;
    }
    if (report.has_tests && configs.size() >= 3) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "\nFriedman chi2(%d, N=%zu) = %.4f, p = %.6g\n",
                      report.friedman.df, seeds.size(), report.friedman.chi2,
                      report.friedman.p_value);
        text += line;
    }
    if (!report.pairwise.empty()) {
        text += "\n" + report.reference + " vs.        p-value     adj. p      "
                "A12    effect\n";
        for (const auto& cmp : report.pairwise) {
            char line[256];
            std::snprintf(line, sizeof(line),
                          "%-19s %10.6f  %10.6f  %5.3f  %s\n",
                          cmp.baseline.c_str(), cmp.p_value, cmp.p_adjusted,
                          cmp.a12, cmp.magnitude.c_str());
            text += line;
        }
    }
    report.report_text = text;

    if (options.write_outputs) {
        const fs::path out_dir =
            options.output_dir.empty() ? configs[0].output_dir
                                       : options.output_dir;
        fs::create_directories(out_dir);
        write_file(out_dir / "report.txt", text);

        std::string runs_csv =
            "label,seed,covered_modes,coverage_fraction,collapsed,hypervolume,"
            "best_weighted,evaluations\n";
        for (std::size_t ci = 0; ci < configs.size(); ++ci)
            for (const auto& s : report.runs[ci]) {
                runs_csv += s.label + "," + std::to_string(s.seed) + "," +
                            std::to_string(s.final_covered) + "," +
                            fmt(s.final_coverage_fraction) + "," +
                            (s.final_collapsed ? "1" : "0") + "," +
                            fmt(s.final_hypervolume) + "," +
                            fmt(s.best_weighted) + "," +
                            std::to_string(s.evaluations_used) + "\n";
            }
        write_file(out_dir / "runs.csv", runs_csv);

        std::string cmp_csv = "comparison,p_value,adjusted_p,a12,magnitude\n";
        for (const auto& cmp : report.pairwise)
            cmp_csv += report.reference + "_vs_" + cmp.baseline + "," +
                       fmt(cmp.p_value) + "," + fmt(cmp.p_adjusted) + "," +
                       fmt(cmp.a12) + "," + cmp.magnitude + "\n";
        write_file(out_dir / "comparisons.csv", cmp_csv);

        std::string med_csv =
            "label,coverage_median,coverage_q1,coverage_q3,hv_median,hv_q1,"
            "hv_q3,collapse_rate\n";
        for (std::size_t ci = 0; ci < configs.size(); ++ci) {
            const auto& c = report.coverage_stats[ci];
            const auto& h = report.hypervolume_stats[ci];
            med_csv += report.labels[ci] + "," + fmt(c.median) + "," +
                       fmt(c.q1) + "," + fmt(c.q3) + "," + fmt(h.median) + "," +
                       fmt(h.q1) + "," + fmt(h.q3) + "," +
                       fmt(report.collapse_rates[ci]) + "\n";
        }
        write_file(out_dir / "medians.csv", med_csv);

        // Hypervolume-vs-generation medians per label, backing the line plot.
        std::string curve_csv = "label,generation,median_hypervolume\n";
        for (std::size_t ci = 0; ci < configs.size(); ++ci) {
            std::map<int, std::vector<double>> by_gen;
            for (std::size_t si = 0; si < seeds.size(); ++si)
                for (const auto& row : all_rows[ci * seeds.size() + si])
                    by_gen[row.generation].push_back(row.hypervolume);
            for (const auto& [gen, values] : by_gen) {
                std::vector<double> copy = values;
                curve_csv += report.labels[ci] + "," + std::to_string(gen) +
                             "," + fmt(median_iqr(copy).median) + "\n";
            }
        }
        write_file(out_dir / "hv_curve.csv", curve_csv);
    }
    return report;
}

SweepReport sensitivity_sweep(const ExperimentConfig& base,
                              const std::string& parameter,
                              const std::vector<double>& values,
                              const BatteryOptions& options) {
    if (values.empty())
        throw std::invalid_argument("sweep needs at least one value");

    SweepReport sweep;
    sweep.parameter = parameter;
    sweep.values = values;

    double current = 0.0;
    auto apply = [&](ExperimentConfig& c, double v) {
        if (parameter == "sigma0") {
            c.sigma0 = v;
        } else if (parameter == "p_c" || parameter == "crossover_prob") {
            c.crossover_prob = v;
        } else if (parameter == "g" || parameter == "grid") {
            c.grid = static_cast<int>(v);
        } else if (parameter == "tournament_size") {
            c.tournament_size = static_cast<int>(v);
        } else {
            throw std::invalid_argument(
                "unknown sweep parameter '" + parameter +
                "' (expected sigma0 | p_c | g | tournament_size)");
        }
    };
    {
        ExperimentConfig probe = base;
        if (parameter == "sigma0")
            current = probe.sigma0;
        else if (parameter == "p_c" || parameter == "crossover_prob")
            current = probe.crossover_prob;
        else if (parameter == "g" || parameter == "grid")
            current = probe.grid;
        else if (parameter == "tournament_size")
            current = probe.tournament_size;
        else
            apply(probe, 0.0);  // raises the unknown-parameter error
    }

    std::vector<ExperimentConfig> configs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig c = base;
        c.algorithm = "evopref";
        apply(c, values[i]);
        char label[96];
        std::snprintf(label, sizeof(label), "%s_%g", parameter.c_str(),
                      values[i]);
        c.label = label;
        c.seeds.clear();
        for (int s = 1; s <= 15; ++s)  // n = 15 per sweep setting
            c.seeds.push_back(s);
        configs.push_back(c);
        if (values[i] == current)
            sweep.default_index = static_cast<int>(i);
    }

    BatteryOptions bopt = options;
    bopt.reference = config_label(configs.front());
    BatteryReport battery = run_battery(configs, bopt);

    std::string text = "sensitivity sweep over " + parameter +
                       " (n = 15 seeds per value; * marks the default)\n\n";
    text += "value        median covered   IQR\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        sweep.coverage.push_back(battery.coverage_stats[i]);
        char line[160];
        std::snprintf(line, sizeof(line), "%-10g%s  %6.1f          [%5.1f, %5.1f]\n",
                      values[i],
                      static_cast<int>(i) == sweep.default_index ? "*" : " ",
                      battery.coverage_stats[i].median,
                      battery.coverage_stats[i].q1, battery.coverage_stats[i].q3);
        text += line;
    }
    sweep.report_text = text;

    if (options.write_outputs) {
        const fs::path out_dir = options.output_dir.empty()
                                     ? fs::path(base.output_dir)
                                     : fs::path(options.output_dir);
        fs::create_directories(out_dir);
        write_file(out_dir / ("sweep_" + parameter + ".txt"), text);
        std::string csv = "value,is_default,median_covered,q1,q3\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            csv += fmt(values[i]) + "," +
                   (static_cast<int>(i) == sweep.default_index ? "1" : "0") +
                   "," + fmt(sweep.coverage[i].median) + "," +
                   fmt(sweep.coverage[i].q1) + "," + fmt(sweep.coverage[i].q3) +
                   "\n";
        write_file(out_dir / ("sweep_" + parameter + ".csv"), csv);
    }
    return sweep;
}

// ------------------------------------------------------------------ plots --

namespace {

struct SvgCanvas {
    std::string body;
    double width, height, margin;

    SvgCanvas(double w, double h, double m) : width(w), height(h), margin(m) {}

    double x(double v, double lo, double hi) const {
        return margin + (v - lo) / (hi - lo) * (width - 2 * margin);
    }
    double y(double v, double lo, double hi) const {
        return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin);
    }

    void circle(double cx, double cy, double r, const std::string& color) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\" "
                      "fill-opacity=\"0.7\"/>\n",
                      cx, cy, r, color.c_str());
        body += buf;
    }

    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& color) {
        body += "<polyline fill=\"none\" stroke=\"" + color +
                "\" stroke-width=\"1.5\" points=\"";
        char buf[64];
        for (const auto& [px, py] : pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px, py);
            body += buf;
        }
        body += "\"/>\n";
    }

    void text(double tx, double ty, const std::string& s,
              const std::string& anchor = "start") {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" "
                      "font-family=\"sans-serif\" text-anchor=\"%s\">%s</text>\n",
                      tx, ty, anchor.c_str(), s.c_str());
        body += buf;
    }

    void line(double x1, double y1, double x2, double y2) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                      "stroke=\"black\" stroke-width=\"1\"/>\n",
                      x1, y1, x2, y2);
        body += buf;
    }

    std::string finish() const {
        char head[160];
        std::snprintf(head, sizeof(head),
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                      "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                      width, height, width, height);
        return std::string(head) + body + "</svg>\n";
    }
};

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
        "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return colors;
}

}  // namespace

void emit_plots(const std::vector<RunRecord>& records,
                const std::string& output_dir) {
    if (records.empty())
        throw std::invalid_argument("emit_plots needs at least one run record");
    fs::create_directories(output_dir);
    const fs::path dir(output_dir);

    std::vector<std::string> algos;
    for (const auto& r : records)
        if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
            algos.push_back(r.algorithm);
    auto color_of = [&](const std::string& algo) {
        const std::size_t i =
            std::find(algos.begin(), algos.end(), algo) - algos.begin();
        return palette()[i % palette().size()];
    };

    // Scatter of final-set objective pairs (f1 vs f2).
    {
        SvgCanvas svg(520, 420, 50);
        svg.line(svg.x(0, 0, 1), svg.y(0, 0, 1), svg.x(1, 0, 1), svg.y(0, 0, 1));
        svg.line(svg.x(0, 0, 1), svg.y(0, 0, 1), svg.x(0, 0, 1), svg.y(1, 0, 1));
        for (double tick = 0.0; tick <= 1.001; tick += 0.25) {
            svg.text(svg.x(tick, 0, 1), svg.y(0, 0, 1) + 16, fmt4(tick), "middle");
            svg.text(svg.x(0, 0, 1) - 8, svg.y(tick, 0, 1) + 4, fmt4(tick), "end");
        }
        svg.text(svg.x(0.5, 0, 1), 414, "objective 1", "middle");
        svg.text(12, svg.y(0.5, 0, 1), "objective 2");
        std::string csv = "algorithm,seed,";
        const std::size_t m = records[0].final_set.empty()
                                  ? 3
                                  : records[0].final_set[0].objectives.size();
        for (std::size_t j = 0; j < m; ++j)
            csv += "f" + std::to_string(j + 1) + (j + 1 < m ? "," : "\n");
        for (const auto& rec : records) {
            for (const auto& e : rec.final_set) {
                if (e.objectives.size() >= 2)
                    svg.circle(svg.x(e.objectives[0], 0, 1),
                               svg.y(e.objectives[1], 0, 1), 2.4,
                               color_of(rec.algorithm));
                csv += rec.algorithm + "," + std::to_string(rec.seed);
                for (double v : e.objectives)
                    csv += "," + fmt(v);
                csv += "\n";
            }
        }
        double ly = 24;
        for (const auto& algo : algos) {
            svg.circle(470, ly - 4, 4, color_of(algo));
            svg.text(458, ly, algo, "end");
            ly += 16;
        }
        write_file(dir / "pareto.svg", svg.finish());
        write_file(dir / "pareto_points.csv", csv);
    }

    // Median hypervolume per generation per algorithm.
    {
        std::map<std::string, std::map<int, std::vector<double>>> curves;
        double hv_max = 0.0;
        int gen_max = 1;
        for (const auto& rec : records)
            for (const auto& row : rec.rows) {
                curves[rec.algorithm][row.generation].push_back(row.hypervolume);
                hv_max = std::max(hv_max, row.hypervolume);
                gen_max = std::max(gen_max, row.generation);
            }
        hv_max = std::max(hv_max * 1.05, 1e-9);

        SvgCanvas svg(520, 420, 50);
        svg.line(svg.x(0, 0, gen_max), svg.y(0, 0, hv_max),
                 svg.x(gen_max, 0, gen_max), svg.y(0, 0, hv_max));
        svg.line(svg.x(0, 0, gen_max), svg.y(0, 0, hv_max),
                 svg.x(0, 0, gen_max), svg.y(hv_max, 0, hv_max));
        svg.text(svg.x(gen_max / 2.0, 0, gen_max), 414, "generation", "middle");
        svg.text(12, svg.y(hv_max / 2.0, 0, hv_max), "hypervolume");
        std::string csv = "algorithm,generation,median_hypervolume\n";
        for (const auto& [algo, by_gen] : curves) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [gen, values] : by_gen) {
                std::vector<double> copy = values;
                const double med = median_iqr(copy).median;
                pts.emplace_back(svg.x(gen, 0, gen_max), svg.y(med, 0, hv_max));
                csv += algo + "," + std::to_string(gen) + "," + fmt(med) + "\n";
            }
            svg.polyline(pts, color_of(algo));
        }
        double ly = 24;
        for (const auto& algo : algos) {
            svg.circle(470, ly - 4, 4, color_of(algo));
            svg.text(458, ly, algo, "end");
            ly += 16;
        }
        write_file(dir / "hv_curve.svg", svg.finish());
        write_file(dir / "hv_curve.csv", csv);
    }
}

}  // namespace evopref
