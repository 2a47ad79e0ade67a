// Command-line front end: run scenarios, analyze traces, print per-node
// packet tables. Exit codes: 0 ok, 1 usage, 2 scenario error, 3 trace or
// conservation error.

#include "manetsim/manetsim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitScenario = 2;
constexpr int kExitTrace = 3;

using namespace manetsim;

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_override, int batch_seeds, bool dump_positions) {
    ScenarioConfig cfg;
    try {
        cfg = parse_scenario(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScenario;
    }
    if (seed_override) cfg.seed = *seed_override;

    if (batch_seeds > 1) {
        std::cout << "seed,events,originated,delivered,pdf,blocks\n";
        for (int k = 0; k < batch_seeds; ++k) {
            ScenarioConfig c = cfg;
            c.seed = cfg.seed + static_cast<std::uint64_t>(k);
            std::string path = out_path;
            if (auto dot = path.rfind(".tr"); dot != std::string::npos && dot == path.size() - 3)
                path = path.substr(0, dot) + "-s" + std::to_string(c.seed) + ".tr";
            else
                path += "-s" + std::to_string(c.seed);
            std::ofstream out(path, std::ios::trunc);
            if (!out) {
                std::cerr << "error: cannot open " << path << "\n";
                return kExitTrace;
            }
            Simulation sim(c, out, dump_positions);
            RunStats st = sim.run();
            double pdf = st.originated_data
                             ? 100.0 * static_cast<double>(st.delivered_data) /
                                   static_cast<double>(st.originated_data)
                             : 0.0;
            std::printf("%llu,%llu,%llu,%llu,%.2f,%zu\n", (unsigned long long)c.seed,
                        (unsigned long long)st.executed_events, (unsigned long long)st.originated_data,
                        (unsigned long long)st.delivered_data, pdf, st.blocks.size());
        }
        return kExitOk;
    }

    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot open " << out_path << "\n";
        return kExitTrace;
    }
    try {
        Simulation sim(cfg, out, dump_positions);
        RunStats st = sim.run();
        double pdf = st.originated_data ? 100.0 * static_cast<double>(st.delivered_data) /
                                              static_cast<double>(st.originated_data)
                                        : 0.0;
        std::printf("events=%llu originated=%llu delivered=%llu pdf=%.2f%% drops=%llu blocks=%zu\n",
                    (unsigned long long)st.executed_events, (unsigned long long)st.originated_data,
                    (unsigned long long)st.delivered_data, pdf, (unsigned long long)st.dropped,
                    st.blocks.size());
        for (const auto& b : st.blocks)
            std::printf("block node=%d at=%s by=%d reason=%s\n", b.blocked, b.at.to_string().c_str(),
                        b.ids_node, std::string(block_reason_token(b.reason)).c_str());
        if (st.floods_sent)
            std::printf("flood sent=%llu accepted=%llu removed=%llu\n",
                        (unsigned long long)st.floods_sent, (unsigned long long)st.floods_accepted,
                        (unsigned long long)st.infection_removals);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScenario;
    }
    return kExitOk;
}

bool write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::trunc);
    f << content;
    return static_cast<bool>(f);
}

int cmd_analyze(const std::string& trace_path, bool want_pdf, bool want_throughput, bool want_nrl,
                bool want_delay, bool want_infection, double bin, const std::string& csv_dir) {
    std::vector<TraceRecord> trace;
    try {
        trace = TraceReader::read_file(trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTrace;
    }
    auto violations = metrics::conservation_check(trace);
    if (!violations.empty()) {
        std::cerr << "conservation check failed (" << violations.size() << " packets):\n";
        for (std::size_t i = 0; i < violations.size() && i < 10; ++i)
            std::cerr << "  pkt " << violations[i].pkt_id << ": " << violations[i].what << "\n";
        return kExitTrace;
    }

    bool all = !(want_pdf || want_throughput || want_nrl || want_delay || want_infection);
    std::string summary = "metric,value\n";
    auto emit = [&](const char* name, std::optional<double> v, const char* why_na) {
        if (v)
            std::printf("%s = %.4f\n", name, *v);
        else
            std::printf("%s = NA (%s)\n", name, why_na);
        summary += std::string(name) + "," + (v ? std::to_string(*v) : "NA") + "\n";
    };
    if (all || want_pdf) emit("pdf", metrics::pdf(trace), "no data originations in trace");
    if (all || want_nrl) emit("nrl", metrics::nrl(trace), "no data deliveries in trace");
    if (all || want_delay)
        emit("avg_delay_s", metrics::avg_end_to_end_delay(trace), "no data deliveries in trace");

    std::vector<metrics::SeriesPoint> thr, inf;
    if (all || want_throughput) {
        thr = metrics::throughput_series(trace, bin);
        double peak = 0;
        for (const auto& p : thr) peak = std::max(peak, p.value);
        std::printf("throughput: %zu bins of %.2fs, peak %.2f pkts/s\n", thr.size(), bin, peak);
    }
    if (all || want_infection) {
        inf = metrics::infection_series(trace, bin);
        double peak = 0;
        for (const auto& p : inf) peak = std::max(peak, p.value);
        std::printf("infection: %zu bins of %.2fs, peak %.2f%%\n", inf.size(), bin, peak);
        if (auto t = metrics::last_block_time(trace))
            std::printf("last block at %.3fs\n", *t);
    }

    if (!csv_dir.empty()) {
        std::filesystem::path dir(csv_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        bool ok = write_file(dir / "summary.csv", summary);
        if (all || want_throughput) ok = ok && write_file(dir / "throughput.csv", metrics::series_csv(thr));
        if (all || want_infection) ok = ok && write_file(dir / "infection.csv", metrics::series_csv(inf));
        if (!ok) {
            std::cerr << "error: cannot write CSV files under " << csv_dir << "\n";
            return kExitTrace;
        }
    }
    return kExitOk;
}

int cmd_tables(const std::string& trace_path, const std::string& csv_dir) {
    std::vector<TraceRecord> trace;
    try {
        trace = TraceReader::read_file(trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTrace;
    }
    metrics::PerNodeTables tables = metrics::per_node_tables(trace);
    if (tables.tcp_data.total_sent == 0 && tables.tcp_ack.total_sent == 0)
        std::printf("no TCP traffic in trace\n");
    std::fputs(metrics::format_tables_text(tables).c_str(), stdout);
    if (!csv_dir.empty()) {
        std::filesystem::path dir(csv_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (!write_file(dir / "tcp_data.csv", metrics::data_table_csv(tables.tcp_data)) ||
            !write_file(dir / "tcp_ack.csv", metrics::ack_table_csv(tables.tcp_ack))) {
            std::cerr << "error: cannot write CSV files under " << csv_dir << "\n";
            return kExitTrace;
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"manetsim: deterministic MANET simulator with a selfish-node attack and IDS defense"};
    app.require_subcommand(1);

    std::string scenario_path, trace_out = "out.tr";
    std::optional<std::uint64_t> seed_override;
    int batch_seeds = 1;
    bool dump_positions = false;
    auto* run = app.add_subcommand("run", "run a scenario and write a trace");
    run->add_option("scenario", scenario_path, "scenario file (.scn)")->required();
    run->add_option("-o,--out", trace_out, "trace output path");
    std::uint64_t seed_value = 0;
    auto* seed_opt = run->add_option("--seed", seed_value, "override the scenario seed");
    run->add_option("--seeds", batch_seeds, "run N consecutive seeds, one summary row each");
    run->add_flag("--dump-positions", dump_positions, "log node positions each update interval");

    std::string trace_in, csv_dir;
    double bin = 1.0;
    bool want_pdf = false, want_throughput = false, want_nrl = false, want_delay = false,
         want_infection = false;
    auto* analyze = app.add_subcommand("analyze", "compute metrics from a trace");
    analyze->add_option("trace", trace_in, "trace file (.tr)")->required();
    analyze->add_flag("--pdf", want_pdf, "packet delivery fraction");
    analyze->add_flag("--throughput", want_throughput, "deliveries per second series");
    analyze->add_flag("--nrl", want_nrl, "normalized routing load");
    analyze->add_flag("--delay", want_delay, "average end-to-end delay");
    analyze->add_flag("--infection", want_infection, "infection percentage series");
    analyze->add_option("--bin", bin, "series bin width in seconds");
    analyze->add_option("--csv", csv_dir, "directory for CSV output");

    std::string tbl_trace, tbl_csv;
    auto* tables = app.add_subcommand("tables", "per-node TCP data/ack tables from a trace");
    tables->add_option("trace", tbl_trace, "trace file (.tr)")->required();
    tables->add_option("--csv", tbl_csv, "directory for CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (run->parsed())
        return cmd_run(scenario_path, trace_out, seed_opt->count() ? std::optional(seed_value) : std::nullopt,
                       batch_seeds, dump_positions);
    if (analyze->parsed())
        return cmd_analyze(trace_in, want_pdf, want_throughput, want_nrl, want_delay, want_infection,
                           bin, csv_dir);
    if (tables->parsed()) return cmd_tables(tbl_trace, tbl_csv);
    return kExitUsage;
}
