// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the shipped scenario presets end to end and checks the
// attack/defense outcomes, the property suite, and the runtime bounds.

#include "manetsim/manetsim.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef MANETSIM_SCENARIO_DIR
#define MANETSIM_SCENARIO_DIR "scenarios"
#endif

using namespace manetsim;

namespace {

struct Run {
    ScenarioConfig cfg;
    std::unique_ptr<std::ostringstream> out;
    std::unique_ptr<Simulation> sim;
    RunStats stats;
    std::vector<TraceRecord> records;
    std::string text;
    double wall = 0.0;
};

Run run_scenario(const std::string& name, std::uint64_t seed, bool dump_positions = false) {
    Run r;
    r.cfg = parse_scenario(std::string(MANETSIM_SCENARIO_DIR) + "/" + name);
    r.cfg.seed = seed;
    r.out = std::make_unique<std::ostringstream>();
    r.sim = std::make_unique<Simulation>(r.cfg, *r.out, dump_positions);
    auto start = std::chrono::steady_clock::now();
    r.stats = r.sim->run();
    r.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.text = r.out->str();
    std::istringstream in(r.text);
    r.records = TraceReader::read_stream(in);
    return r;
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double pdf_of(const Run& r) {
    auto v = metrics::pdf(r.records);
    return v ? *v : -1.0;
}

std::uint64_t routing_tx(const std::vector<TraceRecord>& records) {
    std::uint64_t n = 0;
    for (const TraceRecord& rec : records)
        if (metrics::is_routing_token(rec.kind) && (rec.action == 's' || rec.action == 'f')) ++n;
    return n;
}

std::vector<Position> layout_of(const ScenarioConfig& cfg) {
    std::vector<Position> layout = grid_positions(cfg.node_count, cfg.area_width, cfg.area_height);
    for (const auto& [id, p] : cfg.positions) layout[static_cast<std::size_t>(id)] = p;
    return layout;
}

// Positions at a given instant, recovered from `m` records in the trace.
std::map<NodeId, Position> positions_at(const std::vector<TraceRecord>& records, double t) {
    std::map<NodeId, Position> out;
    SimTime want = SimTime::from_seconds(t);
    for (const TraceRecord& rec : records) {
        if (rec.action != 'm' || rec.time != want) continue;
        Position p{};
        if (std::sscanf(rec.reason.c_str(), "%lf:%lf", &p.x, &p.y) == 2) out[rec.node] = p;
    }
    return out;
}

} // namespace

int main() {
    std::printf("manetsim acceptance suite (scenarios: %s)\n", MANETSIM_SCENARIO_DIR);

    Run baseline = run_scenario("baseline.scn", 1);
    Run attack = run_scenario("attack.scn", 1);
    Run ids = run_scenario("ids.scn", 1);

    const double baseline_pdf = pdf_of(baseline);
    const double attack_pdf = pdf_of(attack);
    const double ids_pdf = pdf_of(ids);

    // ---- 1. baseline sanity -------------------------------------------------
    {
        auto nrl = metrics::nrl(baseline.records);
        bool pdf_exact = baseline.stats.originated_data > 0 &&
                         baseline.stats.delivered_data == baseline.stats.originated_data &&
                         baseline_pdf == 100.0;
        bool nrl_pos = nrl.has_value() && *nrl > 0.0;
        std::vector<Position> layout = layout_of(baseline.cfg);
        bool hops_ok = true;
        int checked = 0;
        for (const Connection& c : baseline.cfg.traffic) {
            auto oracle = testutil::bfs_hops(layout, baseline.cfg.radio.rr, c.source);
            const RoutingTableEntry* e = baseline.sim->routing_table(c.source).find(c.sink);
            if (!e || !e->valid ||
                e->hop_count != static_cast<std::uint32_t>(oracle[static_cast<std::size_t>(c.sink)])) {
                hops_ok = false;
            }
            ++checked;
        }
        report(1, "baseline sanity", pdf_exact && nrl_pos && hops_ok && baseline.wall < 5.0,
               fmt("pdf=%.2f%% (exact=%d) nrl=%.3f bfs-matched=%d/%d runtime=%.2fs", baseline_pdf,
                   pdf_exact ? 1 : 0, nrl ? *nrl : -1.0, hops_ok ? checked : -1, checked,
                   baseline.wall));
    }

    // ---- 2. attack collapse -------------------------------------------------
    {
        bool ok = attack_pdf >= 0 && attack_pdf <= 25.0 && (baseline_pdf - attack_pdf) >= 40.0 &&
                  attack.wall < 10.0;
        report(2, "attack collapse", ok,
               fmt("attack pdf=%.2f%% (<=25), baseline-attack gap=%.2f points (>=40), runtime=%.2fs",
                   attack_pdf, baseline_pdf - attack_pdf, attack.wall));
    }

    // ---- 3. defended recovery -----------------------------------------------
    {
        bool ok = ids_pdf >= 82.0 && ids_pdf >= 3.0 * attack_pdf;
        report(3, "defended recovery", ok,
               fmt("ids pdf=%.2f%% (>=82, >=3x attack %.2f%%)", ids_pdf, attack_pdf));
    }

    // ---- 4. infection peak and post-block silence ----------------------------
    {
        auto attack_inf = metrics::infection_series(attack.records, 1.0);
        double peak = 0;
        for (const auto& p : attack_inf) peak = std::max(peak, p.value);
        auto last_block = metrics::last_block_time(ids.records);
        auto ids_inf = metrics::infection_series(ids.records, 1.0);
        bool silent = last_block.has_value();
        double worst_after = 0.0;
        if (last_block) {
            for (const auto& p : ids_inf) {
                if (p.bin_start > *last_block && p.value != 0.0) {
                    silent = false;
                    worst_after = std::max(worst_after, p.value);
                }
            }
        }
        bool ok = peak >= 30.0 && silent;
        report(4, "infection", ok,
               fmt("attack peak=%.1f%% (>=30), last block=%.3fs, post-block worst=%.3f%% (==0)",
                   peak, last_block ? *last_block : -1.0, worst_after));
    }

    // ---- 5. routing-load ratio -----------------------------------------------
    {
        std::uint64_t ids_tx = routing_tx(ids.records);
        std::uint64_t attack_tx = routing_tx(attack.records);
        bool ok = attack_tx > 0 && ids_tx >= 4 * attack_tx;
        report(5, "routing-load ratio", ok,
               fmt("ids routing tx=%llu vs attack=%llu (ratio=%.2f, >=4)",
                   (unsigned long long)ids_tx, (unsigned long long)attack_tx,
                   attack_tx ? double(ids_tx) / double(attack_tx) : -1.0));
    }

    // ---- 6. ack starvation and table shapes ----------------------------------
    {
        auto at = metrics::per_node_tables(attack.records);
        auto it = metrics::per_node_tables(ids.records);
        double attack_ratio = at.tcp_data.total_sent
                                  ? double(at.tcp_ack.total_received) / double(at.tcp_data.total_sent)
                                  : 1.0;
        double ids_ratio = it.tcp_data.total_sent
                               ? double(it.tcp_ack.total_received) / double(it.tcp_data.total_sent)
                               : 0.0;
        std::string data_csv = metrics::data_table_csv(it.tcp_data);
        std::string ack_csv = metrics::ack_table_csv(it.tcp_ack);
        bool shapes = data_csv.rfind("sender,sent,receiver,received,dropper,dropped\n", 0) == 0 &&
                      ack_csv.rfind("receiver,received,dropper,dropped\n", 0) == 0 &&
                      data_csv.find("\ntotal,") != std::string::npos &&
                      ack_csv.find("\ntotal,") != std::string::npos;
        bool ok = attack_ratio <= 0.30 && ids_ratio >= 0.85 && shapes;
        report(6, "ack starvation", ok,
               fmt("attack acks/data=%.3f (<=0.30: %llu/%llu), ids=%.3f (>=0.85: %llu/%llu), shapes=%d",
                   attack_ratio, (unsigned long long)at.tcp_ack.total_received,
                   (unsigned long long)at.tcp_data.total_sent, ids_ratio,
                   (unsigned long long)it.tcp_ack.total_received,
                   (unsigned long long)it.tcp_data.total_sent, shapes ? 1 : 0));
    }

    // ---- 7. detection correctness across 20 seeds ----------------------------
    {
        auto start = std::chrono::steady_clock::now();
        int bad_seeds = 0;
        std::string first_bad;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Run r = run_scenario("ids.scn", seed, /*dump_positions=*/true);
            double burst_t = r.cfg.adversary.flood_start;
            double window = r.cfg.ids.window_len;
            auto pos = positions_at(r.records, burst_t);
            bool seed_ok = true;
            std::string why;
            for (NodeId s : r.cfg.selfish) {
                NodeId mon = *r.cfg.ids_nodes.begin();
                if (!pos.count(s) || !pos.count(mon)) {
                    seed_ok = false;
                    why = "missing position samples";
                    break;
                }
                if (!in_range(pos[mon], pos[s], r.cfg.radio)) continue; // out of range: exempt
                bool blocked_in_time = false;
                for (const auto& b : r.stats.blocks)
                    if (b.blocked == s && b.at.seconds() <= burst_t + window) blocked_in_time = true;
                if (!blocked_in_time) {
                    seed_ok = false;
                    why = fmt("selfish %d in range but not blocked within the window", s);
                }
            }
            for (const auto& b : r.stats.blocks) {
                if (!r.cfg.selfish.count(b.blocked)) {
                    seed_ok = false;
                    why = fmt("normal node %d blocked (%s)", b.blocked,
                              std::string(block_reason_token(b.reason)).c_str());
                }
            }
            if (!seed_ok) {
                ++bad_seeds;
                if (first_bad.empty()) first_bad = fmt("seed %llu: %s", (unsigned long long)seed, why.c_str());
            }
        }
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(7, "detection correctness (20 seeds)", bad_seeds == 0,
               bad_seeds == 0 ? fmt("all seeds clean (%.1fs)", wall)
                              : fmt("%d bad seeds; first: %s", bad_seeds, first_bad.c_str()));
    }

    // ---- 8. determinism and conservation property suite -----------------------
    {
        auto start = std::chrono::steady_clock::now();
        Run attack2 = run_scenario("attack.scn", 1);
        bool deterministic = attack2.text == attack.text;

        bool conserved = true;
        std::string cons_detail;
        for (const auto* r : {&baseline, &attack, &ids}) {
            auto violations = metrics::conservation_check(r->records);
            if (!violations.empty()) {
                conserved = false;
                cons_detail = fmt("pkt %llu: %s", (unsigned long long)violations[0].pkt_id,
                                  violations[0].what.c_str());
            }
        }

        bool monotone = true;
        for (const auto* r : {&baseline, &attack, &ids})
            for (std::size_t i = 1; i < r->records.size(); ++i)
                if (r->records[i].time < r->records[i - 1].time) monotone = false;

        // flood termination: each discovery's flood id is transmitted at most
        // node_count times (origination plus one rebroadcast per node)
        bool floods_bounded = true;
        for (const auto* r : {&baseline, &attack, &ids}) {
            std::map<std::uint64_t, std::uint64_t> tx;
            for (const TraceRecord& rec : r->records)
                if (rec.kind == "Rreq" && (rec.action == 's' || rec.action == 'f')) ++tx[rec.pkt_id];
            for (const auto& [id, n] : tx)
                if (n > static_cast<std::uint64_t>(r->cfg.node_count)) floods_bounded = false;
        }
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = deterministic && conserved && monotone && floods_bounded && wall < 60.0;
        report(8, "determinism and conservation", ok,
               fmt("deterministic=%d conserved=%d%s monotone=%d floods_bounded=%d (%.1fs < 60s)",
                   deterministic ? 1 : 0, conserved ? 1 : 0,
                   cons_detail.empty() ? "" : (" [" + cons_detail + "]").c_str(), monotone ? 1 : 0,
                   floods_bounded ? 1 : 0, wall));
    }

    std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
