#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slabperc/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace slabperc;
using nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stoi(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

// "lo:hi:step"
std::vector<double> parse_grid(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("--grid", "expected lo:hi:step");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (step <= 0 || hi < lo) throw CLI::ValidationError("--grid", "bad range");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double p = lo + i * step;
        if (p > hi + step / 2) break;
        out.push_back(p);
    }
    return out;
}

void write_manifest(const std::string& out_dir, const std::string& sub, const json& params,
                    std::uint64_t seed, const std::vector<std::string>& outputs,
                    const Timer& timer) {
    const json m = make_manifest(sub, params, seed, outputs, timer.seconds());
    write_text_file(join_path(out_dir, sub + "-manifest.json"), m.dump(2) + "\n");
}

std::uint64_t env_seed_override(std::uint64_t seed) {
    if (const char* env = std::getenv("SLABPERC_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slabperc: Monte Carlo and exact-enumeration laboratory for slab percolation"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (default: available parallelism)")
        ->each([&](const std::string& v) {
#ifdef _OPENMP
            const int n = std::stoi(v);
            if (n > 0) omp_set_num_threads(n);
#else
            (void)v;
#endif
        });

    int exit_code = 0;

    // ---- sample ----
    auto* sub_sample = app.add_subcommand("sample", "draw one configuration and dump it");
    struct {
        int k = 1;
        int n = 2;
        double p = 0.5;
        std::uint64_t seed = 1;
        std::uint64_t stream = 0;
        std::string out_dir = ".";
    } s_sample;
    sub_sample->add_option("--k", s_sample.k);
    sub_sample->add_option("--n", s_sample.n, "window is the box [-n,n]^2");
    sub_sample->add_option("--p", s_sample.p);
    sub_sample->add_option("--seed", s_sample.seed);
    sub_sample->add_option("--stream", s_sample.stream);
    sub_sample->add_option("--out-dir", s_sample.out_dir);
    sub_sample->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_sample.seed);
        SlabGeometry g(s_sample.k, PlanarBox{-s_sample.n, s_sample.n, -s_sample.n, s_sample.n});
        const Configuration c = sample(g, s_sample.p, {seed, s_sample.stream});
        const std::string out = join_path(s_sample.out_dir, "sample.json");
        write_text_file(out, dump_portable(g, c) + "\n");
        write_manifest(s_sample.out_dir, "sample",
                       {{"k", s_sample.k}, {"n", s_sample.n}, {"p", s_sample.p},
                        {"stream", s_sample.stream}},
                       seed, {"sample.json"}, timer);
    });

    // ---- crossing ----
    auto* sub_crossing = app.add_subcommand("crossing", "estimate a crossing event");
    struct {
        int k = 1, n = 8, u = 2, alpha = 0, beta = 8;
        double p = 0.5;
        long samples = 10000;
        std::uint64_t seed = 1;
        bool unique = false;
        std::string out_dir = ".";
    } s_cross;
    sub_crossing->add_option("--k", s_cross.k);
    sub_crossing->add_option("--n", s_cross.n);
    sub_crossing->add_option("--u", s_cross.u);
    sub_crossing->add_option("--alpha", s_cross.alpha);
    sub_crossing->add_option("--beta", s_cross.beta);
    sub_crossing->add_option("--p", s_cross.p);
    sub_crossing->add_option("--samples", s_cross.samples);
    sub_crossing->add_option("--seed", s_cross.seed);
    sub_crossing->add_flag("--unique", s_cross.unique, "uniqueness crossing to the box boundary");
    sub_crossing->add_option("--out-dir", s_cross.out_dir);
    sub_crossing->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_cross.seed);
        Estimate est;
        CsvRow row;
        if (s_cross.unique) {
            est = estimate_uniqueness_crossing(s_cross.k, s_cross.n, s_cross.u, s_cross.p,
                                               s_cross.samples, seed);
            row = estimate_row("uniqueness_crossing", s_cross.k, s_cross.n, est, s_cross.p);
        } else {
            est = estimate_crossing(s_cross.k, {s_cross.n, s_cross.alpha, s_cross.beta}, s_cross.u,
                                    s_cross.p, s_cross.samples, seed);
            row = estimate_row("crossing", s_cross.k, s_cross.n, est, s_cross.p);
            row.alpha = s_cross.alpha;
            row.beta = s_cross.beta;
        }
        row.u = s_cross.u;
        const std::string out = join_path(s_cross.out_dir, "crossing.csv");
        write_text_file(out, std::string(kCsvHeader) + "\n" + row.line() + "\n");
        write_manifest(s_cross.out_dir, "crossing",
                       {{"k", s_cross.k}, {"n", s_cross.n}, {"u", s_cross.u},
                        {"alpha", s_cross.alpha}, {"beta", s_cross.beta}, {"p", s_cross.p},
                        {"samples", s_cross.samples}, {"unique", s_cross.unique}},
                       seed, {"crossing.csv"}, timer);
    });

    // ---- sequences ----
    auto* sub_seq = app.add_subcommand("sequences", "build the scale sequences u_n, alpha_n, y_n");
    struct {
        int k = 1;
        std::string scales = "4,8,12";
        double p = 0.55, target = kDefaultSelectUTarget;
        long samples = 10000;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
        std::string svg;
    } s_seq;
    sub_seq->add_option("--k", s_seq.k);
    sub_seq->add_option("--scales", s_seq.scales);
    sub_seq->add_option("--p", s_seq.p);
    sub_seq->add_option("--target", s_seq.target);
    sub_seq->add_option("--samples", s_seq.samples);
    sub_seq->add_option("--seed", s_seq.seed);
    sub_seq->add_option("--out-dir", s_seq.out_dir);
    sub_seq->add_option("--svg", s_seq.svg, "write a probability-vs-n chart");
    sub_seq->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_seq.seed);
        const auto scales = parse_int_list(s_seq.scales);
        const SequenceTable table =
            build_sequences(s_seq.k, scales, s_seq.p, s_seq.target, s_seq.samples, seed);
        json j = sequence_json(table);
        int n_max = 0;
        for (int n : scales) n_max = std::max(n_max, n);
        j["feasible_scales"] = feasible_scales(table, n_max);
        std::vector<std::string> outputs = {"sequences.json", "sequences.csv"};
        write_text_file(join_path(s_seq.out_dir, "sequences.json"), j.dump(2) + "\n");
        std::string csv = std::string(kCsvHeader) + "\n";
        bool flagged = false;
        for (const auto& r : table.rows) {
            Estimate e;
            e.p_hat = r.u_estimate;
            e.n_samples = s_seq.samples;
            e.hits = static_cast<long>(r.u_estimate * static_cast<double>(s_seq.samples) + 0.5);
            e.ci_low = wilson_low(e.hits, e.n_samples);
            e.ci_high = wilson_high(e.hits, e.n_samples);
            e.seed = seed;
            e.streams = s_seq.samples;
            CsvRow row = estimate_row("sequence_uniqueness", s_seq.k, r.n, e, s_seq.p);
            row.u = r.u;
            row.alpha = r.alpha;
            csv += row.line() + "\n";
            flagged = flagged || r.u_flagged || r.alpha_flagged;
        }
        write_text_file(join_path(s_seq.out_dir, "sequences.csv"), csv);
        if (!s_seq.svg.empty()) {
            SvgSeries series{"uniqueness estimate", {}};
            for (const auto& r : table.rows)
                series.points.push_back({static_cast<double>(r.n), r.u_estimate});
            write_text_file(join_path(s_seq.out_dir, s_seq.svg),
                            svg_line_chart("uniqueness crossing vs scale", "n", "probability",
                                           {series}));
            outputs.push_back(s_seq.svg);
        }
        write_manifest(s_seq.out_dir, "sequences",
                       {{"k", s_seq.k}, {"scales", s_seq.scales}, {"p", s_seq.p},
                        {"target", s_seq.target}, {"samples", s_seq.samples}},
                       seed, outputs, timer);
        if (flagged) exit_code = 2;
    });

    // ---- triple ----
    auto* sub_triple = app.add_subcommand("triple", "joint three-arm estimate at scales n and 3n");
    struct {
        int k = 1, n = 4;
        double p = 0.55, target = kDefaultSelectUTarget;
        long samples = 10000;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
    } s_triple;
    sub_triple->add_option("--k", s_triple.k);
    sub_triple->add_option("--n", s_triple.n);
    sub_triple->add_option("--p", s_triple.p);
    sub_triple->add_option("--target", s_triple.target);
    sub_triple->add_option("--samples", s_triple.samples);
    sub_triple->add_option("--seed", s_triple.seed);
    sub_triple->add_option("--out-dir", s_triple.out_dir);
    sub_triple->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_triple.seed);
        const SequenceTable table = build_sequences(
            s_triple.k, {s_triple.n, 3 * s_triple.n}, s_triple.p, s_triple.target,
            s_triple.samples, seed);
        const TripleResult tr =
            estimate_triple(s_triple.k, s_triple.n, table, s_triple.p, s_triple.samples, seed);
        json j = {{"flagged", tr.flagged},
                  {"joint", estimate_json(tr.joint)},
                  {"arm_a", estimate_json(tr.arm_a)},
                  {"arm_minus", estimate_json(tr.arm_minus)},
                  {"arm_plus", estimate_json(tr.arm_plus)},
                  {"crossing_small", estimate_json(tr.crossing_small)},
                  {"harris_bound", tr.harris_bound},
                  {"sequences", sequence_json(table)}};
        write_text_file(join_path(s_triple.out_dir, "triple.json"), j.dump(2) + "\n");
        write_manifest(s_triple.out_dir, "triple",
                       {{"k", s_triple.k}, {"n", s_triple.n}, {"p", s_triple.p},
                        {"target", s_triple.target}, {"samples", s_triple.samples}},
                       seed, {"triple.json"}, timer);
        if (tr.flagged) exit_code = 2;
    });

    // ---- pc ----
    auto* sub_pc = app.add_subcommand("pc", "critical-point sweep via crossing-curve intersection");
    struct {
        int k = 0;
        std::string scales = "16,32";
        std::string grid = "0.45:0.55:0.005";
        long samples = 20000;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
        std::string svg;
    } s_pc;
    sub_pc->add_option("--k", s_pc.k);
    sub_pc->add_option("--scales", s_pc.scales);
    sub_pc->add_option("--grid", s_pc.grid);
    sub_pc->add_option("--samples", s_pc.samples);
    sub_pc->add_option("--seed", s_pc.seed);
    sub_pc->add_option("--out-dir", s_pc.out_dir);
    sub_pc->add_option("--svg", s_pc.svg, "write the crossing-probability curves");
    sub_pc->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_pc.seed);
        const auto scales = parse_int_list(s_pc.scales);
        const auto grid = parse_grid(s_pc.grid);
        const PcResult r = estimate_pc(s_pc.k, scales, grid, s_pc.samples, seed);
        std::vector<std::string> outputs = {"pc.json", "pc_curves.csv"};
        write_text_file(join_path(s_pc.out_dir, "pc.json"), pc_json(r).dump(2) + "\n");
        std::string csv = std::string(kCsvHeader) + "\n";
        for (const auto& curve : r.curves) {
            for (double p : grid) {
                const long hits = static_cast<long>(
                    std::lower_bound(curve.thresholds.begin(), curve.thresholds.end(), p) -
                    curve.thresholds.begin());
                const Estimate e = make_estimate(hits, s_pc.samples, seed);
                CsvRow row = estimate_row("pc_crossing", s_pc.k, curve.scale, e, p);
                csv += row.line() + "\n";
            }
        }
        write_text_file(join_path(s_pc.out_dir, "pc_curves.csv"), csv);
        if (!s_pc.svg.empty()) {
            std::vector<SvgSeries> series;
            for (const auto& curve : r.curves) {
                SvgSeries s{"L=" + std::to_string(curve.scale), {}};
                for (double p : grid) s.points.push_back({p, curve.probability_at(p)});
                series.push_back(std::move(s));
            }
            write_text_file(join_path(s_pc.out_dir, s_pc.svg),
                            svg_line_chart("crossing probability vs p", "p", "P[crossing]", series));
            outputs.push_back(s_pc.svg);
        }
        write_manifest(s_pc.out_dir, "pc",
                       {{"k", s_pc.k}, {"scales", s_pc.scales}, {"grid", s_pc.grid},
                        {"samples", s_pc.samples}},
                       seed, outputs, timer);
        if (r.flagged) exit_code = 2;
    });

    // ---- glue-audit ----
    auto* sub_glue = app.add_subcommand("glue-audit", "exhaustive gluing-surgery audit");
    struct {
        int k = 1;
        std::string window = "micro";
        std::string p = "1/2";
        std::string out_dir = ".";
    } s_glue;
    sub_glue->add_option("--k", s_glue.k);
    sub_glue->add_option("--window", s_glue.window, "micro or tiny");
    sub_glue->add_option("--p", s_glue.p, "rational a/b");
    sub_glue->add_option("--out-dir", s_glue.out_dir);
    sub_glue->callback([&] {
        Timer timer;
        if (s_glue.k != 1) throw CLI::ValidationError("--k", "the audit instances use k = 1");
        GluingInstance inst =
            s_glue.window == "tiny" ? micro_instance_tiny() : micro_instance();
        if (s_glue.window != "tiny" && s_glue.window != "micro")
            throw CLI::ValidationError("--window", "expected micro or tiny");
        inst.p = parse_rational(s_glue.p);
        const bool check_all = s_glue.window == "tiny";
        const MicroAuditReport rep = run_micro_audit(inst, check_all);
        write_text_file(join_path(s_glue.out_dir, "glue_audit.json"),
                        micro_report_json(rep).dump(2) + "\n");
        write_manifest(s_glue.out_dir, "glue-audit",
                       {{"k", s_glue.k}, {"window", s_glue.window}, {"p", s_glue.p}},
                       0, {"glue_audit.json"}, timer);
        if (rep.zero_violations() != 0) exit_code = 1;
    });

    // ---- renorm-cert ----
    auto* sub_cert = app.add_subcommand("renorm-cert", "good-edge certificate at a block scale");
    struct {
        int k = 1, n = 4, u3n = -1;
        double p = 0.6;
        long samples = 100000;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
    } s_cert;
    sub_cert->add_option("--k", s_cert.k);
    sub_cert->add_option("--n", s_cert.n);
    sub_cert->add_option("--u3n", s_cert.u3n, "central box scale (default: from select_u at 3n)");
    sub_cert->add_option("--p", s_cert.p);
    sub_cert->add_option("--samples", s_cert.samples);
    sub_cert->add_option("--seed", s_cert.seed);
    sub_cert->add_option("--out-dir", s_cert.out_dir);
    sub_cert->callback([&] {
        Timer timer;
        const auto seed = env_seed_override(s_cert.seed);
        int u3n = s_cert.u3n;
        if (u3n < 0) {
            const long probe = std::max(1000L, s_cert.samples / 10);
            u3n = select_u(s_cert.k, 3 * s_cert.n, s_cert.p, kDefaultSelectUTarget, probe, seed + 17).u;
        }
        const Certificate cert = certify(s_cert.k, s_cert.n, u3n, s_cert.p, s_cert.samples, seed);
        write_text_file(join_path(s_cert.out_dir, "certificate.json"),
                        certificate_json(cert).dump(2) + "\n");
        write_manifest(s_cert.out_dir, "renorm-cert",
                       {{"k", s_cert.k}, {"n", s_cert.n}, {"u3n", u3n}, {"p", s_cert.p},
                        {"samples", s_cert.samples}},
                       seed, {"certificate.json"}, timer);
    });

    // ---- oracle-freeze ----
    auto* sub_freeze = app.add_subcommand("oracle-freeze", "recompute the frozen exact-value table");
    struct {
        std::string out = "data/oracle_frozen.json";
        std::string out_dir = ".";
    } s_freeze;
    sub_freeze->add_option("--out", s_freeze.out);
    sub_freeze->add_option("--out-dir", s_freeze.out_dir);
    sub_freeze->callback([&] {
        Timer timer;
        json table = json::object();
        for (const FrozenEventSpec& spec : frozen_event_table())
            table[spec.id] = frozen_exact(spec).as_fraction();
        write_text_file(s_freeze.out, table.dump(2) + "\n");
        write_manifest(s_freeze.out_dir, "oracle-freeze", {{"out", s_freeze.out}}, 0,
                       {s_freeze.out}, timer);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
