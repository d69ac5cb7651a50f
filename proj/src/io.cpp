#include "slabperc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slabperc {

std::string fmt_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string CsvRow::line() const {
    std::ostringstream os;
    os << event_id << "," << k << "," << n << ",";
    if (u) os << *u;
    os << ",";
    if (alpha) os << *alpha;
    os << ",";
    if (beta) os << *beta;
    os << "," << fmt_g9(p) << "," << n_samples << "," << fmt_g9(p_hat) << "," << fmt_g9(ci_low)
       << "," << fmt_g9(ci_high) << "," << seed << "," << streams;
    return os.str();
}

CsvRow estimate_row(const std::string& event_id, int k, int n, const Estimate& e, double p) {
    CsvRow row;
    row.event_id = event_id;
    row.k = k;
    row.n = n;
    row.p = p;
    row.n_samples = e.n_samples;
    row.p_hat = e.p_hat;
    row.ci_low = e.ci_low;
    row.ci_high = e.ci_high;
    row.seed = e.seed;
    row.streams = e.streams;
    return row;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series) {
    const int W = 640, H = 420, ML = 60, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (ymin > ymax) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
       << H - MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = xmin + (xmax - xmin) * i / 4.0;
        const double y = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << H - MB + 18
           << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_g9(x) << "</text>\n";
        os << "<text x=\"" << ML - 6 << "\" y=\"" << py(y) + 4
           << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_g9(y) << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << H / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
       << ")\">" << y_label << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[si % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[si].points) os << px(x) << "," << py(y) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << W - MR - 6 << "\" y=\"" << MT + 16 + 16 * static_cast<int>(si)
           << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[si % 5] << "\">"
           << series[si].name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

nlohmann::json estimate_json(const Estimate& e) {
    return {{"p_hat", e.p_hat}, {"n", e.n_samples},   {"hits", e.hits},
            {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"seed", e.seed},
            {"streams", e.streams}};
}

nlohmann::json certificate_json(const Certificate& c) {
    return {{"k", c.k},
            {"n", c.n},
            {"p", c.p},
            {"N", c.n_samples},
            {"u3n", c.u3n},
            {"eta", c.eta},
            {"eta_derivation", {{"series_bound", c.series_bound}}},
            {"estimate", c.estimate.p_hat},
            {"ci", {c.estimate.ci_low, c.estimate.ci_high}},
            {"dependent_edges", c.dependent_edges},
            {"note", "the event depends only on the state of the edges in a finite box"},
            {"verdict", c.pass ? "pass" : "fail"}};
}

nlohmann::json eta_json(const EtaDerivation& d) {
    return {{"eta", d.eta},
            {"series_bound", d.series_bound},
            {"cutoff", d.cutoff},
            {"tail_bound", d.tail_bound},
            {"exponent_rule", d.exponent_rule},
            {"contour_count_bound", d.contour_count_bound}};
}

nlohmann::json lemma5_json(const Lemma5Report& r) {
    return {{"count_A", r.count_A},
            {"count_B", r.count_B},
            {"weight_A", r.weight_A.str()},
            {"weight_B", r.weight_B.str()},
            {"denominator", r.denominator.str()},
            {"s_given", r.s_given},
            {"t_given", r.t_given},
            {"s_tight", r.s_tight},
            {"t_tight", r.t_tight},
            {"hyp_images_in_B", r.hyp_images_in_B},
            {"hyp_multiplicity", r.hyp_multiplicity},
            {"hyp_locality", r.hyp_locality},
            {"conclusion_holds", r.conclusion_holds},
            {"conclusion_tight_holds", r.conclusion_tight_holds},
            {"witnesses", r.witnesses}};
}

nlohmann::json micro_report_json(const MicroAuditReport& r) {
    nlohmann::json inst = {
        {"k", r.instance.k},
        {"window",
         {r.instance.window.xmin, r.instance.window.xmax, r.instance.window.ymin,
          r.instance.window.ymax}},
        {"R", r.instance.R},
        {"p", std::to_string(r.instance.p.num) + "/" + std::to_string(r.instance.p.den)}};
    return {{"instance", inst},
            {"configs", r.configs},
            {"count_A", r.count_A},
            {"count_arms", r.count_arms},
            {"count_X", r.count_X},
            {"count_target", r.count_target},
            {"count_no_two_arms", r.count_no_two_arms},
            {"min_U", r.min_U},
            {"max_U", r.max_U},
            {"s_fact1", r.s_fact1},
            {"s_fact1_tight", r.s_fact1_tight},
            {"s_fact2", r.s_fact2},
            {"s_fact2_tight", r.s_fact2_tight},
            {"t_fact2", r.t_fact2},
            {"weight_X", r.weight_X.str()},
            {"weight_no_two_arms", r.weight_no_two_arms.str()},
            {"weight_target", r.weight_target.str()},
            {"denominator", r.denominator.str()},
            {"fact1_inequality", r.fact1_inequality},
            {"fact2_inequality", r.fact2_inequality},
            {"minpath_checked", r.minpath_checked},
            {"violations",
             {{"minpath", r.violations_minpath},
              {"fact1_arms", r.violations_fact1},
              {"phi_invariance", r.violations_phi_invariance},
              {"fact1_locality", r.violations_fact1_locality},
              {"psi_construct", r.violations_psi_construct},
              {"psi_target", r.violations_psi_target},
              {"psi_injective", r.violations_psi_injective},
              {"psi_locality", r.violations_psi_locality},
              {"psi_stability", r.violations_psi_stability},
              {"psi_marked_site", r.violations_psi_marked_site}}},
            {"total_violations", r.zero_violations()},
            {"witnesses", r.witnesses}};
}

nlohmann::json surgery_record_json(const SurgeryRecord& r) {
    return {{"source_config", r.source_config},
            {"gamma_min", r.gamma_min},
            {"z", {r.z.x, r.z.y}},
            {"z_site", r.z_site},
            {"u", r.u},
            {"v", r.v},
            {"w", r.w},
            {"u_prime", r.u_prime},
            {"v_prime", r.v_prime},
            {"w_prime", r.w_prime},
            {"path_u", r.path_u},
            {"path_v", r.path_v},
            {"path_w", r.path_w},
            {"pi", r.pi},
            {"opened", r.opened},
            {"closed", r.closed}};
}

nlohmann::json pc_json(const PcResult& r) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : r.curves) {
        nlohmann::json vals = nlohmann::json::array();
        for (double p : r.grid) vals.push_back(c.probability_at(p));
        curves.push_back({{"scale", c.scale}, {"values", vals}});
    }
    return {{"pc", r.pc},
            {"ci_low", r.ci_low},
            {"ci_high", r.ci_high},
            {"flagged", r.flagged},
            {"grid", r.grid},
            {"pair_estimates", r.pair_estimates},
            {"curves", curves}};
}

nlohmann::json sequence_json(const SequenceTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"n", r.n},
                        {"u", r.u},
                        {"alpha", r.alpha},
                        {"y", r.y},
                        {"u_flagged", r.u_flagged},
                        {"alpha_flagged", r.alpha_flagged},
                        {"u_estimate", r.u_estimate},
                        {"alpha_left", r.alpha_left},
                        {"alpha_right", r.alpha_right},
                        {"y_estimate", r.y_estimate}});
    }
    return {{"rows", rows}};
}

nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& params,
                             std::uint64_t master_seed, const std::vector<std::string>& outputs,
                             double wall_clock_sec) {
    return {{"schema_version", 1},
            {"artifact_version", kArtifactVersion},
            {"subcommand", subcommand},
            {"params", params},
            {"master_seed", master_seed},
            {"outputs", outputs},
            {"wall_clock_sec", wall_clock_sec}};
}

}  // namespace slabperc
