#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/gluing.hpp"
#include "slabperc/renorm.hpp"

namespace slabperc {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Floats in CSV output carry 9 significant digits.
std::string fmt_g9(double v);

inline constexpr const char* kCsvHeader =
    "event_id,k,n,u,alpha,beta,p,N,p_hat,ci_low,ci_high,seed,streams";

struct CsvRow {
    std::string event_id;
    int k = 0;
    int n = 0;
    std::optional<int> u, alpha, beta;
    double p = 0.0;
    long n_samples = 0;
    double p_hat = 0.0, ci_low = 0.0, ci_high = 0.0;
    std::uint64_t seed = 0;
    long streams = 0;

    std::string line() const;
};

CsvRow estimate_row(const std::string& event_id, int k, int n, const Estimate& e, double p);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Standalone SVG line chart (one polyline per series).
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series);

nlohmann::json estimate_json(const Estimate& e);
nlohmann::json certificate_json(const Certificate& c);
nlohmann::json eta_json(const EtaDerivation& d);
nlohmann::json lemma5_json(const Lemma5Report& r);
nlohmann::json micro_report_json(const MicroAuditReport& r);
nlohmann::json surgery_record_json(const SurgeryRecord& r);
nlohmann::json pc_json(const PcResult& r);
nlohmann::json sequence_json(const SequenceTable& t);

/// Run manifest: fully determines every output byte except wall_clock_sec.
nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& params,
                             std::uint64_t master_seed, const std::vector<std::string>& outputs,
                             double wall_clock_sec);

}  // namespace slabperc
