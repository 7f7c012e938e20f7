#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "moonlab/errors.hpp"
#include "moonlab/report.hpp"

using namespace moonlab;
using namespace moonlab::report;

namespace {

SweepConfig small_config() {
    SweepConfig sc;
    sc.base.arch = {3, 1};
    sc.base.dep.model = DependencyModel::GlobalCCF;
    sc.base.nb = 20'000;
    sc.base.seed = 3;
    sc.p_grid = default_p_grid(4);
    return sc;
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(std::nan("")), "");
    for (const double v : {1.0 / 3.0, 6.02214076e23, 5e-324, -2.5, 0.6931471805599453}) {
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
}

TEST(Format, Significant) {
    EXPECT_EQ(format_significant(11.0 / 12.0), "0.916666666666667");
    EXPECT_EQ(format_significant(1.0), "1");
    EXPECT_EQ(format_significant(std::numeric_limits<double>::infinity()), "null");
}

TEST(SweepCsv, HeaderAndRows) {
    const SweepResult r = sweep(small_config());
    const std::string csv = sweep_csv(r);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.back(), '\n');
    const auto rows = parse_csv(csv);
    ASSERT_EQ(rows.size(), 5u);
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    EXPECT_EQ(header, kSweepCsvHeader);
    EXPECT_EQ(rows[1][0], "global-ccf");
    EXPECT_EQ(rows[1][5], "20000");
    EXPECT_EQ(rows[1][7], "0");
    EXPECT_EQ(rows[4][7], "1");
    EXPECT_EQ(rows[1][15], "1");  // rel_mean at p = 0
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size());
}

TEST(SweepCsv, NumbersRoundTripExactly) {
    const SweepResult r = sweep(small_config());
    const auto rows = parse_csv(sweep_csv(r));
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const SummaryStats& s = r.points[i].cell.stats;
        const auto& row = rows[i + 1];
        EXPECT_EQ(std::stod(row[7]), r.points[i].p);
        EXPECT_EQ(std::stod(row[8]), s.mean);
        EXPECT_EQ(std::stod(row[9]), s.mean_std_error);
        EXPECT_EQ(std::stod(row[10]), s.median);
        EXPECT_EQ(std::stod(row[11]), s.mode);
        EXPECT_EQ(std::stod(row[12]), s.std_dev);
        EXPECT_EQ(std::stod(row[13]), s.skewness);
        EXPECT_EQ(std::stod(row[14]), s.kurtosis_excess);
        EXPECT_EQ(std::stod(row[15]), r.relative.mean[i]);
        EXPECT_EQ(std::stod(row[18]), r.relative.std_dev[i]);
    }
}

TEST(CurvesCsv, UndefinedHazardIsEmpty) {
    ScenarioConfig cfg;
    cfg.nb = 5000;
    const CellAnalysis cell = analyze_cell(cfg);
    const auto rows = parse_csv(curves_csv(cell));
    ASSERT_EQ(rows.size(), cell.density.grid.size() + 1);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "density", "survival", "hazard"}));
    EXPECT_EQ(rows.back()[3], "");
    EXPECT_FALSE(rows[1][3].empty());
}

TEST(ParseCsv, KeepsEmptyFields) {
    const auto rows = parse_csv("a,,c\r\n\n1,2,\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "", "c"}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2", ""}));
}

TEST(Decimation, KeepsEndpointsAndLimit) {
    EXPECT_EQ(decimation_indices(5, 10).size(), 5u);
    EXPECT_EQ(decimation_indices(5, 0).size(), 5u);
    EXPECT_TRUE(decimation_indices(0, 10).empty());
    const auto idx = decimation_indices(4096, 1024);
    ASSERT_EQ(idx.size(), 1024u);
    EXPECT_EQ(idx.front(), 0u);
    EXPECT_EQ(idx.back(), 4095u);
    for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_GT(idx[i], idx[i - 1]);
}

TEST(Documents, SimulateShapeAndReproducibility) {
    ScenarioConfig cfg;
    cfg.nb = 10'000;
    cfg.seed = 7;
    RunInfo info{"simulate", 1, "scalar", 128};
    AnalysisOptions opts;
    opts.kde_grid = 128;
    const Json a = simulate_document(cfg, analyze_cell(cfg, opts), info);
    for (const char* key : {"metadata", "stats", "density", "reliability", "hazard"}) EXPECT_TRUE(a.contains(key)) << key;
    EXPECT_EQ(a["metadata"]["config"]["samples"], 10'000);
    EXPECT_EQ(a["metadata"]["config"]["kde_grid"], 128);
    EXPECT_EQ(a["metadata"]["config"]["model"], "linear");
    EXPECT_TRUE(a["metadata"].contains("timestamp"));
    EXPECT_EQ(a["density"]["t"].size(), 128u);

    const Json b = simulate_document(cfg, analyze_cell(cfg, opts), info);
    EXPECT_EQ(payload_without_timestamp(a).dump(), payload_without_timestamp(b).dump());
    EXPECT_FALSE(payload_without_timestamp(a)["metadata"].contains("timestamp"));
}

TEST(Documents, SweepEchoesGrid) {
    const SweepConfig sc = small_config();
    const Json doc = sweep_document(sc, sweep(sc), RunInfo{"sweep", 1, "scalar", 512});
    EXPECT_EQ(doc["metadata"]["config"]["p_grid"].size(), 4u);
    EXPECT_FALSE(doc["metadata"]["config"].contains("p"));
    EXPECT_EQ(doc["points"].size(), 4u);
    EXPECT_EQ(doc["relative"]["mean"][0], 1.0);
}

TEST(Oracle, ReliabilityAndMean) {
    OracleQuery q;
    q.model = DependencyModel::GlobalCCF;
    q.arch = {3, 3};
    q.p = 0.5;
    q.t = 1.0;
    const OracleAnswer a = evaluate_oracle(q);
    EXPECT_EQ(a.quantity, "reliability");
    EXPECT_NEAR(a.value, 0.20883325476965314, 1e-15);
    const std::string text = oracle_json_text(q, a);
    EXPECT_NE(text.find("\"reliability\":0.208833254769653"), std::string::npos) << text;
    EXPECT_FALSE(Json::parse(text).is_discarded());

    OracleQuery m;
    m.model = DependencyModel::Linear;
    m.arch = {3, 2};
    m.p = 0.5;
    m.mean = true;
    EXPECT_NE(oracle_json_text(m, evaluate_oracle(m)).find("\"mean\":0.916666666666667"), std::string::npos);

    OracleQuery z;
    z.t = 0.0;
    EXPECT_EQ(evaluate_oracle(z).value, 1.0);
}

TEST(Oracle, UnsupportedLinearMean) {
    OracleQuery q;
    q.dist.shape = 2.0;
    q.p = 0.5;
    q.mean = true;
    EXPECT_THROW(evaluate_oracle(q), UnsupportedError);
    q.quadrature = true;
    const OracleAnswer a = evaluate_oracle(q);
    EXPECT_EQ(a.method, "quadrature");
    EXPECT_GT(a.value, 0.0);
}

TEST(Oracle, QueryValidation) {
    OracleQuery q;
    EXPECT_THROW(evaluate_oracle(q), ValidationError);  // neither t nor mean
    q.t = 1.0;
    q.mean = true;
    EXPECT_THROW(evaluate_oracle(q), ValidationError);
    q.mean = false;
    q.arch = {3, 4};
    EXPECT_THROW(evaluate_oracle(q), ValidationError);
}
