#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lexbias/error.hpp"
#include "lexbias/metrics.hpp"
#include "lexbias/report.hpp"
#include "svg_query.hpp"

using namespace lexbias;

namespace {

BiasReport bias(const std::string& dataset, const std::string& system, double c, double w, double full,
                double label) {
  return build_bias_report(dataset, system,
                           {{VariantKind::full, full},
                            {VariantKind::context, label + c * (full - label)},
                            {VariantKind::word, label + w * (full - label)},
                            {VariantKind::label, label}},
                           BiasOptions{});
}

report::ScoreTable table(const std::string& dataset, const std::string& system,
                         std::map<VariantKind, double> scores) {
  report::ScoreTable t{dataset, system, {}};
  for (auto [v, s] : scores) t.scores.emplace(v, make_summary(system, v, Metric::accuracy, {ScoreRun{1, {}, s}}, 100));
  return t;
}

report::ReportBundle sample_bundle() {
  report::ReportBundle b;
  b.bias_reports.push_back(build_bias_report(
      "amico", "bert", {{VariantKind::full, 0.71}, {VariantKind::context, 0.66}, {VariantKind::word, 0.61}, {VariantKind::label, 0.5}}));
  b.bias_reports.push_back(build_bias_report(
      "amico", "human", {{VariantKind::full, 0.879}, {VariantKind::context, 0.69}, {VariantKind::word, 0.685}, {VariantKind::label, 0.5}}));
  b.bias_reports.push_back(bias("wikimed", "bert", 0.9, 1.02, 0.8, 0.0));
  b.score_tables.push_back(table("amico", "bert", {{VariantKind::full, 0.71}, {VariantKind::context, 0.66}, {VariantKind::word, 0.61}, {VariantKind::label, 0.5}}));
  b.score_tables.push_back(table("amico", "human", {{VariantKind::full, 0.879}, {VariantKind::context, 0.69}, {VariantKind::word, 0.685}, {VariantKind::label, 0.5}}));
  EntropyReport e;
  e.per_word["bank"] = {4, 2, 1.0, 0.5, "F"};
  e.average = 1.0;
  e.token_weighted_average = 1.0;
  e.majority_proportion = 0.5;
  e.n_words_included = 1;
  b.entropy_reports.push_back({"wic", e});
  b.metadata = {"0.3.0", "", {{"scores.json", report::sha256_hex("x")}}};
  return b;
}

}  // namespace

TEST_CASE("half-up formatting") {
  CHECK(report::format_half_up(0.0005, 3) == "0.001");
  CHECK(report::format_half_up(-0.0005, 3) == "-0.001");
  CHECK(report::format_half_up(2.5, 0) == "3");
  CHECK(report::format_half_up(0.125, 2) == "0.13");
  CHECK(report::format_half_up(1.0, 3) == "1.000");
  CHECK(report::format_bias(0.16 / 0.21) == "0.762");
  CHECK(report::format_bias(1.021) == "1.021");
  CHECK(report::format_percent(0.879 - 0.69) == "18.9");
  CHECK(report::format_percent(0.05) == "5.0");
}

TEST_CASE("sha256") {
  CHECK(report::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(report::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("bias scatter structure") {
  const auto bundle = sample_bundle();
  const std::string svg = report::bias_scatter(bundle);
  const auto root = svgq::parse(svg);
  REQUIRE(root.count("svg") == 1);

  const auto lines = svgq::select(root, "line", "ref-line");
  REQUIRE(lines.size() == 2);
  for (const auto& l : lines) {
    CHECK_FALSE(l.attr("stroke-dasharray").empty());
    CHECK(std::stod(l.attr("data-value")) == 1.0);
  }
  const auto shades = svgq::select(root, "rect", "shade");
  REQUIRE(shades.size() == 2);
  for (const auto& s : shades) CHECK(std::stod(s.attr("data-threshold")) == 0.8);

  const auto points = svgq::select(root, "g", "point");
  REQUIRE(points.size() == 3);

  // Above the horizontal line means a smaller SVG y.
  const auto horizontal = lines[0].attr("data-axis") == "y" ? lines[0] : lines[1];
  const double line_y = std::stod(horizontal.attr("y1"));
  bool found = false;
  for (const auto& p : points) {
    if (p.attr("data-dataset") != "wikimed") continue;
    found = true;
    CHECK(std::stod(p.attr("data-bias-w")) == doctest::Approx(1.02));
    const double cy = p.node->get<double>("circle.<xmlattr>.cy");
    CHECK(cy < line_y);
    CHECK(p.node->get<std::string>("text.<xmlattr>.class") == "point-label");
  }
  CHECK(found);

  // Human points are blue, models use a different colour.
  for (const auto& p : points) {
    const auto fill = p.node->get<std::string>("circle.<xmlattr>.fill");
    if (p.attr("data-system") == "human") {
      CHECK(fill == "#1f77b4");
    } else {
      CHECK(fill != "#1f77b4");
    }
  }
  CHECK(svg.find("(0.762, 0.524)") != std::string::npos);
}

TEST_CASE("scatter axes grow to fit out-of-range points") {
  report::ReportBundle b;
  b.bias_reports.push_back(bias("x", "m", 1.5, -0.3, 0.8, 0.5));
  const auto root = svgq::parse(report::bias_scatter(b));
  const auto points = svgq::select(root, "g", "point");
  REQUIRE(points.size() == 1);
  const double cx = points[0].node->get<double>("circle.<xmlattr>.cx");
  const double cy = points[0].node->get<double>("circle.<xmlattr>.cy");
  const double width = root.get<double>("svg.<xmlattr>.width");
  const double height = root.get<double>("svg.<xmlattr>.height");
  CHECK(cx > 0);
  CHECK(cx < width);
  CHECK(cy > 0);
  CHECK(cy < height);
  CHECK_THROWS_AS(report::bias_scatter(report::ReportBundle{}), ValidationError);
}

TEST_CASE("baseline bars carry percentages") {
  const auto bundle = sample_bundle();
  const std::string svg = report::baseline_bars(bundle.score_tables);
  const auto root = svgq::parse(svg);
  const auto bars = svgq::select(root, "rect", "bar");
  CHECK(bars.size() == 8);
  for (const auto& b : bars) CHECK_FALSE(b.attr("data-variant").empty());
  CHECK(svg.find(">87.9<") != std::string::npos);
  CHECK(svg.find(">68.5<") != std::string::npos);
}

TEST_CASE("gap chart") {
  auto bundle = sample_bundle();
  bundle.score_tables.push_back(table("wikimed", "bert", {{VariantKind::full, 0.50}, {VariantKind::context, 0.3}, {VariantKind::word, 0.51}}));
  const std::string svg = report::gap_chart(bundle.score_tables);
  const auto root = svgq::parse(svg);
  const auto bars = svgq::select(root, "rect", "gap");
  REQUIRE(bars.size() == 3);
  CHECK(svg.find(">18.9<") != std::string::npos);
  CHECK(svg.find(">5.0<") != std::string::npos);
  CHECK(svg.find(">-1.0<") != std::string::npos);

  const auto zero = svgq::select(root, "line", "axis-zero");
  REQUIRE(zero.size() == 1);
  const double zero_y = std::stod(zero[0].attr("y1"));
  for (const auto& b : bars) {
    const double y = std::stod(b.attr("y"));
    if (std::stod(b.attr("data-value")) < 0) {
      CHECK(y == doctest::Approx(zero_y));
    } else {
      CHECK(y < zero_y);
    }
  }
  std::vector<report::ScoreTable> partial{table("d", "s", {{VariantKind::full, 0.5}})};
  CHECK_THROWS_AS(report::gap_chart(partial), ValidationError);
}

TEST_CASE("summary JSON round trips every number exactly") {
  const auto bundle = sample_bundle();
  const std::string json = report::summary_json(bundle);
  const auto back = report::bundle_from_summary_json(json);
  CHECK(back == bundle);
  CHECK(report::summary_json(back) == json);
  CHECK(*back.bias_reports[0].bias_c == *bundle.bias_reports[0].bias_c);
}

TEST_CASE("summary markdown and determinism") {
  const auto bundle = sample_bundle();
  const std::string md = report::summary_markdown(bundle);
  CHECK(md.find("| dataset | system | Full | Context | Word | Label | Bias_C | Bias_W | min-gap |") != std::string::npos);
  CHECK(md.find("| amico | human | 87.9 | 69.0 | 68.5 | 50.0 | 0.501 | 0.488 | 18.9 |") != std::string::npos);
  CHECK(md.find("| amico | bert | 71.0 | 66.0 | 61.0 | 50.0 | 0.762 | 0.524 | 5.0 |") != std::string::npos);
  CHECK(report::bias_scatter(bundle) == report::bias_scatter(bundle));

  const auto dir = testutil::scratch_dir("report");
  report::write_summary(bundle, dir / "summary.json");
  CHECK(std::filesystem::exists(dir / "summary.md"));
  std::filesystem::remove_all(dir);
}
