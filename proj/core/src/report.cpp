#include "lexbias/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/json.hpp"
#include "lexbias/metrics.hpp"

namespace lexbias::report {
namespace {

using json::Json;
using json::OrderedJson;

constexpr double kWidth = 720;
constexpr double kHeight = 520;
constexpr double kLeft = 80;
constexpr double kRight = 170;  // room for the legend
constexpr double kTop = 40;
constexpr double kBottom = 70;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Exact decimal form of a double for data-* attributes (shortest round trip).
std::string exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

class Svg {
 public:
  Svg(double width, double height, std::string_view title) {
    out_ += R"(<?xml version="1.0" encoding="UTF-8"?>)" "\n";
    out_ += R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width=")" + num(width) +
            R"(" height=")" + num(height) + R"(" viewBox="0 0 )" + num(width) + " " + num(height) +
            R"(" font-family="Helvetica, Arial, sans-serif" font-size="12">)" "\n";
    out_ += "  <title>" + escape(title) + "</title>\n";
    out_ += R"(  <rect class="background" x="0" y="0" width=")" + num(width) + R"(" height=")" +
            num(height) + R"(" fill="white"/>)" "\n";
  }

  void raw(const std::string& element) { out_ += "  " + element + "\n"; }

  void text(double x, double y, std::string_view content, std::string_view cls,
            std::string_view anchor = "middle", std::string_view extra = "") {
    out_ += R"(  <text class=")" + std::string(cls) + R"(" x=")" + num(x) + R"(" y=")" + num(y) +
            R"(" text-anchor=")" + std::string(anchor) + "\"" + (extra.empty() ? "" : " ") +
            std::string(extra) + ">" + escape(content) + "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view cls, std::string_view stroke,
            std::string_view extra = "") {
    out_ += R"(  <line class=")" + std::string(cls) + R"(" x1=")" + num(x1) + R"(" y1=")" + num(y1) +
            R"(" x2=")" + num(x2) + R"(" y2=")" + num(y2) + R"(" stroke=")" + std::string(stroke) + "\"" +
            (extra.empty() ? "" : " ") + std::string(extra) + "/>\n";
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
};

// Linear map from data range [lo, hi] onto pixel range [a, b].
struct Scale {
  double lo, hi, a, b;
  double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::string system_color(const std::string& system, const std::vector<std::string>& systems) {
  static constexpr std::array<std::string_view, 6> kPalette{"black", "#d62728", "#2ca02c",
                                                            "#9467bd", "#8c564b", "#e377c2"};
  if (system == "human") return "#1f77b4";
  std::size_t i = 0;
  for (const auto& s : systems) {
    if (s == system) break;
    if (s != "human") ++i;
  }
  return std::string(kPalette[i % kPalette.size()]);
}

std::string variant_color(VariantKind v) {
  switch (v) {
    case VariantKind::full: return "#4c72b0";
    case VariantKind::context: return "#dd8452";
    case VariantKind::word: return "#55a868";
    case VariantKind::label: return "#8c8c8c";
    case VariantKind::guessed_word: return "#c44e52";
  }
  return "gray";
}

constexpr std::array<VariantKind, 5> kVariantOrder{VariantKind::full, VariantKind::context, VariantKind::word,
                                                   VariantKind::label, VariantKind::guessed_word};

std::string display_name(VariantKind v) {
  switch (v) {
    case VariantKind::full: return "Full";
    case VariantKind::context: return "Context";
    case VariantKind::word: return "Word";
    case VariantKind::label: return "Label";
    case VariantKind::guessed_word: return "GuessedWord";
  }
  return "?";
}

std::vector<const ScoreTable*> sorted_tables(std::span<const ScoreTable> tables) {
  std::vector<const ScoreTable*> out;
  for (const auto& t : tables) out.push_back(&t);
  std::stable_sort(out.begin(), out.end(), [](const ScoreTable* a, const ScoreTable* b) {
    return std::tie(a->dataset, a->system) < std::tie(b->dataset, b->system);
  });
  return out;
}

// Horizontal value axis for bar charts, with gridlines every `step`.
void value_axis(Svg& svg, const Scale& y, double step, double x0, double x1) {
  const double first = std::ceil(y.lo / step) * step;
  for (double v = first; v <= y.hi + 1e-9; v += step) {
    const double py = y(v);
    svg.line(x0, py, x1, py, "grid", "#dddddd");
    svg.text(x0 - 6, py + 4, format_half_up(v, 0), "tick", "end");
  }
}

}  // namespace

std::string format_half_up(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::abs(value), std::chars_format::fixed);
  std::string repr(buf, ptr);
  const std::size_t dot = repr.find('.');
  std::string int_part = dot == std::string::npos ? repr : repr.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : repr.substr(dot + 1);

  const auto d = static_cast<std::size_t>(std::max(decimals, 0));
  bool round_up = frac.size() > d && frac[d] >= '5';
  frac.resize(d, '0');
  std::string digits = int_part + frac;
  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
      if (i == 0) digits.insert(digits.begin(), '1');
    }
  }
  std::string out = digits.substr(0, digits.size() - d);
  if (d > 0) out += "." + digits.substr(digits.size() - d);
  const bool zero = std::all_of(digits.begin(), digits.end(), [](char c) { return c == '0'; });
  if (value < 0 && !zero) out.insert(out.begin(), '-');
  return out;
}

std::string format_bias(double value) { return format_half_up(value, 3); }

std::string format_percent(double fraction) { return format_half_up(fraction * 100.0, 1); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(ingest::read_file(path)); }

std::string bias_scatter(const ReportBundle& bundle, ScatterThresholds thresholds) {
  std::vector<const BiasReport*> points;
  std::set<std::string> system_set;
  for (const auto& r : bundle.bias_reports) {
    if (r.bias_c && r.bias_w) {
      points.push_back(&r);
      system_set.insert(r.system);
    }
  }
  if (points.empty()) throw ValidationError("bias scatter needs at least one report with both biases");
  const std::vector<std::string> systems(system_set.begin(), system_set.end());

  double x_lo = 0.0, x_hi = std::max(1.1, thresholds.line + 0.1);
  double y_lo = x_lo, y_hi = x_hi;
  for (const BiasReport* r : points) {
    if (*r->bias_c < x_lo) x_lo = *r->bias_c - 0.05;
    if (*r->bias_c > x_hi) x_hi = *r->bias_c + 0.05;
    if (*r->bias_w < y_lo) y_lo = *r->bias_w - 0.05;
    if (*r->bias_w > y_hi) y_hi = *r->bias_w + 0.05;
  }
  const double px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;
  const Scale x{x_lo, x_hi, px0, px1};
  const Scale y{y_lo, y_hi, py0, py1};

  Svg svg(kWidth, kHeight, "Context bias vs target word bias");

  // Shaded regions: high target-word bias (top band), high context bias (right band).
  const double shade_y = std::clamp(y(thresholds.shade), py1, py0);
  const double shade_x = std::clamp(x(thresholds.shade), px0, px1);
  svg.raw(R"(<rect class="shade shade-word" data-axis="y" data-threshold=")" + exact(thresholds.shade) +
          R"(" x=")" + num(px0) + R"(" y=")" + num(py1) + R"(" width=")" + num(px1 - px0) + R"(" height=")" +
          num(shade_y - py1) + R"(" fill="#2ca02c" fill-opacity="0.15"/>)");
  svg.raw(R"(<rect class="shade shade-context" data-axis="x" data-threshold=")" + exact(thresholds.shade) +
          R"(" x=")" + num(shade_x) + R"(" y=")" + num(py1) + R"(" width=")" + num(px1 - shade_x) +
          R"(" height=")" + num(py0 - py1) + R"(" fill="#ffbf00" fill-opacity="0.2"/>)");

  for (double t = 0.0; t <= x_hi + 1e-9; t += 0.2) {
    if (t < x_lo) continue;
    svg.line(x(t), py0, x(t), py0 + 5, "tick-mark", "black");
    svg.text(x(t), py0 + 18, format_half_up(t, 1), "tick");
  }
  for (double t = 0.0; t <= y_hi + 1e-9; t += 0.2) {
    if (t < y_lo) continue;
    svg.line(px0 - 5, y(t), px0, y(t), "tick-mark", "black");
    svg.text(px0 - 8, y(t) + 4, format_half_up(t, 1), "tick", "end");
  }
  svg.line(px0, py0, px1, py0, "axis axis-x", "black");
  svg.line(px0, py0, px0, py1, "axis axis-y", "black");
  svg.text((px0 + px1) / 2, kHeight - 25, "Context bias (Bias_C)", "axis-title");
  svg.text(22, (py0 + py1) / 2, "Target word bias (Bias_W)", "axis-title", "middle",
           "transform=\"rotate(-90 22 " + num((py0 + py1) / 2) + ")\"");

  // Reference lines: vertical at context bias = line, horizontal at word bias = line.
  svg.line(x(thresholds.line), py0, x(thresholds.line), py1, "ref-line ref-context", "red",
           R"(stroke-dasharray="6 4" stroke-width="1.5" data-axis="x" data-value=")" + exact(thresholds.line) + "\"");
  svg.line(px0, y(thresholds.line), px1, y(thresholds.line), "ref-line ref-word", "red",
           R"(stroke-dasharray="6 4" stroke-width="1.5" data-axis="y" data-value=")" + exact(thresholds.line) + "\"");

  for (const BiasReport* r : points) {
    const double cx = x(*r->bias_c);
    const double cy = y(*r->bias_w);
    const std::string color = system_color(r->system, systems);
    const std::string values = "(" + format_bias(*r->bias_c) + ", " + format_bias(*r->bias_w) + ")";
    svg.raw(R"(<g class="point" data-dataset=")" + escape(r->dataset) + R"(" data-system=")" +
            escape(r->system) + R"(" data-bias-c=")" + exact(*r->bias_c) + R"(" data-bias-w=")" +
            exact(*r->bias_w) + R"(">)");
    svg.raw(R"(  <title>)" + escape(r->dataset + " / " + r->system + " " + values) + "</title>");
    svg.raw(R"(  <circle cx=")" + num(cx) + R"(" cy=")" + num(cy) + R"(" r="5" fill=")" + color + R"("/>)");
    svg.raw(R"(  <text class="point-label" x=")" + num(cx + 8) + R"(" y=")" + num(cy - 6) + R"(" fill=")" +
            color + R"(">)" + escape(r->dataset) + "</text>");
    svg.raw(R"(  <text class="value-label" x=")" + num(cx + 8) + R"(" y=")" + num(cy + 10) +
            R"(" font-size="9" fill=")" + color + R"(">)" + values + "</text>");
    svg.raw("</g>");
  }

  double ly = kTop + 10;
  for (const auto& s : systems) {
    const std::string color = system_color(s, systems);
    svg.raw(R"(<circle class="legend-marker" cx=")" + num(px1 + 20) + R"(" cy=")" + num(ly) + R"(" r="5" fill=")" +
            color + R"("/>)");
    svg.text(px1 + 30, ly + 4, s, "legend", "start");
    ly += 18;
  }
  return svg.finish();
}

std::string baseline_bars(std::span<const ScoreTable> tables) {
  const auto ordered = sorted_tables(tables);
  std::size_t n_bars = 0;
  for (const ScoreTable* t : ordered) n_bars += t->scores.size();
  if (n_bars == 0) throw ValidationError("baseline chart needs at least one score");

  const double bar_w = 22;
  const double group_gap = 26;
  const double plot_w = static_cast<double>(n_bars) * bar_w + static_cast<double>(ordered.size()) * group_gap;
  const double width = std::max(kWidth, kLeft + plot_w + kRight);
  const double px0 = kLeft, px1 = kLeft + plot_w, py0 = kHeight - kBottom - 20, py1 = kTop;
  const Scale y{0.0, 100.0, py0, py1};

  Svg svg(width, kHeight, "Performance on probing baselines");
  value_axis(svg, y, 20.0, px0, px1);

  double cursor = px0 + group_gap / 2;
  std::set<VariantKind> used;
  for (const ScoreTable* t : ordered) {
    const double group_start = cursor;
    for (VariantKind v : kVariantOrder) {
      auto it = t->scores.find(v);
      if (it == t->scores.end()) continue;
      used.insert(v);
      const double value = it->second.mean * 100.0;
      const double top = y(std::max(value, 0.0));
      svg.raw(R"(<rect class="bar" data-dataset=")" + escape(t->dataset) + R"(" data-system=")" +
              escape(t->system) + R"(" data-variant=")" + std::string(to_string(v)) + R"(" data-value=")" +
              exact(it->second.mean) + R"(" x=")" + num(cursor) + R"(" y=")" + num(top) + R"(" width=")" +
              num(bar_w - 2) + R"(" height=")" + num(py0 - top) + R"(" fill=")" + variant_color(v) + R"("/>)");
      svg.text(cursor + (bar_w - 2) / 2, top - 4, format_percent(it->second.mean), "value-label", "middle",
               R"(font-size="8")");
      cursor += bar_w;
    }
    svg.text((group_start + cursor) / 2, py0 + 16, t->dataset, "group-label");
    svg.text((group_start + cursor) / 2, py0 + 30, t->system, "group-system", "middle", R"(font-size="10")");
    cursor += group_gap;
  }
  svg.line(px0, py0, px1, py0, "axis axis-x", "black");
  svg.line(px0, py0, px0, py1, "axis axis-y", "black");

  double ly = kTop + 10;
  for (VariantKind v : kVariantOrder) {
    if (!used.contains(v)) continue;
    svg.raw(R"(<rect class="legend-marker" x=")" + num(px1 + 16) + R"(" y=")" + num(ly - 8) +
            R"(" width="10" height="10" fill=")" + variant_color(v) + R"("/>)");
    svg.text(px1 + 32, ly + 1, display_name(v), "legend", "start");
    ly += 18;
  }
  return svg.finish();
}

std::string gap_chart(std::span<const ScoreTable> tables) {
  const auto ordered = sorted_tables(tables);
  if (ordered.empty()) throw ValidationError("gap chart needs at least one score table");

  struct Bar {
    const ScoreTable* table;
    double gap;
  };
  std::vector<Bar> bars;
  std::set<std::string> system_set;
  for (const ScoreTable* t : ordered) {
    for (VariantKind v : {VariantKind::full, VariantKind::context, VariantKind::word}) {
      if (!t->scores.contains(v)) {
        throw ValidationError(t->dataset + "/" + t->system + ": gap chart needs variant " +
                              std::string(to_string(v)));
      }
    }
    bars.push_back({t, min_gap(t->scores.at(VariantKind::full).mean, t->scores.at(VariantKind::context).mean,
                               t->scores.at(VariantKind::word).mean)});
    system_set.insert(t->system);
  }
  const std::vector<std::string> systems(system_set.begin(), system_set.end());

  double lo = 0.0, hi = 20.0;
  for (const Bar& b : bars) {
    lo = std::min(lo, b.gap * 100.0);
    hi = std::max(hi, b.gap * 100.0);
  }
  lo = std::floor(lo / 10.0) * 10.0;
  hi = std::ceil(hi / 10.0) * 10.0;

  const double bar_w = 34;
  const double plot_w = static_cast<double>(bars.size()) * (bar_w + 16) + 16;
  const double width = std::max(kWidth, kLeft + plot_w + kRight);
  const double px0 = kLeft, px1 = kLeft + plot_w, py0 = kHeight - kBottom - 20, py1 = kTop;
  const Scale y{lo, hi, py0, py1};

  Svg svg(width, kHeight, "min(Full-Context, Full-Word)");
  value_axis(svg, y, 10.0, px0, px1);
  svg.line(px0, y(0.0), px1, y(0.0), "axis axis-zero", "black");
  svg.line(px0, py0, px0, py1, "axis axis-y", "black");

  double cursor = px0 + 16;
  for (const Bar& b : bars) {
    const double value = b.gap * 100.0;
    const double zero = y(0.0);
    const double end = y(value);
    const double top = std::min(zero, end);
    const std::string color = system_color(b.table->system, systems);
    svg.raw(R"(<rect class="bar gap" data-dataset=")" + escape(b.table->dataset) + R"(" data-system=")" +
            escape(b.table->system) + R"(" data-value=")" + exact(b.gap) + R"(" x=")" + num(cursor) + R"(" y=")" +
            num(top) + R"(" width=")" + num(bar_w) + R"(" height=")" + num(std::abs(zero - end)) + R"(" fill=")" +
            color + R"("/>)");
    const double label_y = value >= 0 ? end - 4 : end + 12;
    svg.text(cursor + bar_w / 2, label_y, format_percent(b.gap), "value-label", "middle", R"(font-size="9")");
    svg.text(cursor + bar_w / 2, py0 + 16, b.table->dataset, "group-label", "middle", R"(font-size="10")");
    svg.text(cursor + bar_w / 2, py0 + 30, b.table->system, "group-system", "middle", R"(font-size="9")");
    cursor += bar_w + 16;
  }

  double ly = kTop + 10;
  for (const auto& s : systems) {
    svg.raw(R"(<rect class="legend-marker" x=")" + num(px1 + 16) + R"(" y=")" + num(ly - 8) +
            R"(" width="10" height="10" fill=")" + system_color(s, systems) + R"("/>)");
    svg.text(px1 + 32, ly + 1, s, "legend", "start");
    ly += 18;
  }
  return svg.finish();
}

std::string summary_json(const ReportBundle& bundle) {
  OrderedJson j;
  j["schema_version"] = kSummarySchemaVersion;
  OrderedJson meta;
  meta["toolkit_version"] = bundle.metadata.toolkit_version;
  meta["generated_at"] = bundle.metadata.generated_at;
  meta["input_digests"] = bundle.metadata.input_digests;
  j["metadata"] = std::move(meta);

  OrderedJson reports = OrderedJson::array();
  for (const auto& r : bundle.bias_reports) reports.push_back(json::to_json(r));
  j["bias_reports"] = std::move(reports);

  OrderedJson tables = OrderedJson::array();
  for (const auto& t : bundle.score_tables) {
    OrderedJson table;
    table["dataset"] = t.dataset;
    table["system"] = t.system;
    OrderedJson summaries = OrderedJson::array();
    for (const auto& [variant, s] : t.scores) summaries.push_back(json::to_json(s));
    table["summaries"] = std::move(summaries);
    tables.push_back(std::move(table));
  }
  j["score_tables"] = std::move(tables);

  OrderedJson entropies = OrderedJson::array();
  for (const auto& e : bundle.entropy_reports) {
    OrderedJson entry;
    entry["dataset"] = e.dataset;
    entry["report"] = json::to_json(e.report);
    entropies.push_back(std::move(entry));
  }
  j["entropy_reports"] = std::move(entropies);
  return j.dump(2) + "\n";
}

ReportBundle bundle_from_summary_json(std::string_view text) {
  const Json j = Json::parse(text);
  const auto version = json::field(j, "schema_version").get<int>();
  if (version != kSummarySchemaVersion) {
    throw ValidationError("unsupported summary schema_version " + std::to_string(version));
  }
  ReportBundle bundle;
  const Json& meta = json::field(j, "metadata");
  bundle.metadata.toolkit_version = json::string_field(meta, "toolkit_version");
  bundle.metadata.generated_at = json::string_field(meta, "generated_at");
  bundle.metadata.input_digests = json::field(meta, "input_digests").get<std::map<std::string, std::string>>();
  for (const Json& r : json::field(j, "bias_reports")) bundle.bias_reports.push_back(json::bias_report_from_json(r));
  for (const Json& t : json::field(j, "score_tables")) {
    ScoreTable table;
    table.dataset = json::string_field(t, "dataset");
    table.system = json::string_field(t, "system");
    for (const Json& s : json::field(t, "summaries")) {
      ScoreSummary summary = json::score_summary_from_json(s);
      table.scores.emplace(summary.variant, std::move(summary));
    }
    bundle.score_tables.push_back(std::move(table));
  }
  for (const Json& e : json::field(j, "entropy_reports")) {
    bundle.entropy_reports.push_back(
        {json::string_field(e, "dataset"), json::entropy_report_from_json(json::field(e, "report"))});
  }
  return bundle;
}

std::string summary_markdown(const ReportBundle& bundle) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::map<VariantKind, double>> scores;
  std::map<Key, const BiasReport*> biases;
  for (const auto& t : bundle.score_tables) {
    auto& row = scores[{t.dataset, t.system}];
    for (const auto& [v, s] : t.scores) row[v] = s.mean;
  }
  for (const auto& r : bundle.bias_reports) {
    auto& row = scores[{r.dataset, r.system}];
    for (const auto& [v, value] : r.scores) row.emplace(v, value);
    biases[{r.dataset, r.system}] = &r;
  }

  auto cell = [](const std::optional<double>& v, bool percent) {
    if (!v) return std::string("-");
    return percent ? format_percent(*v) : format_bias(*v);
  };

  std::string out = "| dataset | system | Full | Context | Word | Label | Bias_C | Bias_W | min-gap |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& [key, row] : scores) {
    auto get = [&](VariantKind v) {
      auto it = row.find(v);
      return it == row.end() ? std::optional<double>() : std::optional<double>(it->second);
    };
    const BiasReport* r = biases.contains(key) ? biases.at(key) : nullptr;
    std::optional<double> gap = r ? r->min_gap : std::nullopt;
    if (!gap && get(VariantKind::full) && get(VariantKind::context) && get(VariantKind::word)) {
      gap = min_gap(*get(VariantKind::full), *get(VariantKind::context), *get(VariantKind::word));
    }
    out += "| " + key.first + " | " + key.second + " | " + cell(get(VariantKind::full), true) + " | " +
           cell(get(VariantKind::context), true) + " | " + cell(get(VariantKind::word), true) + " | " +
           cell(get(VariantKind::label), true) + " | " + cell(r ? r->bias_c : std::nullopt, false) + " | " +
           cell(r ? r->bias_w : std::nullopt, false) + " | " + cell(gap, true) + " |\n";
  }
  return out;
}

void write_summary(const ReportBundle& bundle, const std::filesystem::path& json_path) {
  ingest::write_file(json_path, summary_json(bundle));
  std::filesystem::path md = json_path;
  md.replace_extension(".md");
  ingest::write_file(md, summary_markdown(bundle));
}

}  // namespace lexbias::report
