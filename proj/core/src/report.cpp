#include "esg/report.hpp"

#include <cstdio>

#include "esg/io.hpp"
#include "json.hpp"

namespace esg {

namespace {
using ordered_json = nlohmann::ordered_json;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}
}  // namespace

std::string metrics_to_json(const EvalReport& report) {
  ordered_json j;
  j["kind"] = std::string(to_string(report.kind));
  j["n_test"] = report.n_test;
  j["mae"] = report.mae;
  j["pearson_r"] =
      report.pearson_r ? ordered_json(*report.pearson_r) : ordered_json();
  j["p_value"] =
      report.p_value ? ordered_json(*report.p_value) : ordered_json();
  j["seed"] = report.seed;
  j["split_ratio"] = report.split_ratio;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string predictions_to_csv(const EvalReport& report) {
  std::string out = "company,actual,predicted\n";
  for (std::size_t i = 0; i < report.companies.size(); ++i) {
    out += report.companies[i];
    out += ',';
    out += fixed(report.actual[i], 6);
    out += ',';
    out += fixed(report.predicted[i], 6);
    out += '\n';
  }
  return out;
}

std::string scatter_to_svg(const EvalReport& report) {
  constexpr int kSize = 440;
  constexpr int kMargin = 50;
  constexpr int kPlot = kSize - 2 * kMargin;

  const auto sx = [&](double v) {
    return fixed(kMargin + v / 100.0 * kPlot, 2);
  };
  const auto sy = [&](double v) {
    return fixed(kSize - kMargin - v / 100.0 * kPlot, 2);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kSize) + "\" height=\"" + std::to_string(kSize) +
         "\" viewBox=\"0 0 " + std::to_string(kSize) + " " +
         std::to_string(kSize) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "  <text x=\"" + std::to_string(kSize / 2) +
         "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">Actual vs. predicted score (" +
         std::string(to_string(report.kind)) + ")</text>\n";

  // Axes with ticks every 20 points.
  svg += "  <g stroke=\"black\" fill=\"none\">\n";
  svg += "    <line x1=\"" + sx(0) + "\" y1=\"" + sy(0) + "\" x2=\"" +
         sx(100) + "\" y2=\"" + sy(0) + "\"/>\n";
  svg += "    <line x1=\"" + sx(0) + "\" y1=\"" + sy(0) + "\" x2=\"" +
         sx(0) + "\" y2=\"" + sy(100) + "\"/>\n";
  svg += "  </g>\n";
  svg += "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int v = 0; v <= 100; v += 20) {
    svg += "    <line stroke=\"black\" x1=\"" + sx(v) + "\" y1=\"" + sy(0) +
           "\" x2=\"" + sx(v) + "\" y2=\"" +
           fixed(kSize - kMargin + 5, 2) + "\"/>\n";
    svg += "    <text x=\"" + sx(v) + "\" y=\"" +
           std::to_string(kSize - kMargin + 20) +
           "\" text-anchor=\"middle\">" + std::to_string(v) + "</text>\n";
    svg += "    <line stroke=\"black\" x1=\"" +
           fixed(kMargin - 5, 2) + "\" y1=\"" + sy(v) + "\" x2=\"" + sx(0) +
           "\" y2=\"" + sy(v) + "\"/>\n";
    svg += "    <text x=\"" + std::to_string(kMargin - 10) + "\" y=\"" +
           fixed(kSize - kMargin - v / 100.0 * kPlot + 4, 2) +
           "\" text-anchor=\"end\">" + std::to_string(v) + "</text>\n";
  }
  svg += "  </g>\n";
  svg += "  <text x=\"" + std::to_string(kSize / 2) + "\" y=\"" +
         std::to_string(kSize - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">actual</text>\n";
  svg += "  <text x=\"14\" y=\"" + std::to_string(kSize / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 14 " +
         std::to_string(kSize / 2) + ")\">predicted</text>\n";

  // y = x reference.
  svg += "  <line stroke=\"#999\" stroke-dasharray=\"4 3\" x1=\"" + sx(0) +
         "\" y1=\"" + sy(0) + "\" x2=\"" + sx(100) + "\" y2=\"" + sy(100) +
         "\"/>\n";

  svg += "  <g fill=\"#2b6cb0\" fill-opacity=\"0.75\">\n";
  for (std::size_t i = 0; i < report.actual.size(); ++i) {
    svg += "    <circle cx=\"" + sx(report.actual[i]) + "\" cy=\"" +
           sy(report.predicted[i]) + "\" r=\"3\"/>\n";
  }
  svg += "  </g>\n";
  svg += "</svg>\n";
  return svg;
}

void save_metrics(const EvalReport& report,
                  const std::filesystem::path& path) {
  io::atomic_write(path, metrics_to_json(report));
}

void save_predictions(const EvalReport& report,
                      const std::filesystem::path& path) {
  io::atomic_write(path, predictions_to_csv(report));
}

void save_scatter(const EvalReport& report,
                  const std::filesystem::path& path) {
  io::atomic_write(path, scatter_to_svg(report));
}

std::string model_comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "kind,mae,r,p\n";
  for (const auto& row : rows) {
    out += std::string(to_string(row.kind));
    out += ',';
    out += fixed(row.mae, 6);
    out += ',';
    out += row.pearson_r ? fixed(*row.pearson_r, 6) : "";
    out += ',';
    out += row.p_value ? fixed(*row.p_value, 6) : "";
    out += '\n';
  }
  return out;
}

void save_model_comparison(const std::vector<ComparisonRow>& rows,
                           const std::filesystem::path& path) {
  io::atomic_write(path, model_comparison_to_csv(rows));
}

}  // namespace esg
