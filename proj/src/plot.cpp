/**
 * Copyright 2026 The SACC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sacc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <unistd.h>

#include "sacc/error.hpp"

namespace sacc::plot {
namespace fs = std::filesystem;
namespace {

// Drawing happens in RGB byte order; the conversion below keeps it.
const cv::Scalar kBlack(0, 0, 0);
const cv::Scalar kGrey(150, 150, 150);
const cv::Scalar kWhite(255, 255, 255);

cv::Scalar palette(int k) {
  static const int colors[10][3] = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
                                    {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127},
                                    {188, 189, 34},  {23, 190, 207}};
  const int* c = colors[((k % 10) + 10) % 10];
  return cv::Scalar(c[0], c[1], c[2]);
}

Image to_image(const cv::Mat& rgb) {
  cv::Mat f;
  rgb.convertTo(f, CV_32FC3, 1.0 / 255.0);
  return Image::from_interleaved(f.rows, f.cols, 3,
                                 std::span<const float>(f.ptr<float>(), f.total() * 3));
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

void put_text(cv::Mat& m, const std::string& text, cv::Point at, double scale = 0.4) {
  cv::putText(m, text, at, cv::FONT_HERSHEY_SIMPLEX, scale, kBlack, 1, cv::LINE_AA);
}

}  // namespace

MetricsLog read_metrics_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metrics log " + path.string());
  MetricsLog log;
  log.loss.name = "loss";
  const char* names[3] = {"NMI", "ACC", "ARI"};
  const char* keys[3] = {"nmi", "acc", "ari"};
  for (int i = 0; i < 3; ++i) log.scores[i].name = names[i];
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("type")) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed record");
    }
    if (j["type"] == "step") {
      log.loss.xs.push_back(j.at("step").get<double>());
      log.loss.ys.push_back(j.at("total").get<double>());
    } else if (j["type"] == "eval") {
      for (int i = 0; i < 3; ++i) {
        log.scores[i].xs.push_back(j.at("epoch").get<double>());
        log.scores[i].ys.push_back(j.at(keys[i]).get<double>());
      }
    }
  }
  return log;
}

Image render_curves(std::span<const Series> series, const std::string& title,
                    const std::string& x_label, Size canvas) {
  cv::Mat m(canvas.height, canvas.width, CV_8UC3, kWhite);
  const int left = 60, right = 20, top = 36, bottom = 48;
  const cv::Rect area(left, top, canvas.width - left - right, canvas.height - top - bottom);
  if (area.width < 10 || area.height < 10) throw ConfigError("render_curves: canvas too small");

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.xs.size(); ++i) {
      if (first) {
        x0 = x1 = s.xs[i];
        y0 = y1 = s.ys[i];
        first = false;
      }
      x0 = std::min(x0, s.xs[i]);
      x1 = std::max(x1, s.xs[i]);
      y0 = std::min(y0, s.ys[i]);
      y1 = std::max(y1, s.ys[i]);
    }
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x, double y) {
    return cv::Point(area.x + static_cast<int>(std::lround((x - x0) / (x1 - x0) * area.width)),
                     area.y + area.height -
                         static_cast<int>(std::lround((y - y0) / (y1 - y0) * area.height)));
  };

  cv::rectangle(m, area, kBlack, 1);
  for (int t = 0; t <= 4; ++t) {
    double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
    cv::Point bx = px(fx, y0), by = px(x0, fy);
    cv::line(m, bx, bx + cv::Point(0, 4), kBlack);
    put_text(m, tick_label(fx), bx + cv::Point(-10, 18));
    cv::line(m, by, by - cv::Point(4, 0), kBlack);
    put_text(m, tick_label(fy), by + cv::Point(-55, 4));
  }
  put_text(m, title, {left, 22}, 0.55);
  put_text(m, x_label, {area.x + area.width / 2 - 20, canvas.height - 10}, 0.45);

  int color = 0, legend_y = top + 16;
  for (const auto& s : series) {
    if (s.xs.empty()) continue;
    const cv::Scalar col = palette(color++);
    for (size_t i = 0; i < s.xs.size(); ++i) {
      cv::Point p = px(s.xs[i], s.ys[i]);
      if (i > 0) cv::line(m, px(s.xs[i - 1], s.ys[i - 1]), p, col, 2, cv::LINE_AA);
      cv::circle(m, p, 3, col, cv::FILLED, cv::LINE_AA);
    }
    cv::line(m, {area.x + area.width - 90, legend_y - 4}, {area.x + area.width - 70, legend_y - 4},
             col, 2);
    put_text(m, s.name, {area.x + area.width - 64, legend_y});
    legend_y += 16;
  }
  return to_image(m);
}

Image render_confusion(const metrics::CountMatrix& counts, int cell) {
  if (cell < 1) throw ConfigError("render_confusion: cell must be >= 1");
  if (counts.rows() != counts.cols()) throw ConfigError("render_confusion: counts must be square");
  const int k = static_cast<int>(counts.rows());
  cv::Mat m(k * cell, k * cell, CV_8UC3, kWhite);
  for (int r = 0; r < k; ++r) {
    const double total = static_cast<double>(counts.row(r).sum());
    for (int c = 0; c < k; ++c) {
      const double v = total > 0 ? counts(r, c) / total : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      const cv::Rect box(c * cell, r * cell, cell, cell);
      cv::rectangle(m, box, cv::Scalar(shade, shade, 255), cv::FILLED);
      if (cell >= 24) {
        std::ostringstream os;
        os << counts(r, c);
        cv::putText(m, os.str(), {box.x + 4, box.y + cell / 2 + 4}, cv::FONT_HERSHEY_SIMPLEX,
                    0.35, v > 0.5 ? kWhite : kBlack, 1, cv::LINE_AA);
      }
    }
  }
  return to_image(m);
}

Image preview_grid(std::span<const std::array<Image, 4>> rows, int padding) {
  if (rows.empty()) throw ConfigError("preview_grid: no rows");
  int tile_h = 0, tile_w = 0;
  for (const auto& row : rows) {
    for (const auto& img : row) {
      tile_h = std::max(tile_h, img.height());
      tile_w = std::max(tile_w, img.width());
    }
  }
  const int n = static_cast<int>(rows.size());
  Image grid(n * tile_h + (n + 1) * padding, 4 * tile_w + 5 * padding, 1.0f);
  for (int r = 0; r < n; ++r) {
    for (int t = 0; t < 4; ++t) {
      const Image tile = resize_bilinear(rows[r][t], {tile_h, tile_w});
      const int oy = padding + r * (tile_h + padding), ox = padding + t * (tile_w + padding);
      for (int y = 0; y < tile_h; ++y) {
        for (int x = 0; x < tile_w; ++x) {
          for (int c = 0; c < 3; ++c) grid.at(oy + y, ox + x, c) = tile.at(y, x, c);
        }
      }
    }
  }
  return grid;
}

Image render_scatter(const Eigen::MatrixXd& points, const std::vector<int>* labels, Size canvas) {
  if (points.cols() != 2) throw ConfigError("render_scatter: points must be N x 2");
  if (labels && static_cast<Eigen::Index>(labels->size()) != points.rows()) {
    throw ConfigError("render_scatter: label count differs from point count");
  }
  cv::Mat m(canvas.height, canvas.width, CV_8UC3, kWhite);
  if (points.rows() == 0) return to_image(m);
  const Eigen::Vector2d lo = points.colwise().minCoeff(), hi = points.colwise().maxCoeff();
  const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-12);
  const int margin = 16;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double fx = (points(i, 0) - lo(0)) / span(0), fy = (points(i, 1) - lo(1)) / span(1);
    cv::Point p(margin + static_cast<int>(std::lround(fx * (canvas.width - 2 * margin))),
                canvas.height - margin -
                    static_cast<int>(std::lround(fy * (canvas.height - 2 * margin))));
    cv::circle(m, p, 3, labels ? palette((*labels)[i]) : kGrey, cv::FILLED, cv::LINE_AA);
  }
  return to_image(m);
}

std::optional<Eigen::MatrixXd> tsne(const Eigen::MatrixXd& features, int seed, const fs::path& script) {
  if (!fs::exists(script)) return std::nullopt;
  const fs::path dir = fs::temp_directory_path() / ("sacc_tsne_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path in_path = dir / "features.csv", out_path = dir / "coords.csv";
  {
    std::ofstream out(in_path);
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      for (Eigen::Index k = 0; k < features.cols(); ++k) out << (k ? "," : "") << features(i, k);
      out << '\n';
    }
  }
  const char* python = std::getenv("SACC_PYTHON");
  const std::string cmd = std::string(python ? python : "python3") + " \"" + script.string() +
                          "\" \"" + in_path.string() + "\" \"" + out_path.string() + "\" " +
                          std::to_string(seed) + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  std::optional<Eigen::MatrixXd> result;
  if (status == 0 && fs::exists(out_path)) {
    std::ifstream in(out_path);
    Eigen::MatrixXd coords(features.rows(), 2);
    Eigen::Index row = 0;
    char comma = 0;
    while (row < coords.rows() && in >> coords(row, 0) >> comma >> coords(row, 1)) ++row;
    if (row == coords.rows()) result = coords;
  }
  fs::remove_all(dir);
  return result;
}

}  // namespace sacc::plot
