// Copyright 2026 The gw3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gw3d/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gw3d/error.hpp"
#include "gw3d/kernels.hpp"
#include "gw3d/special_functions.hpp"

namespace gw3d {

Histogram Histogram::fixed_width(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs lo < hi and at least one bin");
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  return h;
}

Histogram Histogram::log_width(double lo, double hi, std::size_t bins) {
  if (!(lo > 0.0)) throw Error(ErrorCode::kInvalidArgument, "log-width histogram needs lo > 0");
  Histogram h = fixed_width(std::log(lo), std::log(hi), bins);
  for (double& e : h.edges) e = std::exp(e);
  h.edges.front() = lo;
  h.edges.back() = hi;
  return h;
}

Histogram Histogram::empty_like() const {
  Histogram h;
  h.edges = edges;
  h.counts.assign(counts.size(), 0);
  return h;
}

std::size_t Histogram::bin_of(double value) const {
  if (edges.empty() || !(value >= edges.front()) || value >= edges.back()) return kOutside;
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin()) - 1;
}

void Histogram::add(double value) {
  ++n;
  const std::size_t b = bin_of(value);
  if (b != kOutside) {
    ++counts[b];
  } else if (value < edges.front()) {
    ++underflow;
  } else {
    ++overflow;  // includes NaN
  }
}

Histogram& Histogram::merge(const Histogram& other) {
  if (edges != other.edges) throw Error(ErrorCode::kInvalidArgument, "cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n += other.n;
  underflow += other.underflow;
  overflow += other.overflow;
  return *this;
}

std::size_t Histogram::mode_bin() const {
  if (counts.empty()) return kOutside;
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::string Histogram::to_csv() const {
  std::string out = "lo,hi,count\n";
  char buf[96];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%llu\n", edges[i], edges[i + 1],
                  static_cast<unsigned long long>(counts[i]));
    out += buf;
  }
  return out;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(t);
  return r * std::cos(t);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma needs shape, scale > 0");
  if (shape < 1.0) {
    const double u = 1.0 - uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double gamma_log_pdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

GammaFit fit_gamma(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::kInvalidArgument, "gamma fit needs at least 2 samples");
  double sum = 0.0;
  double sum_log = 0.0;
  double lo = samples[0];
  double hi = samples[0];
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::kNonPositiveSample, "gamma fit needs positive finite samples");
    sum += x;
    sum_log += std::log(x);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) throw Error(ErrorCode::kZeroVariance, "zero-variance sample");
  const auto n = static_cast<double>(samples.size());
  const double mean = sum / n;
  const double mean_log = sum_log / n;
  const double s = std::log(mean) - mean_log;
  if (!(s > 0.0)) throw Error(ErrorCode::kZeroVariance, "sample variance below resolution");

  GammaFit fit;
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 50;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double f = std::log(k) - digamma(k) - s;
    const double df = 1.0 / k - trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = 0.5 * k;
    const double step = std::fabs(next - k);
    k = next;
    fit.iterations = i;
    if (step <= kTolerance * std::max(1.0, k)) {
      fit.converged = true;
      break;
    }
  }
  fit.shape = k;
  fit.scale = mean / k;
  fit.log_likelihood = n * ((k - 1.0) * mean_log - mean / fit.scale - std::lgamma(k) - k * std::log(fit.scale));
  return fit;
}

Histogram BinSpec::make() const {
  return policy == BinPolicy::kLogWidth ? Histogram::log_width(lo, hi, bins) : Histogram::fixed_width(lo, hi, bins);
}

std::vector<double> facet_perimeters(const TriangleMesh& mesh, const WordConfig& config) {
  std::vector<double> out;
  for (const LocalFeature& f : derive_local_features(mesh, config)) out.push_back(f.perimeter);
  return out;
}

Histogram histogram_of(std::span<const double> values, const BinSpec& bins, Exec exec) {
  Histogram h = bins.make();
  if (exec == Exec::kParallel) {
    kernels::parallel::accumulate(h, values);
  } else {
    kernels::serial::accumulate(h, values);
  }
  return h;
}

Histogram perimeter_histogram(std::span<const TriangleMesh> corpus, const BinSpec& bins, const WordConfig& config,
                              Exec exec) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "empty corpus");
  Histogram total = bins.make();
  for (const TriangleMesh& mesh : corpus) total.merge(histogram_of(facet_perimeters(mesh, config), bins, exec));
  return total;
}

std::string histogram_svg(const Histogram& h, const std::optional<GammaFit>& fit, const std::string& title) {
  constexpr double kWidth = 640;
  constexpr double kHeight = 360;
  constexpr double kMargin = 40;
  const bool log_x = h.edges.size() > 2 && h.edges.front() > 0.0 &&
                     std::fabs((h.edges[2] - h.edges[1]) - (h.edges[1] - h.edges[0])) > 1e-9 * (h.edges[1] - h.edges[0]);
  auto xmap = [&](double v) {
    const double a = log_x ? std::log(h.edges.front()) : h.edges.front();
    const double b = log_x ? std::log(h.edges.back()) : h.edges.back();
    const double t = ((log_x ? std::log(v) : v) - a) / (b - a);
    return kMargin + t * (kWidth - 2 * kMargin);
  };
  double peak = 1.0;
  for (auto c : h.counts) peak = std::max(peak, static_cast<double>(c));

  std::vector<double> curve;
  if (fit) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      const double mid = 0.5 * (h.edges[i] + h.edges[i + 1]);
      const double expected = static_cast<double>(h.n) * (h.edges[i + 1] - h.edges[i]) *
                              std::exp(gamma_log_pdf(mid, fit->shape, fit->scale));
      curve.push_back(expected);
      peak = std::max(peak, expected);
    }
  }
  auto ymap = [&](double c) { return kHeight - kMargin - c / peak * (kHeight - 2 * kMargin); };

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                kWidth, kHeight, kWidth, kHeight);
  out += buf;
  out += "<title>" + title + "</title>\n";
  std::snprintf(buf, sizeof(buf), "<text x=\"%.0f\" y=\"20\" font-size=\"14\">%s</text>\n", kMargin, title.c_str());
  out += buf;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double x0 = xmap(h.edges[i]);
    const double x1 = xmap(h.edges[i + 1]);
    const double y = ymap(static_cast<double>(h.counts[i]));
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4a7ab5\"/>\n", x0, y,
                  std::max(0.0, x1 - x0 - 0.5), kHeight - kMargin - y);
    out += buf;
  }
  if (!curve.empty()) {
    out += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", xmap(0.5 * (h.edges[i] + h.edges[i + 1])), ymap(curve[i]));
      out += buf;
    }
    out += "\"/>\n";
  }
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n", kMargin,
                kHeight - kMargin, kWidth - kMargin, kHeight - kMargin);
  out += buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"%.0f\" y=\"%.0f\" font-size=\"11\">%.4g</text>\n", kMargin,
                kHeight - kMargin + 16, h.edges.front());
  out += buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"%.0f\" y=\"%.0f\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                kWidth - kMargin, kHeight - kMargin + 16, h.edges.back());
  out += buf;
  out += "</svg>\n";
  return out;
}

std::string gamma_fit_text(const GammaFit& fit) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "shape %.17g\nscale %.17g\nlog_likelihood %.17g\niterations %d\nconverged %s\n",
                fit.shape, fit.scale, fit.log_likelihood, fit.iterations, fit.converged ? "true" : "false");
  return buf;
}

}  // namespace gw3d
