#include "nilmix/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nilmix::correlate {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double distance(const IntVector& a, const IntVector& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k] - b[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

CorrelationEntry make_entry(std::vector<IntVector> times, Complex value) {
  CorrelationEntry e;
  e.gap = times.size() < 2 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double d = distance(times[i], times[j]);
      e.gap = std::min(e.gap, d);
      e.max_gap = std::max(e.max_gap, d);
    }
  e.times = std::move(times);
  e.value = value;
  return e;
}

std::string CorrelationSeries::to_csv() const {
  std::string out;
  if (!entries.empty()) {
    const auto& t = entries.front().times;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t[i].size(); ++j) out += "t" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + ",";
  }
  out += "gap,maxgap,re,im,abs\n";
  for (const auto& e : entries) {
    for (const auto& t : e.times)
      for (auto x : t) out += std::to_string(x) + ",";
    out += num(e.gap) + "," + num(e.max_gap) + "," + num(e.value.real()) + "," + num(e.value.imag()) + "," +
           num(std::abs(e.value)) + "\n";
  }
  return out;
}

DecayFit decay_fit(const CorrelationSeries& series, double rate, GapKind kind) {
  DecayFit fit;
  fit.rate = rate;
  fit.kind = kind;
  auto gap = [&](const CorrelationEntry& e) { return kind == GapKind::min_gap ? e.gap : e.max_gap; };

  std::vector<double> xs, ys;
  for (const auto& e : series.entries)
    if (std::abs(e.value) > 1e-14) {
      xs.push_back(gap(e));
      ys.push_back(std::log(std::abs(e.value)));
    }
  fit.used = xs.size();
  if (xs.size() < 3) throw DegenerateError("decay fit needs at least three values above 1e-14");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw DegenerateError("decay fit needs at least two distinct gaps");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  // a series on an exact line (constant included) has R^2 = 1
  fit.r2 = syy <= 1e-300 ? 1.0 : 1.0 - ssr / syy;

  std::vector<double> gaps;
  for (const auto& e : series.entries) gaps.push_back(gap(e));
  std::sort(gaps.begin(), gaps.end());
  const double median = gaps[(gaps.size() - 1) / 2];
  for (const auto& e : series.entries)
    if (gap(e) <= median) fit.c = std::max(fit.c, std::abs(e.value) * std::exp(rate * gap(e)));
  fit.envelope_ok = true;
  for (const auto& e : series.entries)
    fit.envelope_ok = fit.envelope_ok && std::abs(e.value) <= fit.c * std::exp(-rate * gap(e)) * (1 + 1e-9);
  return fit;
}

}  // namespace nilmix::correlate
