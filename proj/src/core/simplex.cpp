#include "thermohand/simplex.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermohand {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

double checked(const Objective& f, const std::vector<double>& x, int& evals) {
  ++evals;
  const double v = f(x);
  require(std::isfinite(v), ErrorCode::InvalidArgument,
          "simplex: objective returned a non-finite value");
  return v;
}

std::vector<double> affine(const std::vector<double>& origin,
                           const std::vector<double>& toward, double t) {
  std::vector<double> out(origin.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = origin[i] + t * (toward[i] - origin[i]);
  return out;
}

double diameter(const std::vector<Vertex>& simplex) {
  double d = 0.0;
  for (std::size_t v = 1; v < simplex.size(); ++v) {
    double s = 0.0;
    for (std::size_t i = 0; i < simplex[0].x.size(); ++i) {
      const double diff = simplex[v].x[i] - simplex[0].x[i];
      s += diff * diff;
    }
    d = std::max(d, std::sqrt(s));
  }
  return d;
}

} // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0,
                          const std::vector<double>& steps,
                          const SimplexSettings& settings) {
  const std::size_t n = x0.size();
  require(n > 0 && steps.size() == n, ErrorCode::InvalidArgument,
          "simplex: start point and steps must have equal nonzero length");

  SimplexResult result;
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({x0, checked(f, x0, result.evaluations)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += steps[i];
    const double v = checked(f, x, result.evaluations);
    simplex.push_back({std::move(x), v});
  }

  // Stable sort keeps the earlier (older) vertex ahead on ties.
  auto order = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  std::stable_sort(simplex.begin(), simplex.end(), order);

  while (true) {
    if (diameter(simplex) < settings.tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= settings.max_iterations) break;
    ++result.iterations;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
    for (double& c : centroid) c /= static_cast<double>(n);

    Vertex& worst = simplex[n];
    const double f_best = simplex[0].f;
    const double f_second_worst = simplex[n - 1].f;

    auto reflected = affine(centroid, worst.x, -settings.reflection);
    const double f_r = checked(f, reflected, result.evaluations);

    bool do_shrink = false;
    if (f_r < f_best) {
      auto expanded =
          affine(centroid, worst.x, -settings.reflection * settings.expansion);
      const double f_e = checked(f, expanded, result.evaluations);
      if (f_e < f_r)
        worst = {std::move(expanded), f_e};
      else
        worst = {std::move(reflected), f_r};
    } else if (f_r < f_second_worst) {
      worst = {std::move(reflected), f_r};
    } else if (f_r < worst.f) {
      auto outside = affine(centroid, reflected, settings.contraction);
      const double f_oc = checked(f, outside, result.evaluations);
      if (f_oc <= f_r)
        worst = {std::move(outside), f_oc};
      else
        do_shrink = true;
    } else {
      auto inside = affine(centroid, worst.x, settings.contraction);
      const double f_ic = checked(f, inside, result.evaluations);
      if (f_ic < worst.f)
        worst = {std::move(inside), f_ic};
      else
        do_shrink = true;
    }

    if (do_shrink) {
      for (std::size_t v = 1; v <= n; ++v) {
        simplex[v].x = affine(simplex[0].x, simplex[v].x, settings.shrink);
        simplex[v].f = checked(f, simplex[v].x, result.evaluations);
      }
    }
    std::stable_sort(simplex.begin(), simplex.end(), order);
  }

  result.x = simplex[0].x;
  result.value = simplex[0].f;
  return result;
}

} // namespace thermohand
