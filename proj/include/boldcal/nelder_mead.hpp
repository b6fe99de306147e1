#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace boldcal {

struct NelderMeadOptions {
  /// Stop once the spread of objective values over the simplex is below this.
  double f_tolerance = 1e-10;
  int max_iterations = 500;
  /// Edge length of the initial axis-aligned simplex.
  double initial_step = 0.25;
};

enum class NelderMeadStatus { Converged, MaxIterations, OutOfBounds };

template <int N>
struct NelderMeadResult {
  Eigen::Matrix<double, N, 1> point;
  double value;
  int iterations;
  NelderMeadStatus status;
};

/// Derivative-free simplex minimization of `f` starting at `start`.
/// `in_bounds` is checked on every new vertex; the first rejected vertex ends
/// the search with status OutOfBounds (reported at the best vertex so far).
template <int N, typename F, typename Bounds>
NelderMeadResult<N> nelder_mead(F&& f, const Eigen::Matrix<double, N, 1>& start,
                                const NelderMeadOptions& opts, Bounds&& in_bounds) {
  using Vec = Eigen::Matrix<double, N, 1>;
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::array<Vec, N + 1> simplex;
  std::array<double, N + 1> values;
  simplex[0] = start;
  for (int i = 0; i < N; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1](i) += opts.initial_step;
  }
  for (int i = 0; i <= N; ++i) values[i] = f(simplex[i]);

  std::array<int, N + 1> order;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    // stable ordering keeps the search deterministic when values tie
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    std::array<Vec, N + 1> s;
    std::array<double, N + 1> v;
    for (int i = 0; i <= N; ++i) {
      s[i] = simplex[order[i]];
      v[i] = values[order[i]];
    }
    simplex = s;
    values = v;
  };

  auto finish = [&](int iter, NelderMeadStatus status) {
    sort_simplex();
    return NelderMeadResult<N>{simplex[0], values[0], iter, status};
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    sort_simplex();
    if (std::abs(values[N] - values[0]) < opts.f_tolerance) {
      return NelderMeadResult<N>{simplex[0], values[0], iter, NelderMeadStatus::Converged};
    }

    Vec centroid = Vec::Zero();
    for (int i = 0; i < N; ++i) centroid += simplex[i];
    centroid /= double(N);

    const Vec reflected = centroid + kReflect * (centroid - simplex[N]);
    if (!in_bounds(reflected)) return finish(iter, NelderMeadStatus::OutOfBounds);
    const double f_reflected = f(reflected);

    if (f_reflected < values[0]) {
      const Vec expanded = centroid + kExpand * (reflected - centroid);
      if (!in_bounds(expanded)) return finish(iter, NelderMeadStatus::OutOfBounds);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[N] = expanded;
        values[N] = f_expanded;
      } else {
        simplex[N] = reflected;
        values[N] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[N - 1]) {
      simplex[N] = reflected;
      values[N] = f_reflected;
      continue;
    }

    // contraction, outside or inside depending on the reflected value
    const bool outside = f_reflected < values[N];
    const Vec contracted = outside ? Vec(centroid + kContract * (reflected - centroid))
                                   : Vec(centroid + kContract * (simplex[N] - centroid));
    const double f_contracted = f(contracted);
    if (f_contracted < (outside ? f_reflected : values[N])) {
      simplex[N] = contracted;
      values[N] = f_contracted;
      continue;
    }

    for (int i = 1; i <= N; ++i) {
      simplex[i] = simplex[0] + kShrink * (simplex[i] - simplex[0]);
      values[i] = f(simplex[i]);
    }
  }
  return finish(opts.max_iterations, NelderMeadStatus::MaxIterations);
}

}  // namespace boldcal
