// Copyright 2026 The ADDM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial versus OpenMP timings for the batch kernels. Each pair of results is
// also compared for bit equality.
//
//   bench_kernels [rows] [features] [input_dim] [rank] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include "addm/batch_kernels.hpp"
#include "addm/rng.hpp"

namespace {

using addm::Shape;
using addm::Tensor;
namespace k = addm::kernels;

Tensor random_tensor(Shape shape, addm::Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = n(rng);
  return t;
}

template <typename F>
double best_seconds(std::size_t repeats, F&& f) {
  double best = 1e300;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

template <typename Serial, typename Parallel>
void compare(const char* name, std::size_t repeats, Serial&& serial, Parallel&& parallel) {
  decltype(serial()) a, b;
  const double ts = best_seconds(repeats, [&] { a = serial(); });
  const double tp = best_seconds(repeats, [&] { b = parallel(); });
  std::printf("%-22s %12.6f %12.6f %8.2fx  %s\n", name, ts, tp, ts / tp,
              a == b ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  auto arg = [&](int i, std::size_t fallback) {
    return argc > i ? static_cast<std::size_t>(std::strtoull(argv[i], nullptr, 10)) : fallback;
  };
  const std::size_t m = arg(1, 10000), D = arg(2, 1024), d = arg(3, 16), r = arg(4, 64),
                    repeats = arg(5, 3);

  addm::Rng rng(7);
  const Tensor X = random_tensor({m, d}, rng);
  const Tensor W = random_tensor({D, d}, rng);
  std::vector<double> phases(D);
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  for (double& b : phases) b = u(rng);
  const Tensor F = k::serial::normalize_rows(k::serial::fourier_features(X, W, phases));
  Tensor V = random_tensor({r, D}, rng);
  std::vector<double> lambda(r, 1.0 / static_cast<double>(r));
  const std::size_t small = std::min<std::size_t>(m, 1000);
  std::vector<std::size_t> head(small);
  for (std::size_t i = 0; i < small; ++i) head[i] = i;
  const Tensor Fs = F.rows_subset(head);
  const Tensor Xs = X.rows_subset(head);

  std::printf("m=%zu D=%zu d=%zu r=%zu threads=%d\n", m, D, d, r, omp_get_max_threads());
  std::printf("%-22s %12s %12s %9s\n", "kernel", "serial [s]", "omp [s]", "speedup");
  compare("fourier_features", repeats, [&] { return k::serial::fourier_features(X, W, phases); },
          [&] { return k::omp::fourier_features(X, W, phases); });
  compare("normalize_rows", repeats, [&] { return k::serial::normalize_rows(F); },
          [&] { return k::omp::normalize_rows(F); });
  compare("projected_densities", repeats,
          [&] { return k::serial::projected_densities(F, V, lambda, 1.0); },
          [&] { return k::omp::projected_densities(F, V, lambda, 1.0); });
  compare("density_matrix", repeats, [&] { return k::serial::density_matrix(Fs); },
          [&] { return k::omp::density_matrix(Fs); });
  compare("gram_matrix", repeats, [&] { return k::serial::gram_matrix(Fs); },
          [&] { return k::omp::gram_matrix(Fs); });
  compare("kde_densities", repeats, [&] { return k::serial::kde_densities(Xs, X, 0.5, 1.0); },
          [&] { return k::omp::kde_densities(Xs, X, 0.5, 1.0); });
  return 0;
}
