#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cmax/cmax.hpp"

using namespace cmax;

namespace {

double max_abs_diff(const MultiArray& a, const MultiArray& b) {
  REQUIRE(a.dims == b.dims);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

MultiArray random_array(std::mt19937_64& rng, std::vector<int> dims) {
  MultiArray a = MultiArray::zeros(std::move(dims));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Cplx& v : a.data) v = Cplx(u(rng), u(rng));
  return a;
}

}  // namespace

TEST_CASE("one-dimensional convolution on paper-checkable numbers") {
  MultiArray f = MultiArray::zeros({2});
  f.data = {Cplx(1), Cplx(2)};
  MultiArray g = MultiArray::zeros({2});
  g.data = {Cplx(3), Cplx(4)};
  MultiArray h = naive_convolve(f, g);
  REQUIRE(h.dims == std::vector<int>{3});
  CHECK(std::abs(h.data[0] - Cplx(3)) < 1e-12);
  CHECK(std::abs(h.data[1] - Cplx(10)) < 1e-12);
  CHECK(std::abs(h.data[2] - Cplx(8)) < 1e-12);

  MultiArray hf = fft_convolve(f, g);
  REQUIRE(max_abs_diff(h, hf) < 1e-9);
}

TEST_CASE("convolving with a delta reproduces the input") {
  std::mt19937_64 rng(3);
  MultiArray f = random_array(rng, {3, 4});
  MultiArray delta = MultiArray::zeros({1, 1});
  delta.data[0] = Cplx(1);
  MultiArray h = fft_convolve(f, delta);
  REQUIRE(max_abs_diff(f, h) < 1e-9);
}

TEST_CASE("fast and naive convolution agree in up to four dimensions") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<int>> shapes = {{8}, {5}, {3, 3}, {2, 3, 2}, {2, 2, 2, 2}, {5, 5, 5, 5}};
  for (const auto& shape : shapes) {
    MultiArray f = random_array(rng, shape);
    MultiArray g = random_array(rng, shape);
    MultiArray slow = naive_convolve(f, g);
    MultiArray fast = fft_convolve(f, g);
    REQUIRE(max_abs_diff(slow, fast) < 1e-9);
  }
}

TEST_CASE("self-convolution matches the generic path") {
  std::mt19937_64 rng(23);
  for (const auto& shape : std::vector<std::vector<int>>{{6}, {3, 5}, {3, 3, 3}}) {
    MultiArray f = random_array(rng, shape);
    MultiArray direct = naive_convolve(f, f);
    MultiArray fast = fft_autoconvolve(f);
    REQUIRE(max_abs_diff(direct, fast) < 1e-9);
  }
}

TEST_CASE("transform then inverse transform is the identity") {
  std::mt19937_64 rng(29);
  // mixed power-of-two and awkward prime lengths, multiple axes
  for (const auto& shape : std::vector<std::vector<int>>{{16}, {7}, {13}, {4, 9}, {5, 3, 7}}) {
    MultiArray f = random_array(rng, shape);
    MultiArray back = idft(dft(f));
    REQUIRE(max_abs_diff(f, back) < 1e-9);
  }
}

TEST_CASE("convolution output dims are input dims summed minus one") {
  MultiArray f = MultiArray::zeros({2, 5});
  MultiArray g = MultiArray::zeros({3, 2});
  f.data[0] = g.data[0] = Cplx(1);
  MultiArray h = naive_convolve(f, g);
  REQUIRE(h.dims == std::vector<int>{4, 6});
  MultiArray hf = fft_convolve(f, g);
  REQUIRE(hf.dims == std::vector<int>{4, 6});
}
