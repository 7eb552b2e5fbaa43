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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "addm/dataset.hpp"
#include "addm/error.hpp"

using namespace addm;

namespace {

LabeledDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in, "mem");
}

std::string format_error(const std::string& text) {
  try {
    parse(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

LabeledDataset synthetic(std::size_t normals, std::size_t anomalies) {
  LabeledDataset ds;
  ds.name = "synthetic";
  ds.X = Tensor(Shape{normals + anomalies, 2});
  for (std::size_t i = 0; i < normals + anomalies; ++i) {
    ds.X(i, 0) = 3.0 + static_cast<double>(i % 7);
    ds.X(i, 1) = -1.0 * static_cast<double>(i % 3) + (i >= normals ? 10.0 : 0.0);
    ds.y.push_back(i >= normals);
  }
  return ds;
}

}  // namespace

TEST_CASE("three-row csv") {
  const auto ds = parse("1.5,2,0\n-3,4e-1,1\n0,0,0\n");
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.X(1, 0) == -3.0);
  CHECK(ds.X(1, 1) == 0.4);
  CHECK(ds.y == std::vector<int>{0, 1, 0});
  CHECK(ds.outlier_rate() == doctest::Approx(1.0 / 3.0));
  CHECK(ds.name == "mem");
}

TEST_CASE("header, blank lines, CRLF and BOM") {
  const auto ds = parse("\xEF\xBB\xBF" "a,b,label\r\n\r\n1,2,1\r\n3,4,0\r\n\n");
  CHECK(ds.size() == 2);
  CHECK(ds.X(1, 1) == 4.0);
  CHECK(ds.y == std::vector<int>{1, 0});
}

TEST_CASE("format errors name line and column") {
  CHECK(format_error("").find("no data rows") != std::string::npos);
  CHECK(format_error("a,b,label\n").find("no data rows") != std::string::npos);
  const auto bad = format_error("1,2,0\n3,x,1\n");
  CHECK(bad.find("line 2") != std::string::npos);
  CHECK(bad.find("column 2") != std::string::npos);
  CHECK(format_error("1,2,0\n3,1\n").find("line 2") != std::string::npos);
  const auto label = format_error("1,2,0\n3,4,2\n");
  CHECK(label.find("line 2") != std::string::npos);
  CHECK(label.find("label") != std::string::npos);
  CHECK_FALSE(format_error("1\n").empty());
  CHECK_FALSE(format_error("1,nan,0\n").empty());
}

TEST_CASE("load_dataset uses the file stem") {
  const auto path = std::filesystem::temp_directory_path() / "addm_dataset_test.csv";
  {
    std::ofstream out(path);
    out << "x,y\n1,0\n2,1\n";
  }
  const auto ds = load_dataset(path.string());
  CHECK(ds.name == "addm_dataset_test");
  CHECK(ds.size() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_dataset(path.string()), Error);
}

TEST_CASE("split sizes and membership") {
  const auto ds = synthetic(100, 10);
  const auto s = split_and_standardize(ds, 0.8, 7);
  CHECK(s.train.rows() == 80);
  CHECK(s.test.rows() == 30);
  CHECK(s.train_rows.size() == 80);
  CHECK(s.test_rows.size() == 30);
  CHECK(std::count(s.test_labels.begin(), s.test_labels.end(), 1) == 10);
  std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
  all.insert(s.test_rows.begin(), s.test_rows.end());
  CHECK(all.size() == 110);
  for (std::size_t r : s.train_rows) CHECK(ds.y[r] == 0);
  CHECK(std::is_sorted(s.test_rows.begin(), s.test_rows.end()));
  for (std::size_t i = 0; i < 30; ++i) CHECK(s.test_labels[i] == ds.y[s.test_rows[i]]);
}

TEST_CASE("standardization uses training statistics") {
  const auto ds = synthetic(100, 10);
  const auto s = split_and_standardize(ds, 0.8, 7);
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 80; ++i) mean += s.train(i, c);
    mean /= 80.0;
    for (std::size_t i = 0; i < 80; ++i) sq += (s.train(i, c) - mean) * (s.train(i, c) - mean);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(sq / 80.0 == doctest::Approx(1.0).epsilon(1e-12));
  }
  const std::size_t r = s.test_rows[0];
  CHECK(s.test(0, 0) == doctest::Approx((ds.X(r, 0) - s.scaler.mean[0]) / s.scaler.scale[0]));
}

TEST_CASE("constant columns get unit scale") {
  const Tensor X = Tensor::matrix({{1.0, 5.0}, {3.0, 5.0}});
  const auto sc = Scaler::fit(X);
  CHECK(sc.mean == std::vector<double>{2.0, 5.0});
  CHECK(sc.scale == std::vector<double>{1.0, 1.0});
  const Tensor T = sc.transform(X);
  CHECK(T(0, 0) == -1.0);
  CHECK(T(1, 1) == 0.0);
  CHECK_THROWS_AS(sc.transform(Tensor(Shape{1, 3})), ShapeError);
}

TEST_CASE("split determinism and errors") {
  const auto ds = synthetic(50, 5);
  const auto a = split_and_standardize(ds, 0.6, 3), b = split_and_standardize(ds, 0.6, 3);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.train == b.train);
  CHECK(split_and_standardize(ds, 0.6, 4).train_rows != a.train_rows);
  CHECK(split_and_standardize(ds, 0.001, 3).train.rows() == 1);
  CHECK_THROWS_AS(split_and_standardize(ds, 0.0, 3), InvalidArgument);
  CHECK_THROWS_AS(split_and_standardize(ds, 1.5, 3), InvalidArgument);
  CHECK_THROWS_AS(split_and_standardize(synthetic(0, 5), 0.8, 3), InvalidArgument);
}
