#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "gsup/error.hpp"
#include "gsup/io.hpp"
#include "support.hpp"

using namespace gsup;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gsup_io_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

DataMatrix awkward_values() {
  auto m = test::normal_cloud(25, 4, 80, 1e3);
  m(0, 0) = 0.1;
  m(0, 1) = -0.0;
  m(0, 2) = std::numeric_limits<double>::denorm_min();
  m(0, 3) = std::numeric_limits<double>::max();
  m(1, 0) = 1.0 / 3.0;
  m(1, 1) = 1e-300;
  return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("raw round trip is exact") {
  TempDir dir;
  const auto m = awkward_values();
  io::write_raw(dir.path / "m.bin", m);
  CHECK(io::read_raw(dir.path / "m.bin") == m);
  std::stringstream ss;
  io::write_raw(ss, m);
  CHECK(io::read_raw(ss) == m);
}

TEST_CASE("csv round trip") {
  TempDir dir;
  const auto m = awkward_values();
  io::write_csv(dir.path / "m.csv", m);
  const auto back = io::read_csv(dir.path / "m.csv");
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) CHECK(std::abs(back(i, c) - m(i, c)) <= 1e-15 * std::abs(m(i, c)));
  }
  std::ifstream in(dir.path / "m.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == static_cast<std::size_t>(m.rows()) + 1);
}

TEST_CASE("format dispatch and image stacks") {
  TempDir dir;
  CHECK(io::format_from_path("a.csv") == io::MatrixFormat::csv);
  CHECK(io::format_from_path("a.bin") == io::MatrixFormat::raw);
  const auto m = test::normal_cloud(5, 3, 81);
  io::write_matrix(dir.path / "x.csv", m);
  io::write_matrix(dir.path / "x.bin", m);
  CHECK(io::read_matrix(dir.path / "x.bin") == m);
  CHECK((io::read_matrix(dir.path / "x.csv") - m).cwiseAbs().maxCoeff() == 0.0);

  ImageStack s;
  s.pixels = test::normal_cloud(4, 12, 82);
  s.d1 = 3;
  s.d2 = 4;
  io::write_image_stack(dir.path / "s.bin", s);
  const auto back = io::read_image_stack(dir.path / "s.bin");
  CHECK(back.d1 == 3);
  CHECK(back.d2 == 4);
  CHECK(back.pixels == s.pixels);

  io::write_raw(dir.path / "sq.bin", test::normal_cloud(2, 16, 83));
  CHECK(io::read_image_stack(dir.path / "sq.bin").d1 == 4);
  CHECK_THROWS(io::read_image_stack(dir.path / "x.bin"));
}

TEST_CASE("labels and models") {
  TempDir dir;
  const Labels labels{0, 3, 1, 1, 2};
  io::write_labels(dir.path / "l.txt", labels);
  CHECK(io::read_labels(dir.path / "l.txt") == labels);

  MpcaModel model;
  model.left_factors = Matrix::Random(5, 2);
  model.right_factors = Matrix::Random(4, 3);
  model.mean_image = Matrix::Random(5, 4);
  io::write_mpca_model(dir.path / "m.model", model);
  const auto back = io::read_mpca_model(dir.path / "m.model");
  CHECK(back.left_factors == model.left_factors);
  CHECK(back.right_factors == model.right_factors);
  CHECK(back.mean_image == model.mean_image);
}

TEST_CASE("corrupt input is rejected") {
  TempDir dir;
  {
    std::ofstream out(dir.path / "bad.bin", std::ios::binary);
    out << "NOPE1234";
  }
  CHECK_THROWS(io::read_raw(dir.path / "bad.bin"));
  {
    std::ofstream out(dir.path / "bad.csv");
    out << "f0,f1\n1,2\n3\n";
  }
  CHECK_THROWS(io::read_csv(dir.path / "bad.csv"));
  CHECK_THROWS(io::read_raw(dir.path / "missing.bin"));
  const auto m = test::normal_cloud(3, 2, 84);
  std::stringstream ss;
  io::write_raw(ss, m);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 4);
  std::stringstream cut(bytes);
  CHECK_THROWS(io::read_raw(cut));
}

}  // TEST_SUITE
