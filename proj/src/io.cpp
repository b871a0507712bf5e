#include "gsup/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "gsup/error.hpp"

namespace gsup::io {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'S', 'U', 'P'};
constexpr std::uint32_t kVersionMatrix = 1;
constexpr std::uint32_t kVersionImages = 2;

static_assert(std::endian::native == std::endian::little, "raw matrix IO assumes a little-endian host");

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return is;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated raw header");
  return v;
}

struct RawHeader {
  std::uint32_t version;
  std::uint64_t n;
  std::uint64_t p;
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
};

void write_header(std::ostream& os, const RawHeader& h) {
  os.write(kMagic.data(), kMagic.size());
  put(os, h.version);
  put(os, h.n);
  put(os, h.p);
  if (h.version == kVersionImages) {
    put(os, h.d1);
    put(os, h.d2);
  }
}

RawHeader read_header(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not a GSUP raw matrix");
  RawHeader h{};
  h.version = get<std::uint32_t>(is);
  if (h.version != kVersionMatrix && h.version != kVersionImages) {
    throw IoError("unsupported raw version " + std::to_string(h.version));
  }
  h.n = get<std::uint64_t>(is);
  h.p = get<std::uint64_t>(is);
  if (h.version == kVersionImages) {
    h.d1 = get<std::uint64_t>(is);
    h.d2 = get<std::uint64_t>(is);
    if (h.d1 * h.d2 != h.p) throw IoError("image header: d1 * d2 != p");
  }
  return h;
}

void write_body(std::ostream& os, const DataMatrix& m) {
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!os) throw IoError("raw write failed");
}

DataMatrix read_body(std::istream& is, const RawHeader& h) {
  DataMatrix m(static_cast<Eigen::Index>(h.n), static_cast<Eigen::Index>(h.p));
  if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)))) {
    throw IoError("truncated raw body");
  }
  return m;
}

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::csv : MatrixFormat::raw;
}

void write_csv(const std::filesystem::path& path, const DataMatrix& m) {
  auto os = open_out(path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << 'f' << j;
  os << '\n';
  std::array<char, 32> buf{};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), m(i, j));
      if (j) os << ',';
      os.write(buf.data(), res.ptr - buf.data());
    }
    os << '\n';
  }
  if (!os) throw IoError("csv write failed: " + path.string());
}

DataMatrix read_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.front() == 'f') continue;
    Eigen::Index count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), lineno));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols < 0) cols = count;
    if (count != cols) throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " fields");
    ++rows;
  }
  if (rows == 0) throw IoError("csv has no data rows: " + path.string());
  return Eigen::Map<DataMatrix>(values.data(), rows, cols);
}

void write_raw(std::ostream& os, const DataMatrix& m) {
  write_header(os, {kVersionMatrix, static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())});
  write_body(os, m);
}

void write_raw(const std::filesystem::path& path, const DataMatrix& m) {
  auto os = open_out(path, std::ios::binary);
  write_raw(os, m);
}

DataMatrix read_raw(std::istream& is) { return read_body(is, read_header(is)); }

DataMatrix read_raw(const std::filesystem::path& path) {
  auto is = open_in(path, std::ios::binary);
  return read_raw(is);
}

void write_image_stack(const std::filesystem::path& path, const ImageStack& stack) {
  stack.validate();
  auto os = open_out(path, std::ios::binary);
  write_header(os, {kVersionImages, static_cast<std::uint64_t>(stack.pixels.rows()),
                    static_cast<std::uint64_t>(stack.pixels.cols()), static_cast<std::uint64_t>(stack.d1),
                    static_cast<std::uint64_t>(stack.d2)});
  write_body(os, stack.pixels);
}

ImageStack read_image_stack(const std::filesystem::path& path) {
  auto is = open_in(path, std::ios::binary);
  const RawHeader h = read_header(is);
  ImageStack stack;
  stack.pixels = read_body(is, h);
  if (h.version == kVersionImages) {
    stack.d1 = static_cast<int>(h.d1);
    stack.d2 = static_cast<int>(h.d2);
  } else {
    const auto side = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(h.p))));
    if (side * side != h.p) throw IoError("raw file has no image dimensions and rows are not square");
    stack.d1 = stack.d2 = static_cast<int>(side);
  }
  return stack;
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& m) {
  if (format_from_path(path) == MatrixFormat::csv) {
    write_csv(path, m);
  } else {
    write_raw(path, m);
  }
}

DataMatrix read_matrix(const std::filesystem::path& path) {
  return format_from_path(path) == MatrixFormat::csv ? read_csv(path) : read_raw(path);
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  auto os = open_out(path);
  for (int l : labels) os << l << '\n';
  if (!os) throw IoError("label write failed: " + path.string());
}

Labels read_labels(const std::filesystem::path& path) {
  auto is = open_in(path);
  Labels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad label '" + line + "'");
    }
    out.push_back(v);
  }
  return out;
}

void write_mpca_model(const std::filesystem::path& path, const MpcaModel& model) {
  auto os = open_out(path, std::ios::binary);
  write_raw(os, DataMatrix(model.left_factors));
  write_raw(os, DataMatrix(model.right_factors));
  write_raw(os, DataMatrix(model.mean_image));
}

MpcaModel read_mpca_model(const std::filesystem::path& path) {
  auto is = open_in(path, std::ios::binary);
  MpcaModel model;
  model.left_factors = read_raw(is);
  model.right_factors = read_raw(is);
  model.mean_image = read_raw(is);
  if (model.left_factors.rows() != model.mean_image.rows() || model.right_factors.rows() != model.mean_image.cols()) {
    throw IoError("inconsistent MPCA model file: " + path.string());
  }
  return model;
}

}  // namespace gsup::io
