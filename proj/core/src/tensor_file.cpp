#include "mpp/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "mpp/csv.hpp"
#include "mpp/errors.hpp"

namespace mpp::io {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'P', '1'};
constexpr char kLabelMagic[4] = {'L', 'B', 'L', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_tensor_file(const std::string& path, const MatrixSample& sample) {
  try {
    sample.validate_storage();
  } catch (const validation_error& e) {
    throw io_error(std::string("tensor write: ") + e.what());
  }
  if (sample.n > std::numeric_limits<std::uint32_t>::max() ||
      sample.p > std::numeric_limits<std::uint32_t>::max() ||
      sample.q > std::numeric_limits<std::uint32_t>::max())
    throw io_error("tensor write: dimensions exceed the 32-bit header fields");

  std::string buf;
  buf.reserve(16 + 8 * static_cast<std::size_t>(sample.n * sample.p * sample.q));
  buf.append(kMagic, 4);
  put_u32(buf, static_cast<std::uint32_t>(sample.n));
  put_u32(buf, static_cast<std::uint32_t>(sample.p));
  put_u32(buf, static_cast<std::uint32_t>(sample.q));
  for (Index i = 0; i < sample.n; ++i) {
    const auto x = sample.observation(i);
    for (Index r = 0; r < sample.p; ++r)
      for (Index c = 0; c < sample.q; ++c) put_f64(buf, x(r, c));
  }
  if (sample.has_labels()) {
    buf.append(kLabelMagic, 4);
    for (auto l : sample.labels) buf.push_back(static_cast<char>(l));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw io_error("write failed: " + path);
}

MatrixSample read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw io_error(path + ": not a tensor file (bad magic)");
  const std::uint64_t n = get_u32(buf.data() + 4);
  const std::uint64_t p = get_u32(buf.data() + 8);
  const std::uint64_t q = get_u32(buf.data() + 12);
  const std::uint64_t payload = 8 * n * p * q;
  const std::uint64_t base = 16 + payload;
  const bool with_labels = buf.size() == base + 4 + n;
  if (!with_labels && buf.size() != base)
    throw io_error(path + ": truncated or oversized tensor file");
  if (with_labels && std::memcmp(buf.data() + base, kLabelMagic, 4) != 0)
    throw io_error(path + ": bad label block magic");

  MatrixSample sample(static_cast<Index>(n), static_cast<Index>(p),
                      static_cast<Index>(q));
  const unsigned char* ptr = buf.data() + 16;
  for (Index i = 0; i < sample.n; ++i) {
    auto x = sample.observation(i);
    for (Index r = 0; r < sample.p; ++r)
      for (Index c = 0; c < sample.q; ++c, ptr += 8) x(r, c) = get_f64(ptr);
  }
  if (with_labels) {
    sample.labels.assign(buf.begin() + static_cast<std::ptrdiff_t>(base) + 4, buf.end());
  }
  try {
    sample.validate_storage();
  } catch (const validation_error& e) {
    throw io_error(path + ": " + e.what());
  }
  return sample;
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

double parse_value(const std::string& field, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw io_error(path + ":" + std::to_string(line) + ": bad numeric field '" + field + "'");
  return v;
}

Index parse_index(const std::string& field, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const long long v = std::strtoll(field.c_str(), &end, 10);
  if (end == field.c_str() || *end != '\0' || v < 0)
    throw io_error(path + ":" + std::to_string(line) + ": bad index field '" + field + "'");
  return static_cast<Index>(v);
}

}  // namespace

MatrixSample import_csv(const std::string& path, std::optional<Index> n,
                        std::optional<Index> p, std::optional<Index> q) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const auto header = split_csv_line(line);
  const bool long_form = header.size() == 4 && header[0] == "obs" &&
                         header[1] == "row" && header[2] == "col" &&
                         header[3] == "value";

  if (long_form) {
    struct Cell {
      Index obs, row, col;
      double value;
      std::size_t line;
    };
    std::vector<Cell> cells;
    Index max_obs = -1, max_row = -1, max_col = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto f = split_csv_line(line);
      if (f.size() != 4)
        throw io_error(path + ":" + std::to_string(line_no) + ": expected 4 fields");
      Cell c{parse_index(f[0], path, line_no), parse_index(f[1], path, line_no),
             parse_index(f[2], path, line_no), parse_value(f[3], path, line_no),
             line_no};
      max_obs = std::max(max_obs, c.obs);
      max_row = std::max(max_row, c.row);
      max_col = std::max(max_col, c.col);
      cells.push_back(c);
    }
    const Index nn = n.value_or(max_obs + 1);
    const Index pp = p.value_or(max_row + 1);
    const Index qq = q.value_or(max_col + 1);
    if (nn < 1 || pp < 1 || qq < 1) throw io_error(path + ": no data rows");

    MatrixSample sample(nn, pp, qq);
    sample.data.setZero();
    std::vector<char> seen(static_cast<std::size_t>(nn * pp * qq), 0);
    for (const auto& c : cells) {
      if (c.obs >= nn || c.row >= pp || c.col >= qq)
        throw io_error(path + ":" + std::to_string(c.line) + ": index out of range");
      const std::size_t flat =
          static_cast<std::size_t>((c.obs * pp + c.row) * qq + c.col);
      if (seen[flat])
        throw io_error(path + ":" + std::to_string(c.line) + ": duplicate cell");
      seen[flat] = 1;
      sample.observation(c.obs)(c.row, c.col) = c.value;
    }
    for (std::size_t flat = 0; flat < seen.size(); ++flat) {
      if (!seen[flat]) {
        const Index obs = static_cast<Index>(flat) / (pp * qq);
        const Index rest = static_cast<Index>(flat) % (pp * qq);
        throw io_error(path + ": missing cell (obs=" + std::to_string(obs) +
                       ", row=" + std::to_string(rest / qq) +
                       ", col=" + std::to_string(rest % qq) + ")");
      }
    }
    try {
      sample.validate_storage();
    } catch (const validation_error& e) {
      throw io_error(path + ": " + e.what());
    }
    return sample;
  }

  // Wide form: n rows of p*q values, row-major; dimensions must be explicit.
  if (!p || !q)
    throw io_error(path + ": wide-form CSV requires explicit p and q");
  const Index pp = *p, qq = *q;
  std::vector<std::vector<double>> rows;
  // The first line was already consumed as a header; wide form has none of
  // the long-form header fields, so treat it as data if it parses.
  std::size_t line_no = 1;
  auto take_row = [&](const std::string& record, std::size_t no) {
    const auto f = split_csv_line(record);
    if (static_cast<Index>(f.size()) != pp * qq)
      throw io_error(path + ":" + std::to_string(no) + ": expected " +
                     std::to_string(pp * qq) + " fields");
    std::vector<double> vals;
    vals.reserve(f.size());
    for (const auto& field : f) vals.push_back(parse_value(field, path, no));
    rows.push_back(std::move(vals));
  };
  bool first_is_data = true;
  for (const auto& field : header) {
    char* end = nullptr;
    std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') first_is_data = false;
  }
  if (first_is_data) take_row(line, 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    take_row(line, line_no);
  }
  const Index nn = static_cast<Index>(rows.size());
  if (n && *n != nn)
    throw io_error(path + ": expected " + std::to_string(*n) + " rows, found " +
                   std::to_string(nn));

  MatrixSample sample(nn, pp, qq);
  for (Index i = 0; i < nn; ++i) {
    auto x = sample.observation(i);
    for (Index r = 0; r < pp; ++r)
      for (Index c = 0; c < qq; ++c) x(r, c) = rows[i][r * qq + c];
  }
  try {
    sample.validate_storage();
  } catch (const validation_error& e) {
    throw io_error(path + ": " + e.what());
  }
  return sample;
}

void export_csv(const std::string& path, const MatrixSample& sample) {
  CsvWriter csv(path);
  csv.row({"obs", "row", "col", "value"});
  for (Index i = 0; i < sample.n; ++i) {
    const auto x = sample.observation(i);
    for (Index r = 0; r < sample.p; ++r)
      for (Index c = 0; c < sample.q; ++c)
        csv.row({std::to_string(i), std::to_string(r), std::to_string(c),
                 format_double(x(r, c))});
  }
  csv.flush();
}

}  // namespace mpp::io
