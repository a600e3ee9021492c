#include "sap/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>

#include "sap/errors.hpp"
#include "sap/linalg.hpp"

namespace sap::io {

namespace {

constexpr char kMagic[4] = {0x53, 0x45, 0x43, 0x31};  // "SEC1"

std::ifstream open_input(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void append_u64_le(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

std::uint64_t read_u64_le(const unsigned char* bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return value;
}

// 17 significant digits, locale-independent; enough to recover the exact
// double on parse, so repeated write/read cycles are stable.
std::string format_double(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("cannot serialize non-finite value " + std::to_string(value));
  }
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  std::size_t begin = 0, end = cell.size();
  while (begin < end && (cell[begin] == ' ' || cell[begin] == '\t')) ++begin;
  while (end > begin && (cell[end - 1] == ' ' || cell[end - 1] == '\t' || cell[end - 1] == '\r')) {
    --end;
  }
  double value = 0.0;
  const auto res = std::from_chars(cell.data() + begin, cell.data() + end, value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + end || begin == end) {
    throw IoError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                  ": cannot parse '" + cell.substr(begin, end - begin) + "' as a number");
  }
  return value;
}

void escape_json_string(std::string& out, const std::string& s) {
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

void dump_value(std::string& out, const Json& value, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner_pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (value.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += value.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      break;
    case Json::value_t::number_float: out += format_double(value.get<double>()); break;
    case Json::value_t::string: escape_json_string(out, value.get<std::string>()); break;
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        out += inner_pad;
        dump_value(out, value[i], depth + 1);
        if (i + 1 < value.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& item : value.items()) {
        out += inner_pad;
        escape_json_string(out, item.key());
        out += ": ";
        dump_value(out, item.value(), depth + 1);
        if (++i < value.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      break;
    }
    default:
      throw InvalidArgument("unsupported JSON value type");
  }
}

bool has_csv_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string tail = path.substr(path.size() - 4);
  for (char& c : tail) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return tail == ".csv";
}

}  // namespace

DataSet load_csv(const std::string& path, bool has_header) {
  std::ifstream in = open_input(path, std::ios::in);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  std::size_t width = 0;
  bool skipped_header = !has_header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    if (line.empty()) {
      // Allow a trailing blank line only.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw IoError("row " + std::to_string(line_number) + ": empty line inside table");
    }
    std::vector<double> row;
    std::size_t begin = 0;
    std::size_t col = 1;
    while (true) {
      const std::size_t comma = line.find(',', begin);
      const std::string cell =
          line.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
      row.push_back(parse_cell(cell, line_number, col));
      if (comma == std::string::npos) break;
      begin = comma + 1;
      ++col;
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw IoError("row " + std::to_string(line_number) + " has " + std::to_string(row.size()) +
                    " columns, expected " + std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  DataSet data;
  data.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      data.points(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  data.set_meta("source", path);
  return data;
}

void save_csv(const Matrix& matrix, const std::string& path) {
  std::ofstream out = open_output(path, std::ios::out | std::ios::trunc);
  std::string text;
  for (Index r = 0; r < matrix.rows(); ++r) {
    for (Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) text.push_back(',');
      text += format_double(matrix(r, c));
    }
    text.push_back('\n');
  }
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

void save_matrix_binary(const Matrix& matrix, const std::string& path) {
  if (!matrix.allFinite()) {
    throw InvalidArgument("binary matrix output requires finite entries");
  }
  std::string payload;
  payload.reserve(20 + static_cast<std::size_t>(matrix.size()) * 8);
  payload.append(kMagic, 4);
  append_u64_le(payload, static_cast<std::uint64_t>(matrix.rows()));
  append_u64_le(payload, static_cast<std::uint64_t>(matrix.cols()));
  for (Index r = 0; r < matrix.rows(); ++r) {
    for (Index c = 0; c < matrix.cols(); ++c) {
      append_u64_le(payload, std::bit_cast<std::uint64_t>(matrix(r, c)));
    }
  }
  std::ofstream out = open_output(path, std::ios::out | std::ios::trunc | std::ios::binary);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("failed writing " + path);
}

Matrix load_matrix_binary(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 20) throw IoError(path + ": truncated header (" +
                                       std::to_string(bytes.size()) + " bytes)");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw IoError(path + ": bad magic, not a binary matrix file");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = read_u64_le(raw + 4);
  const std::uint64_t cols = read_u64_le(raw + 12);
  const std::uint64_t max_index = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
  const unsigned __int128 cells = static_cast<unsigned __int128>(rows) * cols;
  if (rows > max_index || cols > max_index || cells > (std::uint64_t{1} << 60)) {
    throw IoError(path + ": matrix dimensions overflow");
  }
  const std::uint64_t expected = 20 + static_cast<std::uint64_t>(cells) * 8;
  if (bytes.size() != expected) {
    throw IoError(path + ": expected " + std::to_string(expected) + " bytes for " +
                  std::to_string(rows) + "x" + std::to_string(cols) + ", found " +
                  std::to_string(bytes.size()));
  }
  Matrix matrix(static_cast<Index>(rows), static_cast<Index>(cols));
  const unsigned char* cursor = raw + 20;
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      matrix(static_cast<Index>(r), static_cast<Index>(c)) =
          std::bit_cast<double>(read_u64_le(cursor));
      cursor += 8;
    }
  }
  return matrix;
}

void save_dataset(const DataSet& data, const std::string& path) {
  if (has_csv_extension(path)) {
    save_csv(data.points, path);
  } else {
    save_matrix_binary(data.points, path);
  }
}

DataSet load_dataset(const std::string& path) {
  {
    std::ifstream probe = open_input(path, std::ios::in | std::ios::binary);
    char head[4] = {0, 0, 0, 0};
    probe.read(head, 4);
    if (probe.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0) {
      DataSet data;
      data.points = load_matrix_binary(path);
      data.set_meta("source", path);
      return data;
    }
  }
  return load_csv(path, false);
}

PcaReduction pca_preprocess(const DataSet& data, Index target_dim) {
  const Index k = data.count();
  const Index n = data.dim();
  if (target_dim < 1 || target_dim > std::min(k, n)) {
    throw InvalidArgument("pca_preprocess: need 1 <= target_dim <= min(points, dim) = " +
                          std::to_string(std::min(k, n)));
  }
  PcaReduction out;
  out.mean = data.points.colwise().mean();
  const Matrix centered = data.points.rowwise() - out.mean.transpose();
  // Principal directions = left singular vectors of the transposed cloud.
  const Matrix directions = linalg::left_spectrum(centered.transpose()).u;
  out.basis = directions.leftCols(target_dim);
  out.reduced.points = centered * out.basis;
  out.reduced.meta = data.meta;
  out.reduced.set_meta("pca_target_dim", std::to_string(target_dim));
  return out;
}

std::string dump_json(const Json& value) {
  std::string out;
  dump_value(out, value, 0);
  out.push_back('\n');
  return out;
}

void write_results(const ResultsDocument& doc, const std::string& path) {
  Json root = Json::object();
  root["schema_version"] = doc.schema_version;
  root["kind"] = doc.kind;
  root["config"] = doc.config;
  root["outputs"] = doc.outputs;
  if (!doc.timing.empty()) root["timing"] = doc.timing;
  std::ofstream out = open_output(path, std::ios::out | std::ios::trunc | std::ios::binary);
  out << dump_json(root);
  if (!out) throw IoError("failed writing " + path);
}

ResultsDocument read_results(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json root = Json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw IoError(path + ": malformed results JSON");
  }
  if (!root.contains("schema_version") || !root["schema_version"].is_number_integer()) {
    throw IoError(path + ": missing schema_version");
  }
  ResultsDocument doc;
  doc.schema_version = root["schema_version"].get<int>();
  if (doc.schema_version != kSchemaVersion) {
    throw IoError(path + ": unsupported schema_version " + std::to_string(doc.schema_version) +
                  " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (!root.contains("kind") || !root["kind"].is_string()) {
    throw IoError(path + ": missing kind");
  }
  doc.kind = root["kind"].get<std::string>();
  doc.config = root.value("config", Json::object());
  doc.outputs = root.value("outputs", Json::object());
  doc.timing = root.value("timing", Json::object());
  return doc;
}

void save_curve_csv(const std::vector<analysis::DimensionCurve>& curves,
                    const std::string& path) {
  std::ofstream out = open_output(path, std::ios::out | std::ios::trunc);
  std::string text = "dim,min_norm,run_id\n";
  for (std::size_t run = 0; run < curves.size(); ++run) {
    const analysis::DimensionCurve& curve = curves[run];
    for (std::size_t i = 0; i < curve.dims.size(); ++i) {
      text += std::to_string(curve.dims[i]);
      text.push_back(',');
      text += format_double(curve.min_norms[i]);
      text.push_back(',');
      text += std::to_string(run);
      text.push_back('\n');
    }
  }
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sap::io
