#include "memtransform/signal_io.hpp"

#include "memtransform/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace memtransform {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

Error format_error(const fs::path& path, std::size_t line, std::size_t column,
                   const std::string& msg) {
  std::string where = path.string() + ":" + std::to_string(line);
  if (column > 0) where += ":" + std::to_string(column);
  return Error(ErrorKind::Format, where + ": " + msg);
}

std::ifstream open_input(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

} // namespace

void Recording::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorKind::InvalidInput, "recording: sample_rate must be positive");
  }
  if (channel_names.size() != samples.size()) {
    throw Error(ErrorKind::InvalidInput, "recording: channel name count does not match channels");
  }
  for (const auto& ch : samples) {
    if (ch.size() != num_samples()) throw Error(ErrorKind::InvalidInput, "recording: ragged channels");
  }
}

std::string read_file(const fs::path& path) {
  auto in = open_input(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code dir_ec;
    fs::create_directories(path.parent_path(), dir_ec);
    if (dir_ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + dir_ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string format_number(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

NumericTable read_table_csv(const fs::path& path) {
  auto in = open_input(path);
  NumericTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      table.comments.emplace_back(trim(text.substr(1)));
      continue;
    }
    const auto cells = split_commas(text);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) throw format_error(path, lineno, c + 1, "empty column name");
        table.columns.emplace_back(cells[c]);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw format_error(path, lineno, 0,
                         "row " + std::to_string(table.rows.size() + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw format_error(path, lineno, c + 1, "not a finite number: '" + std::string(cells[c]) + "'");
      }
      row.push_back(*v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw format_error(path, lineno, 0, "missing header row");
  return table;
}

Recording read_csv(const fs::path& path) {
  const auto table = read_table_csv(path);
  std::optional<double> rate;
  for (const auto& c : table.comments) {
    const auto eq = c.find('=');
    if (eq == std::string::npos || trim(std::string_view(c).substr(0, eq)) != "sample_rate") continue;
    rate = parse_double(trim(std::string_view(c).substr(eq + 1)));
    if (!rate || !(*rate > 0.0) || !std::isfinite(*rate)) {
      throw format_error(path, 0, 0, "invalid sample_rate comment '" + c + "'");
    }
  }
  if (!rate) throw format_error(path, 0, 0, "missing '# sample_rate=<Hz>' comment");

  Recording rec;
  rec.sample_rate = *rate;
  rec.channel_names = table.columns;
  rec.samples.assign(table.columns.size(), {});
  for (auto& ch : rec.samples) ch.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) rec.samples[c].push_back(row[c]);
  }
  return rec;
}

void write_csv(const Recording& rec, const fs::path& path) {
  rec.validate();
  std::string out = "# sample_rate=" + format_number(rec.sample_rate, 17) + "\n";
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    if (c) out += ',';
    out += rec.channel_names[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < rec.num_samples(); ++i) {
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      if (c) out += ',';
      out += format_number(rec.samples[c][i], 17);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

} // namespace

Recording read_raw(const fs::path& path, const RawMeta& meta) {
  if (meta.encoding != "f32le") {
    throw Error(ErrorKind::Format, "raw: unsupported encoding '" + meta.encoding + "'");
  }
  if (meta.channels < 1) throw Error(ErrorKind::Format, "raw: channel count must be >= 1");
  if (!(meta.sample_rate > 0.0)) throw Error(ErrorKind::Format, "raw: sample_rate must be positive");

  const std::string bytes = read_file(path);
  const std::size_t frame_bytes = 4 * meta.channels;
  if (bytes.size() % frame_bytes != 0) {
    throw Error(ErrorKind::Format, path.string() + ": " + std::to_string(bytes.size()) +
                                       " bytes is not a whole number of " +
                                       std::to_string(frame_bytes) + "-byte frames");
  }
  const std::size_t n = bytes.size() / frame_bytes;
  Recording rec;
  rec.sample_rate = meta.sample_rate;
  for (std::size_t c = 0; c < meta.channels; ++c) rec.channel_names.push_back("ch" + std::to_string(c + 1));
  rec.samples.assign(meta.channels, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < meta.channels; ++c) {
      std::uint32_t word = 0;
      std::memcpy(&word, bytes.data() + (i * meta.channels + c) * 4, 4);
      rec.samples[c][i] = std::bit_cast<float>(to_little_endian(word));
    }
  }
  return rec;
}

void write_raw(const Recording& rec, const fs::path& path) {
  rec.validate();
  std::string bytes(rec.num_samples() * rec.num_channels() * 4, '\0');
  std::size_t pos = 0;
  for (std::size_t i = 0; i < rec.num_samples(); ++i) {
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      const auto word = to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(rec.samples[c][i])));
      std::memcpy(bytes.data() + pos, &word, 4);
      pos += 4;
    }
  }
  write_file_atomic(path, bytes);
}

RawMeta read_raw_sidecar(const fs::path& path) {
  RawMeta meta;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    for (const auto& [key, value] : j.items()) {
      if (key == "channels") meta.channels = value.get<std::size_t>();
      else if (key == "sample_rate") meta.sample_rate = value.get<double>();
      else if (key == "encoding") meta.encoding = value.get<std::string>();
      else throw Error(ErrorKind::Format, "unknown key '" + key + "'");
    }
    if (!j.contains("channels") || !j.contains("sample_rate")) {
      throw Error(ErrorKind::Format, "sidecar needs 'channels' and 'sample_rate'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::Format, path.string() + ": " + e.what());
  }
  return meta;
}

void write_raw_sidecar(const RawMeta& meta, const fs::path& path) {
  nlohmann::ordered_json j;
  j["channels"] = meta.channels;
  j["sample_rate"] = meta.sample_rate;
  j["encoding"] = meta.encoding;
  write_file_atomic(path, j.dump(2) + "\n");
}

Recording downsample_mean(const Recording& rec, std::size_t factor) {
  if (factor < 1) throw Error(ErrorKind::Config, "downsample factor must be >= 1");
  rec.validate();
  Recording out;
  out.channel_names = rec.channel_names;
  out.sample_rate = rec.sample_rate / static_cast<double>(factor);
  const std::size_t n = rec.num_samples() / factor;
  out.samples.reserve(rec.num_channels());
  for (const auto& ch : rec.samples) {
    std::vector<double> reduced(n);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < factor; ++j) sum += ch[i * factor + j];
      reduced[i] = sum / static_cast<double>(factor);
    }
    out.samples.push_back(std::move(reduced));
  }
  return out;
}

namespace {

void require_plain_label(const std::string& label) {
  if (label.find_first_of(",\n\r") != std::string::npos) {
    throw Error(ErrorKind::InvalidInput, "matrix row label contains a separator: '" + label + "'");
  }
}

} // namespace

void write_matrix_csv(const FingerprintMatrix& matrix, const fs::path& path) {
  std::string out = "label";
  for (std::size_t col = 0; col < matrix.cols; ++col) {
    out += ',';
    out += format_number(static_cast<double>(col) * matrix.segment_duration, 9);
  }
  out += '\n';
  if (!matrix.empty()) {
    for (std::size_t row = 0; row < matrix.rows(); ++row) {
      require_plain_label(matrix.row_labels[row]);
      out += matrix.row_labels[row];
      for (std::size_t col = 0; col < matrix.cols; ++col) {
        out += ',';
        out += format_number(matrix.at(row, col), 9);
      }
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

FingerprintMatrix read_matrix_csv(const fs::path& path) {
  auto in = open_input(path);
  FingerprintMatrix m;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split_commas(text);
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) throw format_error(path, lineno, c + 1, "not a number: '" + std::string(cells[c]) + "'");
      values.push_back(*v);
    }
    if (!have_header) {
      have_header = true;
      if (cells.front() != "label") throw format_error(path, lineno, 1, "expected 'label' header");
      times = std::move(values);
      continue;
    }
    if (values.size() != times.size()) {
      throw format_error(path, lineno, 0, "row width does not match header");
    }
    m.row_labels.emplace_back(cells.front());
    rows.push_back(std::move(values));
  }
  if (!have_header) throw format_error(path, 1, 0, "empty file");
  m.cols = rows.empty() ? 0 : times.size();
  m.segment_duration = times.size() >= 2 ? times[1] - times[0] : 0.0;
  m.values.resize(m.rows() * m.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

std::string encode_pgm(const FingerprintMatrix& matrix) {
  if (matrix.empty()) throw Error(ErrorKind::InvalidInput, "write_pgm: empty matrix");
  const auto [lo_it, hi_it] = std::minmax_element(matrix.values.begin(), matrix.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  std::string out = "P5\n" + std::to_string(matrix.cols) + " " + std::to_string(matrix.rows()) + "\n255\n";
  out.reserve(out.size() + matrix.values.size());
  for (std::size_t row = 0; row < matrix.rows(); ++row) {
    for (std::size_t col = 0; col < matrix.cols; ++col) {
      long pixel = 0;
      if (range > 0.0) pixel = std::lround(255.0 * (matrix.at(row, col) - lo) / range);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(pixel, 0L, 255L))));
    }
  }
  return out;
}

void write_pgm(const FingerprintMatrix& matrix, const fs::path& path) {
  write_file_atomic(path, encode_pgm(matrix));
}

void write_frames_csv(std::span<const MultiScaleFrame> frames, double sample_rate,
                      const fs::path& path) {
  std::string out = "time,f0,f1,f2,f3,f4,f10,f21,f32,f43\n";
  for (const auto& f : frames) {
    const double values[] = {static_cast<double>(f.time_index) / sample_rate,
                             f.f0, f.f1, f.f2, f.f3, f.f4, f.f10, f.f21, f.f32, f.f43};
    bool first = true;
    for (double v : values) {
      if (!first) out += ',';
      first = false;
      out += format_number(v, 9);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

} // namespace memtransform
