#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "cli.hpp"
#include "twave/error.hpp"

namespace twave::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 15]);
  }
  return hex;
}

OutputDir::OutputDir(std::filesystem::path dir, std::string command, json config,
                     std::uint64_t seed)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
      seed_(seed), started_(utc_now()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("out: cannot create '" + dir_.string() + "': " + ec.message());
}

void OutputDir::register_file(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::write_json(const std::string& name, const json& j) {
  std::ofstream out(file(name));
  if (!out) throw ValidationError("out: cannot write '" + file(name).string() + "'");
  out << j.dump(2) << '\n';
  register_file(name);
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size()) throw std::logic_error("csv header/column mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != rows) throw std::logic_error("csv columns differ in length");
  }
  std::ofstream out(file(name), std::ios::binary);
  if (!out) throw ValidationError("out: cannot write '" + file(name).string() + "'");
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) line += (i ? "," : "") + header[i];
  out << line << '\n';
  std::string buf;
  buf.reserve(1 << 20);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) buf.push_back(',');
      buf += format_double((*columns[c])[r]);
    }
    buf.push_back('\n');
    if (buf.size() > (1 << 20) - 256) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  register_file(name);
}

void OutputDir::finish() {
  json outputs = json::array();
  for (const auto& name : files_) {
    outputs.push_back({{"file", name},
                       {"sha256", sha256_file(file(name))},
                       {"bytes", std::filesystem::file_size(file(name))}});
  }
  json manifest{{"manifest_version", 1},
                {"command", command_},
                {"config", config_},
                {"seed", seed_},
                {"version", TWAVE_VERSION},
                {"started", started_},
                {"finished", utc_now()},
                {"outputs", outputs}};
  std::ofstream out(file("manifest.json"));
  out << manifest.dump(2) << '\n';
}

std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  const std::vector<std::string>& wanted) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV '" + path.string() + "'");
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  std::vector<std::size_t> idx;
  for (const auto& w : wanted) {
    const auto it = std::find(header.begin(), header.end(), w);
    if (it == header.end()) {
      throw ValidationError(path.string() + ": missing column '" + w + "'");
    }
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::vector<double>> cols(wanted.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      if (idx[c] >= cells.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": missing column '" +
                              wanted[c] + "'");
      }
      double v = 0.0;
      const auto& s = cells[idx[c]];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": column '" +
                              wanted[c] + "' is not a number");
      }
      cols[c].push_back(v);
    }
  }
  return cols;
}

}  // namespace twave::cli
