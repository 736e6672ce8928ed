#include "tact/io.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <openssl/evp.h>

namespace tact::io {

namespace fs = std::filesystem;

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or json)");
}

const char* format_extension(Format f) { return f == Format::csv ? ".csv" : ".json"; }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(dir_);
  staging_ = dir_ / (".staging-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directory(staging_);
}

OutputSet::~OutputSet() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void OutputSet::write(const std::string& name, const std::string& content) {
  if (committed_) throw std::logic_error("output set already committed");
  if (name.empty() || name.find('/') != std::string::npos || name == "manifest.json")
    throw std::invalid_argument("invalid output file name '" + name + "'");
  std::ofstream out(staging_ / name, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + name);
  if (!contains(name)) names_.push_back(name);
}

bool OutputSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::vector<FileDigest> OutputSet::commit(json manifest) {
  if (committed_) throw std::logic_error("output set already committed");
  std::vector<FileDigest> digests;
  for (const std::string& name : names_) {
    const fs::path staged = staging_ / name;
    digests.push_back({name, sha256_file(staged), fs::file_size(staged)});
  }
  json files = json::array();
  for (const auto& d : digests) files.push_back({{"name", d.name}, {"sha256", d.sha256}, {"bytes", d.bytes}});
  manifest["files"] = files;
  {
    std::ofstream out(staging_ / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest.json");
  }
  // data first, manifest last: a manifest on disk implies its files are in place
  for (const std::string& name : names_) fs::rename(staging_ / name, dir_ / name);
  fs::rename(staging_ / "manifest.json", dir_ / "manifest.json");
  committed_ = true;
  return digests;
}

std::string number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string series_text(const std::vector<SeriesRow>& rows, double chi, Format format) {
  if (format == Format::json) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"chi_t", chi * r.t},
                     {"f_q", r.f_q},
                     {"n_x", r.n_opt.x()},
                     {"n_y", r.n_opt.y()},
                     {"n_z", r.n_opt.z()},
                     {"fidelity", r.fidelity},
                     {"entropy", r.entropy},
                     {"energy", r.energy}});
    return arr.dump(1) + "\n";
  }
  std::string out = "chi_t,f_q,n_x,n_y,n_z,fidelity,entropy,energy\n";
  for (const auto& r : rows) {
    out += number(chi * r.t) + ',' + number(r.f_q) + ',' + number(r.n_opt.x()) + ',' + number(r.n_opt.y()) + ',' +
           number(r.n_opt.z()) + ',' + number(r.fidelity) + ',' + number(r.entropy) + ',' + number(r.energy) + '\n';
  }
  return out;
}

std::string grid_text(const SphereGrid& grid, int n, const std::string& quantity, double chi_t, Format format) {
  if (format == Format::json) {
    json j = {{"quantity", quantity}, {"n", n}, {"chi_t", chi_t}, {"n_theta", grid.n_theta()},
              {"n_phi", grid.n_phi()}, {"theta", grid.theta}, {"phi", grid.phi}};
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(grid.values.size()));
    for (int i = 0; i < grid.n_theta(); ++i)
      for (int k = 0; k < grid.n_phi(); ++k) flat.push_back(grid.values(i, k));
    j["values"] = flat;
    return j.dump() + "\n";
  }
  std::string out = "# quantity=" + quantity + " n=" + std::to_string(n) + " chi_t=" + number(chi_t) +
                    " n_theta=" + std::to_string(grid.n_theta()) + " n_phi=" + std::to_string(grid.n_phi()) +
                    " theta=[0,pi] phi=[-pi,pi)\n";
  for (int i = 0; i < grid.n_theta(); ++i) {
    for (int k = 0; k < grid.n_phi(); ++k) {
      if (k) out += ',';
      out += number(grid.values(i, k));
    }
    out += '\n';
  }
  return out;
}

std::string Table::text(Format format) const {
  if (format == Format::json) {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const std::string& cell = row.at(c);
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec == std::errc() && res.ptr == cell.data() + cell.size())
          obj[columns[c]] = v;
        else
          obj[columns[c]] = cell;
      }
      arr.push_back(obj);
    }
    return arr.dump(1) + "\n";
  }
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += '\n';
  }
  return out;
}

}  // namespace tact::io
