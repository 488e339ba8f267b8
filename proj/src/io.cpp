#include "dmkp/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dmkp/error.hpp"

namespace dmkp {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

// Little-endian packing independent of the host byte order.
template <class T>
void put(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::string_view in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ConfigError("FLD1: truncated file");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

std::string encode_fld1(const RealField& field, double time) {
  const auto& g = *field.grid;
  std::string out = "FLD1";
  out.reserve(48 + 8 * g.size());
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.nx()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.ny()));
  put<double>(out, g.lx());
  put<double>(out, g.ly());
  put<double>(out, time);
  for (double v : field.values) put<double>(out, v);
  return out;
}

Snapshot decode_fld1(std::string_view bytes) {
  if (bytes.substr(0, 4) != "FLD1") throw ConfigError("FLD1: bad magic");
  std::size_t pos = 4;
  if (get<std::uint32_t>(bytes, pos) != 1) throw ConfigError("FLD1: unsupported version");
  const auto nx = get<std::uint64_t>(bytes, pos);
  const auto ny = get<std::uint64_t>(bytes, pos);
  const double lx = get<double>(bytes, pos);
  const double ly = get<double>(bytes, pos);
  Snapshot snap;
  snap.time = get<double>(bytes, pos);
  if (nx > (1u << 24) || ny > (1u << 24)) throw ConfigError("FLD1: implausible grid size");
  if (bytes.size() != pos + 8 * nx * ny) throw ConfigError("FLD1: sample count does not match header");
  snap.field = RealField(build_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly));
  for (auto& v : snap.field.values) v = get<double>(bytes, pos);
  return snap;
}

void write_fld1(const fs::path& path, const RealField& field, double time) {
  atomic_write(path, encode_fld1(field, time));
}

Snapshot read_fld1(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_fld1(buf.str());
}

void write_manifest(const fs::path& snapshot_path, double time, const ModelParams& params,
                    const std::map<std::string, std::string>& provenance) {
  json j;
  j["format"] = "FLD1";
  j["snapshot"] = snapshot_path.filename().string();
  j["time"] = time;
  j["model"] = {{"alpha", params.alpha},
                {"beta", params.beta},
                {"epsilon", params.epsilon},
                {"dissipation", std::string(to_string(params.dissipation))}};
  j["provenance"] = provenance;
  fs::path path = snapshot_path;
  path += ".json";
  atomic_write(path, j.dump(2) + "\n");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw ConfigError("csv: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out = "# dmkp-lab v1 " + schema_ + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

void RunConfig::validate() const {
  model.validate();
  make_grid();
  if (!(time.t_final > 0.0) || !std::isfinite(time.t_final)) throw ConfigError("time.t_final must be positive");
  if (!(time.dt > 0.0) || time.dt > time.t_final) throw ConfigError("time.dt must lie in (0, t_final]");
  if (time.output_every < 1) throw ConfigError("time.output_every must be >= 1");
  static const std::set<std::string> kinds{"gaussian", "random", "single_mode", "phiN", "file"};
  if (!kinds.count(init.kind)) throw ConfigError("init.kind '" + init.kind + "' is not known");
  if (init.kind == "file" && init.path.empty()) throw ConfigError("init.path is required for kind file");
  if (init.kind == "gaussian" && !(init.width > 0.0)) throw ConfigError("init.width must be positive");
  if (init.kind == "phiN" && !(init.N >= 1.0)) throw ConfigError("init.N must be >= 1");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

GridPtr RunConfig::make_grid() const {
  const double two_pi = 2.0 * std::numbers::pi;
  return build_grid(grid.nx, grid.ny, grid.lx > 0.0 ? grid.lx : two_pi, grid.ly > 0.0 ? grid.ly : two_pi);
}

namespace {

// Reads an object, rejecting keys outside the allowed set.
class Section {
 public:
  Section(const json& j, std::string name, std::set<std::string> allowed) : j_(j), name_(std::move(name)) {
    if (!j.is_object()) throw ConfigError(name_ + " must be an object");
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  void read(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (v.get<long long>() < 0) throw ConfigError("");
        }
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else {
        if (!v.is_string()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("bad type for '" + name_ + "." + key + "'");
    }
  }

  const json& child(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string name_;
};

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  const Section top(root, "config", {"model", "grid", "time", "init", "output"});

  if (top.has("model")) {
    const Section m(top.child("model"), "model", {"preset", "alpha", "beta", "epsilon", "dissipation"});
    m.read("preset", cfg.preset);
    if (!cfg.preset.empty()) cfg.model = preset_by_name(cfg.preset, 1.0, 1.0);
    m.read("alpha", cfg.model.alpha);
    m.read("beta", cfg.model.beta);
    m.read("epsilon", cfg.model.epsilon);
    std::string kind;
    m.read("dissipation", kind);
    if (!kind.empty()) cfg.model.dissipation = dissipation_kind_from_string(kind);
  }
  if (top.has("grid")) {
    const Section g(top.child("grid"), "grid", {"nx", "ny", "lx", "ly"});
    g.read("nx", cfg.grid.nx);
    g.read("ny", cfg.grid.ny);
    g.read("lx", cfg.grid.lx);
    g.read("ly", cfg.grid.ly);
  }
  if (top.has("time")) {
    const Section t(top.child("time"), "time", {"t_final", "dt", "output_every"});
    t.read("t_final", cfg.time.t_final);
    t.read("dt", cfg.time.dt);
    t.read("output_every", cfg.time.output_every);
  }
  if (top.has("init")) {
    const json& ij = top.child("init");
    if (!ij.is_object() || !ij.contains("kind") || !ij.at("kind").is_string()) {
      throw ConfigError("init.kind is required");
    }
    const std::string kind = ij.at("kind").get<std::string>();
    std::set<std::string> allowed{"kind"};
    if (kind == "gaussian") allowed.insert({"amplitude", "width"});
    if (kind == "random") allowed.insert({"seed", "spectrum_slope", "band", "amplitude"});
    if (kind == "single_mode") allowed.insert({"j", "k", "amplitude"});
    if (kind == "phiN") allowed.insert({"N", "s"});
    if (kind == "file") allowed.insert({"path"});
    const Section i(ij, "init", allowed);
    cfg.init.kind = kind;
    i.read("amplitude", cfg.init.amplitude);
    i.read("width", cfg.init.width);
    i.read("seed", cfg.init.seed);
    i.read("spectrum_slope", cfg.init.spectrum_slope);
    i.read("band", cfg.init.band);
    i.read("j", cfg.init.j);
    i.read("k", cfg.init.k);
    i.read("N", cfg.init.N);
    i.read("s", cfg.init.s);
    i.read("path", cfg.init.path);
  }
  if (top.has("output")) {
    const Section o(top.child("output"), "output", {"dir", "s1", "s2"});
    o.read("dir", cfg.output.dir);
    o.read("s1", cfg.output.s1);
    o.read("s2", cfg.output.s2);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

fs::path resolve_output_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env);
  return fs::path(config.output.dir);
}

}  // namespace dmkp
